"""Exact arithmetic in Q(i), the field of Gaussian rationals.

Every coefficient in this package is a GaussianRational: a complex number
with rational real and imaginary parts, each stored as an exact Fraction.
There is no floating point anywhere.

Text format (used by all file I/O): ``<re>`` for real values, otherwise
``<re>+<im>i`` or ``<re>-<im>i``, each component an integer or ``p/q`` in
lowest terms.  Examples: ``1/2+1/2i``, ``0-3/4i``, ``-2``.
"""

from __future__ import annotations

from fractions import Fraction

_RationalLike = (int, Fraction)


class GaussianRational:
    """An element re + im*i of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", re if type(re) is Fraction else Fraction(re))
        object.__setattr__(self, "im", im if type(im) is Fraction else Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    # -- ring/field structure ------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """The field norm re^2 + im^2 (a nonnegative rational)."""
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianRational":
        """Multiplicative inverse via the conjugate: (a+bi)^-1 = (a-bi)/(a^2+b^2)."""
        n = self.norm()
        if not n:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational(self.re / n, -self.im / n)

    # -- comparisons ---------------------------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    @property
    def is_zero(self) -> bool:
        return not self

    # -- text form -----------------------------------------------------------

    def to_text(self) -> str:
        if not self.im:
            return str(self.re)
        if self.im < 0:
            return f"{self.re}-{-self.im}i"
        return f"{self.re}+{self.im}i"

    @classmethod
    def from_text(cls, text: str) -> "GaussianRational":
        """Parse the text form exactly.

        Accepts the canonical forms plus the usual shorthands for imaginary
        parts ("i", "-i", "2i", "1+i").  Raises ValueError on anything else.
        """
        s = text.strip().replace(" ", "")
        if not s:
            raise ValueError("empty Gaussian rational literal")
        if not s.endswith("i"):
            return cls(_parse_rational(s, text))
        body = s[:-1]
        # split off the imaginary coefficient at the last interior sign
        cut = 0
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "+-/":
                cut = k
                break
        re_part, im_part = body[:cut], body[cut:]
        if im_part in ("", "+"):
            im = Fraction(1)
        elif im_part == "-":
            im = Fraction(-1)
        else:
            im = _parse_rational(im_part, text)
        re = _parse_rational(re_part, text) if re_part else Fraction(0)
        return cls(re, im)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"GaussianRational({self.to_text()!r})"


def _parse_rational(s: str, original: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad Gaussian rational literal {original!r}") from exc


def _coerce(value):
    if type(value) is GaussianRational:
        return value
    if isinstance(value, _RationalLike):
        return GaussianRational(value)
    return NotImplemented


def gq(re=0, im=0) -> GaussianRational:
    """Shorthand constructor, accepting ints, Fractions, or a text literal."""
    if isinstance(re, str):
        if im:
            raise ValueError("text literal takes no imaginary argument")
        return GaussianRational.from_text(re)
    if isinstance(re, GaussianRational):
        if im:
            raise ValueError("already a GaussianRational")
        return re
    return GaussianRational(re, im)


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)
