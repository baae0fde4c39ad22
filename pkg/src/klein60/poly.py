"""Sparse multivariate polynomials over Q(i) in fixed variable contexts.

A polynomial lives in a VariableContext (an ordered tuple of variable
names) and stores a map from dense exponent tuples to nonzero
GaussianRational coefficients.  The zero polynomial has an empty term map.
Polynomials from different contexts never combine implicitly; substitution
into a declared target context is the only bridge.

Monomials are ordered graded-lexicographically with the context's variable
order (first variable largest), which fixes canonical printing, leading
terms, and pivoting everywhere else in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

from .gaussian import GaussianRational, ONE, ZERO, gq


@dataclass(frozen=True)
class VariableContext:
    names: tuple

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r} in context {self.names}") from None

    def union(self, other: "VariableContext") -> "VariableContext":
        extra = tuple(n for n in other.names if n not in self.names)
        return VariableContext(self.names + extra)

    def gens(self):
        """The variables of this context, as polynomials."""
        return tuple(MultiPoly.variable(self, n) for n in self.names)

    def zero(self) -> "MultiPoly":
        return MultiPoly(self, {})

    def const(self, value) -> "MultiPoly":
        return MultiPoly.constant(self, value)


XYZW = VariableContext(("x", "y", "z", "w"))
ABCD = VariableContext(("a", "b", "c", "d"))
STU = VariableContext(("s", "t", "u"))
XYZW_ABCD = XYZW.union(ABCD)
STU_ABCD = STU.union(ABCD)


def _grlex_key(exps):
    return (sum(exps), exps)


def monomial_exponents(nvars: int, degree: int):
    """All exponent tuples of the given total degree, graded-lex descending."""
    exps = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for idx in combo:
            e[idx] += 1
        exps.append(tuple(e))
    exps.sort(key=lambda e: e, reverse=True)
    return exps


class MultiPoly:
    """Immutable sparse polynomial with GaussianRational coefficients."""

    __slots__ = ("context", "terms")

    def __init__(self, context: VariableContext, terms: dict):
        object.__setattr__(self, "context", context)
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    # -- constructors ----------------------------------------------------

    @classmethod
    def constant(cls, context, value) -> "MultiPoly":
        c = gq(value) if not isinstance(value, GaussianRational) else value
        if not c:
            return cls(context, {})
        return cls(context, {(0,) * len(context): c})

    @classmethod
    def variable(cls, context, name) -> "MultiPoly":
        e = [0] * len(context)
        e[context.index(name)] = 1
        return cls(context, {tuple(e): ONE})

    @classmethod
    def monomial(cls, context, exps, coeff=ONE) -> "MultiPoly":
        c = gq(coeff) if not isinstance(coeff, GaussianRational) else coeff
        if not c:
            return cls(context, {})
        if len(exps) != len(context):
            raise ValueError("exponent tuple does not match context")
        return cls(context, {tuple(exps): c})

    # -- structure -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def total_degree(self):
        """Maximal total degree, or -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def leading(self):
        """(exponent, coefficient) of the graded-lex leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def support_size(self) -> int:
        return len(self.terms)

    def coefficient(self, exps) -> GaussianRational:
        return self.terms.get(tuple(exps), ZERO)

    def constant_value(self) -> GaussianRational:
        """The value of a constant polynomial."""
        if not self.terms:
            return ZERO
        if len(self.terms) == 1:
            (e, c), = self.terms.items()
            if not any(e):
                return c
        raise ValueError("polynomial is not constant")

    # -- arithmetic ------------------------------------------------------

    def _check_context(self, other):
        if self.context != other.context:
            raise ValueError(
                f"context mismatch: {self.context.names} vs {other.context.names}"
            )

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        self._check_context(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            acc = terms.get(e)
            if acc is None:
                terms[e] = c
            else:
                acc = acc + c
                if acc:
                    terms[e] = acc
                else:
                    del terms[e]
        return MultiPoly(self.context, terms)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __neg__(self):
        return MultiPoly(self.context, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        self._check_context(other)
        if not self.terms or not other.terms:
            return MultiPoly(self.context, {})
        terms: dict = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(i + j for i, j in zip(ea, eb))
                c = ca * cb
                acc = terms.get(e)
                if acc is None:
                    terms[e] = c
                else:
                    acc = acc + c
                    if acc:
                        terms[e] = acc
                    else:
                        del terms[e]
        return MultiPoly(self.context, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative polynomial power")
        result = MultiPoly.constant(self.context, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, scalar) -> "MultiPoly":
        c = gq(scalar) if not isinstance(scalar, GaussianRational) else scalar
        if not c:
            return MultiPoly(self.context, {})
        return MultiPoly(self.context, {e: v * c for e, v in self.terms.items()})

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, Fraction, GaussianRational)):
            return MultiPoly.constant(self.context, other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            other = self._coerce(other)
            if other is NotImplemented:
                return NotImplemented
        return self.context == other.context and self.terms == other.terms

    def __hash__(self):
        return hash(self.key())

    def key(self):
        """Hashable canonical form (context names + sorted terms)."""
        return (self.context.names, tuple(sorted(self.terms.items())))

    # -- calculus and substitution ----------------------------------------

    def partial(self, name: str, order: int = 1) -> "MultiPoly":
        """Iterated formal partial derivative."""
        if order < 0:
            raise ValueError("negative derivative order")
        idx = self.context.index(name)
        terms: dict = {}
        for e, c in self.terms.items():
            k = e[idx]
            if k < order:
                continue
            fall = 1
            for j in range(order):
                fall *= k - j
            ne = e[:idx] + (k - order,) + e[idx + 1 :]
            terms[ne] = c * fall
        return MultiPoly(self.context, terms)

    def substitute(self, assignment: dict, target: VariableContext | None = None) -> "MultiPoly":
        """Simultaneous substitution of variables by scalars or polynomials.

        `assignment` maps variable names of this context to scalars or to
        MultiPoly values in a single target context.  Unassigned variables
        must exist (by name) in the target context.
        """
        for name in assignment:
            self.context.index(name)  # raises KeyError on unknown variables
        poly_targets = {
            v.context for v in assignment.values() if isinstance(v, MultiPoly)
        }
        if len(poly_targets) > 1 and target is None:
            raise ValueError("mixed substitution contexts without a declared target")
        if target is None:
            target = poly_targets.pop() if poly_targets else self.context
        values = {}
        for name, v in assignment.items():
            if isinstance(v, MultiPoly):
                if v.context != target:
                    raise ValueError(
                        f"substituted value for {name!r} lives in {v.context.names}, "
                        f"not the target {target.names}"
                    )
                values[name] = v
            else:
                values[name] = MultiPoly.constant(target, v)
        carried = {}
        for name in self.context.names:
            if name not in values:
                carried[name] = MultiPoly.variable(target, name)  # raises if absent
        power_cache: dict = {}

        def power(name, k):
            got = power_cache.get((name, k))
            if got is None:
                base = values[name] if name in values else carried[name]
                got = base ** k
                power_cache[(name, k)] = got
            return got

        result = MultiPoly(target, {})
        for e, c in self.terms.items():
            factor = MultiPoly.constant(target, c)
            for name, k in zip(self.context.names, e):
                if k:
                    factor = factor * power(name, k)
            result = result + factor
        return result

    def rename(self, target: VariableContext) -> "MultiPoly":
        """Positional transfer into a context of the same arity."""
        if len(target) != len(self.context):
            raise ValueError("rename requires equal arity contexts")
        return MultiPoly(target, dict(self.terms))

    def embed(self, target: VariableContext) -> "MultiPoly":
        """Embed into a larger context containing all of this one's names."""
        positions = [target.index(n) for n in self.context.names]
        width = len(target)
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * width
            for pos, k in zip(positions, e):
                ne[pos] = k
            terms[tuple(ne)] = c
        return MultiPoly(target, terms)

    def value_at(self, point) -> GaussianRational:
        """Evaluate at a full scalar point (a sequence, one value per variable)."""
        if len(point) != len(self.context):
            raise ValueError("point arity does not match context")
        coords = [gq(v) if not isinstance(v, GaussianRational) else v for v in point]
        total = ZERO
        cache: dict = {}
        for e, c in self.terms.items():
            v = c
            for idx, k in enumerate(e):
                if k:
                    p = cache.get((idx, k))
                    if p is None:
                        p = coords[idx] ** k
                        cache[(idx, k)] = p
                    v = v * p
            total = total + v
        return total

    # -- canonical form ----------------------------------------------------

    def normalized(self) -> "MultiPoly":
        """Scale so the graded-lex leading coefficient is 1 (zero stays zero)."""
        if not self.terms:
            return self
        _, c = self.leading()
        if c == ONE:
            return self
        inv = c.inverse()
        return MultiPoly(self.context, {e: v * inv for e, v in self.terms.items()})

    def exact_div(self, divisor: "MultiPoly") -> "MultiPoly":
        """Exact polynomial division; raises ArithmeticError if not divisible."""
        self._check_context(divisor)
        if not divisor.terms:
            raise ZeroDivisionError("polynomial division by zero")
        if not self.terms:
            return MultiPoly(self.context, {})
        de, dc = divisor.leading()
        remainder = self
        quotient = MultiPoly(self.context, {})
        while remainder.terms:
            re_, rc = remainder.leading()
            qe = tuple(a - b for a, b in zip(re_, de))
            if any(k < 0 for k in qe):
                raise ArithmeticError("inexact polynomial division")
            t = MultiPoly(self.context, {qe: rc / dc})
            quotient = quotient + t
            remainder = remainder - t * divisor
        return quotient

    # -- printing ----------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=_grlex_key, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                n if k == 1 else f"{n}^{k}"
                for n, k in zip(self.context.names, e)
                if k
            )
            if not mono:
                parts.append(f"({c})" if c.im or c.re < 0 else str(c))
                continue
            if c == ONE:
                parts.append(mono)
            elif c == -ONE:
                parts.append(f"-{mono}")
            elif c.im:
                parts.append(f"({c})*{mono}")
            elif c.re < 0:
                parts.append(f"-{-c.re}*{mono}")
            else:
                parts.append(f"{c}*{mono}")
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

    def __repr__(self):
        return f"MultiPoly({self})"
