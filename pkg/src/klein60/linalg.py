"""Exact linear algebra over Q(i) and over polynomial rings above it.

Rank and kernel are computed by fraction-free (Bareiss) elimination: every
intermediate entry is a minor of the original matrix, and the one division
per update step is exact in the entry ring.  Pivots are chosen
deterministically: first column holding a nonzero entry, then the candidate
row whose entry has the smallest support (fewest polynomial terms), ties
broken by row index.  This keeps intermediate polynomial entries small and
makes every result reproducible.

Kernel vectors are returned with entries in the entry ring (denominators
cleared); for scalar matrices they are additionally normalized so the first
nonzero entry is 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .gaussian import GaussianRational, ONE, ZERO, gq
from .poly import MultiPoly


def _as_entry(value):
    if isinstance(value, (MultiPoly, GaussianRational)):
        return value
    if isinstance(value, (int, Fraction)):
        return gq(value)
    raise TypeError(f"unsupported matrix entry {value!r}")


@dataclass(frozen=True)
class ExactMatrix:
    """Immutable matrix with entries in Q(i) or in one polynomial ring over it."""

    rows: int
    cols: int
    entries: tuple

    @classmethod
    def from_rows(cls, rows) -> "ExactMatrix":
        data = tuple(tuple(_as_entry(v) for v in row) for row in rows)
        nrows = len(data)
        ncols = len(data[0]) if data else 0
        if any(len(r) != ncols for r in data):
            raise ValueError("ragged rows")
        ring = None
        for row in data:
            for v in row:
                kind = (MultiPoly, v.context) if isinstance(v, MultiPoly) else GaussianRational
                if ring is None:
                    ring = kind
                elif ring != kind:
                    raise ValueError("matrix entries must share one coefficient ring")
        return cls(nrows, ncols, data)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls.from_rows(
            [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        )

    def row(self, i):
        return self.entries[i]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            self.cols, self.rows, tuple(zip(*self.entries)) if self.entries else ()
        )

    @property
    def is_polynomial(self) -> bool:
        for row in self.entries:
            for v in row:
                return isinstance(v, MultiPoly)
        return False

    def mat_vec(self, vec):
        """Exact matrix-vector product (entries and vector in the same ring)."""
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        out = []
        for row in self.entries:
            acc = None
            for a, v in zip(row, vec):
                term = a * v
                acc = term if acc is None else acc + term
            out.append(acc if acc is not None else ZERO)
        return out

    def stack(self, other: "ExactMatrix") -> "ExactMatrix":
        if other.cols != self.cols:
            raise ValueError("column mismatch in stack")
        return ExactMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def rank(self) -> int:
        rank, _, _ = _bareiss(self.entries, self.cols)
        return rank

    def right_kernel(self):
        _, kernel = self.rank_and_kernel()
        return kernel

    def rank_and_kernel(self):
        """Exact rank over the fraction field and a cleared kernel basis."""
        rank, echelon, pivot_cols = _bareiss(self.entries, self.cols)
        kernel = _kernel_from_echelon(echelon, pivot_cols, self.cols, self.is_polynomial)
        return rank, kernel

    def specialize(self, point) -> "ExactMatrix":
        """Evaluate every polynomial entry at a scalar point."""
        if not self.is_polynomial:
            return self
        data = tuple(
            tuple(v.value_at(point) for v in row) for row in self.entries
        )
        return ExactMatrix(self.rows, self.cols, data)

    def __str__(self):
        return "\n".join("[" + ", ".join(str(v) for v in row) + "]" for row in self.entries)


def _is_zero(v) -> bool:
    return v.is_zero


def _support(v) -> int:
    return v.support_size() if isinstance(v, MultiPoly) else 1


def _exact_div(num, den):
    if isinstance(num, MultiPoly):
        return num.exact_div(den)
    return num / den


def _bareiss(entries, cols):
    """Fraction-free row echelon reduction.

    Returns (rank, echelon rows, pivot column list).  Echelon rows keep ring
    entries; row i has its pivot in pivot_cols[i] and zeros before it.
    """
    m = [list(row) for row in entries]
    nrows = len(m)
    pivot_cols = []
    prev_pivot = None
    r = 0
    for c in range(cols):
        best = None
        for i in range(r, nrows):
            v = m[i][c]
            if not _is_zero(v):
                s = _support(v)
                if best is None or s < best[0]:
                    best = (s, i)
        if best is None:
            continue
        i = best[1]
        if i != r:
            m[r], m[i] = m[i], m[r]
        pivot = m[r][c]
        for i in range(r + 1, nrows):
            head = m[i][c]
            if _is_zero(head):
                if prev_pivot is not None:
                    # Bareiss still rescales rows below the pivot
                    for j in range(c + 1, cols):
                        m[i][j] = _exact_div(m[i][j] * pivot, prev_pivot)
                else:
                    for j in range(c + 1, cols):
                        m[i][j] = m[i][j] * pivot
            else:
                if prev_pivot is not None:
                    for j in range(c + 1, cols):
                        m[i][j] = _exact_div(m[i][j] * pivot - head * m[r][j], prev_pivot)
                else:
                    for j in range(c + 1, cols):
                        m[i][j] = m[i][j] * pivot - head * m[r][j]
                m[i][c] = _zero_like(head)
        prev_pivot = pivot
        pivot_cols.append(c)
        r += 1
        if r == nrows:
            break
    return r, [tuple(row) for row in m[:r]], pivot_cols


def _zero_like(v):
    return MultiPoly(v.context, {}) if isinstance(v, MultiPoly) else ZERO


def _one_like(v):
    return MultiPoly.constant(v.context, 1) if isinstance(v, MultiPoly) else ONE


class _Frac:
    """Unreduced fraction over the entry ring, for kernel back-substitution."""

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        self.num = num
        self.den = den

    @classmethod
    def of(cls, v):
        return cls(v, _one_like(v))

    def __add__(self, other):
        return _Frac(self.num * other.den + other.num * self.den, self.den * other.den)

    def __mul__(self, other):
        return _Frac(self.num * other.num, self.den * other.den)

    def div_ring(self, v):
        return _Frac(self.num, self.den * v)

    def mul_ring(self, v):
        return _Frac(self.num * v, self.den)

    @property
    def is_zero(self):
        return _is_zero(self.num)


def _kernel_from_echelon(echelon, pivot_cols, cols, polynomial):
    rank = len(pivot_cols)
    free_cols = [c for c in range(cols) if c not in set(pivot_cols)]
    if not echelon and free_cols:
        one = ONE
        basis = []
        for f in free_cols:
            basis.append(tuple(one if j == f else ZERO for j in range(cols)))
        return basis
    if not polynomial:
        return _scalar_kernel(echelon, pivot_cols, cols, free_cols)
    basis = []
    for f in free_cols:
        vec = [None] * cols
        for j in range(cols):
            if j == f:
                vec[j] = _Frac.of(_one_like(echelon[0][0]))
            elif j in pivot_cols:
                vec[j] = None  # filled below
            else:
                vec[j] = _Frac.of(_zero_like(echelon[0][0]))
        for i in range(rank - 1, -1, -1):
            pc = pivot_cols[i]
            acc = None
            for j in range(pc + 1, cols):
                e = echelon[i][j]
                if _is_zero(e) or vec[j].is_zero:
                    continue
                term = vec[j].mul_ring(e)
                acc = term if acc is None else acc + term
            if acc is None:
                vec[pc] = _Frac.of(_zero_like(echelon[i][pc]))
            else:
                neg = _Frac(-acc.num, acc.den)
                vec[pc] = neg.div_ring(echelon[i][pc])
        basis.append(_clear_fractions(vec, polynomial))
    return basis


def _clear_fractions(vec, polynomial):
    if not polynomial:
        cleared = [fr.num * fr.den.inverse() for fr in vec]
        lead = next(v for v in cleared if not v.is_zero)
        inv = lead.inverse()
        return tuple(v * inv for v in cleared)
    common = None
    for fr in vec:
        common = fr.den if common is None else common * fr.den
    cleared = []
    for fr in vec:
        cleared.append(common.exact_div(fr.den) * fr.num)
    return tuple(cleared)


def _scalar_kernel(echelon, pivot_cols, cols, free_cols):
    """Kernel basis for field entries: reduce to RREF, then read vectors off.

    Field arithmetic keeps components gcd-reduced (Fractions), so entries stay
    small where unreduced fraction-free back-substitution would blow up.
    """
    rank = len(pivot_cols)
    rows = [list(r) for r in echelon]
    for i in range(rank - 1, -1, -1):
        pc = pivot_cols[i]
        inv = rows[i][pc].inverse()
        rows[i] = [v * inv for v in rows[i]]
        for k in range(i):
            factor = rows[k][pc]
            if factor.is_zero:
                continue
            rows[k] = [a - factor * b for a, b in zip(rows[k], rows[i])]
    basis = []
    for f in free_cols:
        vec = [ZERO] * cols
        vec[f] = ONE
        for i, pc in enumerate(pivot_cols):
            vec[pc] = -rows[i][f]
        lead = next(v for v in vec if not v.is_zero)
        if lead != ONE:
            inv = lead.inverse()
            vec = [v * inv for v in vec]
        basis.append(tuple(vec))
    return basis


def rank_semicontinuity_check(matrix: ExactMatrix, rng, samples: int = 5, bound: int = 50):
    """Check rank(specialization) <= rank and that some specialization attains it.

    Draws `samples` random integer points; resamples a point once if it makes
    every entry vanish.  Returns (generic_rank, specialized_ranks, attained).
    """
    generic = matrix.rank()
    if not matrix.is_polynomial:
        return generic, [generic] * samples, True
    nvars = 0
    for row in matrix.entries:
        for v in row:
            nvars = len(v.context)
            break
        break
    ranks = []
    for _ in range(samples):
        point = [rng.randint(-bound, bound) for _ in range(nvars)]
        spec = matrix.specialize(point)
        ranks.append(spec.rank())
    return generic, ranks, any(r == generic for r in ranks)
