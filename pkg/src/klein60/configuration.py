"""The Klein configuration: 60 points, 30 lines, 10 fundamental quadrics,
and the 60 dual planes, with exact incidence tables.

All incidences are established by exact evaluation during construction and
any count mismatch raises ConstructionError naming the failing object, so a
built configuration is already a verified one.  Indices follow the classical
numbering (points P1..P60, lines l1..l30, quadrics Q1..Q10); internally
everything is 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm

from .gaussian import GaussianRational, I, ONE, ZERO, gq
from .linalg import ExactMatrix
from .poly import XYZW, MultiPoly


class ConstructionError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# projective objects


class ProjPoint:
    """A point of P^3 with Q(i) coordinates, normalized so the first nonzero
    coordinate is 1."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        vals = tuple(v if isinstance(v, GaussianRational) else gq(v) for v in coords)
        if len(vals) != 4:
            raise ValueError("ProjPoint takes 4 homogeneous coordinates")
        lead = next((v for v in vals if not v.is_zero), None)
        if lead is None:
            raise ValueError("all coordinates zero")
        if lead != ONE:
            inv = lead.inverse()
            vals = tuple(v * inv for v in vals)
        object.__setattr__(self, "coords", vals)

    def __setattr__(self, name, value):
        raise AttributeError("ProjPoint is immutable")

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def int_pairs(self):
        """Integer representative: coordinates as (re, im) pairs of ints."""
        denom = 1
        for v in self.coords:
            denom = lcm(denom, v.re.denominator, v.im.denominator)
        return tuple(
            (int(v.re * denom), int(v.im * denom)) for v in self.coords
        )

    def __str__(self):
        return "(" + " : ".join(v.to_text() for v in self.coords) + ")"

    def __repr__(self):
        return f"ProjPoint{self}"


class ProjPlane:
    """A plane of P^3, stored as a normalized linear form."""

    __slots__ = ("form",)

    def __init__(self, form: MultiPoly):
        if form.is_zero or form.total_degree() != 1 or not form.is_homogeneous():
            raise ValueError("plane requires a nonzero linear form")
        object.__setattr__(self, "form", form.normalized())

    def __setattr__(self, name, value):
        raise AttributeError("ProjPlane is immutable")

    def contains(self, point: ProjPoint) -> bool:
        return self.form.value_at(point.coords).is_zero

    def coefficients(self):
        ctx = self.form.context
        return tuple(
            self.form.coefficient(tuple(1 if i == j else 0 for j in range(len(ctx))))
            for i in range(len(ctx))
        )

    def __eq__(self, other):
        return isinstance(other, ProjPlane) and self.form == other.form

    def __hash__(self):
        return hash(self.form.key())

    def __repr__(self):
        return f"ProjPlane({self.form})"


def dual_plane(point: ProjPoint) -> ProjPlane:
    """The plane p0*x + p1*y + p2*z + p3*w = 0 dual to the point."""
    x, y, z, w = XYZW.gens()
    p0, p1, p2, p3 = point.coords
    return ProjPlane(x.scale(p0) + y.scale(p1) + z.scale(p2) + w.scale(p3))


def plucker_from_points(p: ProjPoint, q: ProjPoint):
    """Canonical Plucker 6-vector (p01,p02,p03,p12,p13,p23) of the line pq."""
    a, b = p.coords, q.coords
    raw = tuple(
        a[i] * b[j] - a[j] * b[i] for i, j in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    )
    return _normalize_six(raw)


def plucker_from_forms(f: MultiPoly, g: MultiPoly):
    """Plucker vector of the intersection line of two planes (dual minors)."""
    u = ProjPlane(f).coefficients()
    v = ProjPlane(g).coefficients()

    def m(i, j):
        return u[i] * v[j] - u[j] * v[i]

    raw = (m(2, 3), -m(1, 3), m(1, 2), m(0, 3), -m(0, 2), m(0, 1))
    return _normalize_six(raw)


def _normalize_six(raw):
    lead = next((v for v in raw if not v.is_zero), None)
    if lead is None:
        raise ValueError("degenerate line (zero Plucker vector)")
    inv = lead.inverse()
    return tuple(v * inv for v in raw)


def plucker_meet(p, q) -> GaussianRational:
    """The incidence pairing; zero exactly when the two lines intersect."""
    return (
        p[0] * q[5] - p[1] * q[4] + p[2] * q[3]
        + p[5] * q[0] - p[4] * q[1] + p[3] * q[2]
    )


class ProjLine:
    """A line of P^3: two independent linear forms plus the derived,
    canonically normalized Plucker vector."""

    __slots__ = ("forms", "plucker", "span")

    def __init__(self, form1: MultiPoly, form2: MultiPoly, span=None):
        if span is None:
            span = _span_points(form1, form2)
        p, q = span
        pl = plucker_from_points(p, q)
        rel = pl[0] * pl[5] - pl[1] * pl[4] + pl[2] * pl[3]
        if not rel.is_zero:
            raise ConstructionError("Plucker relation violated")
        object.__setattr__(self, "forms", (form1.normalized(), form2.normalized()))
        object.__setattr__(self, "plucker", pl)
        object.__setattr__(self, "span", (p, q))

    def __setattr__(self, name, value):
        raise AttributeError("ProjLine is immutable")

    @classmethod
    def from_points(cls, p: ProjPoint, q: ProjPoint) -> "ProjLine":
        rows = [list(p.coords), list(q.coords)]
        mat = ExactMatrix.from_rows(rows)
        rank, kernel = mat.rank_and_kernel()
        if rank != 2:
            raise ValueError("coincident points do not span a line")
        gens = XYZW.gens()
        forms = []
        for vec in kernel:
            f = XYZW.zero()
            for g, c in zip(gens, vec):
                f = f + g.scale(c)
            forms.append(f)
        return cls(forms[0], forms[1], span=(p, q))

    def contains(self, point: ProjPoint) -> bool:
        return all(f.value_at(point.coords).is_zero for f in self.forms)

    def meets(self, other: "ProjLine") -> bool:
        return plucker_meet(self.plucker, other.plucker).is_zero

    def __eq__(self, other):
        return isinstance(other, ProjLine) and self.plucker == other.plucker

    def __hash__(self):
        return hash(self.plucker)

    def __repr__(self):
        return f"ProjLine({self.forms[0]}, {self.forms[1]})"


def _span_points(form1: MultiPoly, form2: MultiPoly):
    coeffs = [ProjPlane(form1).coefficients(), ProjPlane(form2).coefficients()]
    mat = ExactMatrix.from_rows(coeffs)
    rank, kernel = mat.rank_and_kernel()
    if rank != 2:
        raise ValueError("forms do not cut out a line")
    return ProjPoint(kernel[0]), ProjPoint(kernel[1])


# ---------------------------------------------------------------------------
# the configuration data


def _klein_points():
    i = I
    raw = [
        (0, 0, 1, 1), (0, 0, 1, i), (0, 0, 1, -1), (0, 0, 1, -i),
        (0, 1, 0, 1), (0, 1, 0, i), (0, 1, 0, -1), (0, 1, 0, -i),
        (0, 1, 1, 0), (0, 1, i, 0), (0, 1, -1, 0), (0, 1, -i, 0),
        (1, 0, 0, 1), (1, 0, 0, i), (1, 0, 0, -1), (1, 0, 0, -i),
        (1, 0, 1, 0), (1, 0, i, 0), (1, 0, -1, 0), (1, 0, -i, 0),
        (1, 1, 0, 0), (1, i, 0, 0), (1, -1, 0, 0), (1, -i, 0, 0),
        (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
        (1, 1, 1, 1), (1, 1, 1, -1), (1, 1, -1, 1), (1, 1, -1, -1),
        (1, -1, 1, 1), (1, -1, 1, -1), (1, -1, -1, 1), (1, -1, -1, -1),
        (1, 1, i, i), (1, 1, i, -i), (1, 1, -i, i), (1, 1, -i, -i),
        (1, -1, i, i), (1, -1, i, -i), (1, -1, -i, i), (1, -1, -i, -i),
        (1, i, 1, i), (1, i, 1, -i), (1, -i, 1, i), (1, -i, 1, -i),
        (1, i, -1, i), (1, i, -1, -i), (1, -i, -1, i), (1, -i, -1, -i),
        (1, i, i, 1), (1, i, -i, 1), (1, -i, i, 1), (1, -i, -i, 1),
        (1, i, i, -1), (1, i, -i, -1), (1, -i, i, -1), (1, -i, -i, -1),
    ]
    return tuple(ProjPoint(c) for c in raw)


def _klein_line_forms():
    x, y, z, w = XYZW.gens()
    i = I
    return (
        (x, y), (z - w, x - y), (z - w, x + y),
        (z + i * w, x + i * y), (z + i * w, x - i * y), (z + w, x - y),
        (z + w, x + y), (z - i * w, x + i * y), (z - i * w, x - i * y),
        (z, x), (y - w, x - z), (y - w, x + z),
        (y + i * w, x + i * z), (y + i * w, x - i * z), (y + w, x - z),
        (y + w, x + z), (y - i * w, x + i * z), (y - i * w, x - i * z),
        (w, x), (y - z, x - w), (y - z, x + w),
        (y + i * z, x + i * w), (y + i * z, x - i * w), (y + z, x - w),
        (y + z, x + w), (y - i * z, x + i * w), (y - i * z, x - i * w),
        (z, y), (w, y), (w, z),
    )


def fundamental_quadrics():
    x, y, z, w = XYZW.gens()
    return (
        x ** 2 + y ** 2 + z ** 2 + w ** 2,
        x * w + z * y,
        x * z + y * w,
        x ** 2 + y ** 2 - z ** 2 - w ** 2,
        x ** 2 - y ** 2 - z ** 2 + w ** 2,
        x ** 2 - y ** 2 + z ** 2 - w ** 2,
        x * w - y * z,
        x * y + z * w,
        x * y - z * w,
        x * z - y * w,
    )


@dataclass(frozen=True)
class KleinConfiguration:
    points: tuple
    lines: tuple
    quadrics: tuple
    planes: tuple
    line_points: tuple       # per line: frozenset of point indices (0-based)
    point_lines: tuple
    line_quadrics: tuple
    quadric_lines: tuple
    plane_points: tuple      # plane i is dual to point i
    point_planes: tuple

    def line_index(self, plucker_key) -> int | None:
        for i, line in enumerate(self.lines):
            if line.plucker == plucker_key:
                return i
        return None


def _quadric_contains_line(quadric: MultiPoly, line: ProjLine) -> bool:
    # a quadric vanishes on a line iff it vanishes at p, q and p+q
    p, q = line.span
    if not quadric.value_at(p.coords).is_zero:
        return False
    if not quadric.value_at(q.coords).is_zero:
        return False
    mid = tuple(a + b for a, b in zip(p.coords, q.coords))
    return quadric.value_at(mid).is_zero


def build_klein() -> KleinConfiguration:
    """Construct the full configuration and verify every incidence count."""
    points = _klein_points()
    lines = tuple(ProjLine(f1, f2) for f1, f2 in _klein_line_forms())
    quadrics = fundamental_quadrics()
    planes = tuple(dual_plane(p) for p in points)

    line_points = []
    for li, line in enumerate(lines):
        on = frozenset(pi for pi, p in enumerate(points) if line.contains(p))
        if len(on) != 6:
            raise ConstructionError(f"line {li + 1} carries {len(on)} points, expected 6")
        line_points.append(on)
    point_lines = []
    for pi in range(len(points)):
        through = frozenset(li for li, on in enumerate(line_points) if pi in on)
        if len(through) != 3:
            raise ConstructionError(
                f"point {pi + 1} lies on {len(through)} lines, expected 3"
            )
        point_lines.append(through)

    line_quadrics = []
    for li, line in enumerate(lines):
        inq = frozenset(
            qi for qi, quad in enumerate(quadrics) if _quadric_contains_line(quad, line)
        )
        if len(inq) != 4:
            raise ConstructionError(
                f"line {li + 1} lies on {len(inq)} quadrics, expected 4"
            )
        line_quadrics.append(inq)
    quadric_lines = []
    for qi in range(len(quadrics)):
        held = frozenset(li for li, inq in enumerate(line_quadrics) if qi in inq)
        if len(held) != 12:
            raise ConstructionError(
                f"quadric {qi + 1} contains {len(held)} lines, expected 12"
            )
        quadric_lines.append(held)

    plane_points = []
    for wi, plane in enumerate(planes):
        on = frozenset(pi for pi, p in enumerate(points) if plane.contains(p))
        if len(on) != 15:
            raise ConstructionError(
                f"plane {wi + 1} contains {len(on)} points, expected 15"
            )
        plane_points.append(on)
    point_planes = []
    for pi in range(len(points)):
        through = frozenset(wi for wi, on in enumerate(plane_points) if pi in on)
        point_planes.append(through)

    return KleinConfiguration(
        points=points,
        lines=lines,
        quadrics=quadrics,
        planes=planes,
        line_points=tuple(line_points),
        point_lines=tuple(point_lines),
        line_quadrics=tuple(line_quadrics),
        quadric_lines=tuple(quadric_lines),
        plane_points=tuple(plane_points),
        point_planes=tuple(point_planes),
    )


# ---------------------------------------------------------------------------
# arrangement statistics (exhaustive enumeration over the 60 dual planes)


@dataclass(frozen=True)
class ArrangementStats:
    """t[i]: points on exactly i planes (i >= 3); t1[j]: lines on exactly
    j planes (j >= 2)."""

    t: dict
    t1: dict

    def pair_identity(self) -> int:
        """Sum of t1[j]*C(j,2); equals C(#planes,2) when every pair is counted."""
        return sum(n * j * (j - 1) // 2 for j, n in self.t1.items())


def _cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _csub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _cadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _canon_vec(vec):
    """Canonical projective key of an integer complex vector."""
    for a, b in vec:
        if a or b:
            lead = (a, b)
            break
    n = lead[0] * lead[0] + lead[1] * lead[1]
    out = []
    for c, d in vec:
        out.append(
            (
                Fraction(c * lead[0] + d * lead[1], n),
                Fraction(d * lead[0] - c * lead[1], n),
            )
        )
    return tuple(out)


def incidence_stats(config: KleinConfiguration) -> ArrangementStats:
    """Hunt-style t and t(1) vectors of the 60-plane arrangement, by complete
    enumeration of plane pairs (lines) and rank-3 plane triples (points)."""
    planes = [
        ProjPoint(p.coefficients()).int_pairs() for p in config.planes
    ]
    nplanes = len(planes)

    # lines: every pair of distinct planes meets in a line
    line_buckets: dict = {}
    for i, j in combinations(range(nplanes), 2):
        u, v = planes[i], planes[j]
        raw = []
        for p, q in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
            raw.append(_csub(_cmul(u[p], v[q]), _cmul(u[q], v[p])))
        key = _canon_vec(raw)
        got = line_buckets.get(key)
        if got is None:
            line_buckets[key] = {i, j}
        else:
            got.add(i)
            got.add(j)
    t1: dict = {}
    for members in line_buckets.values():
        j = len(members)
        t1[j] = t1.get(j, 0) + 1

    # points: every plane triple of rank 3 meets in a single point
    point_buckets: dict = {}
    for i, j, k in combinations(range(nplanes), 3):
        r0, r1, r2 = planes[i], planes[j], planes[k]
        minors = {}
        for p, q in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
            minors[(p, q)] = _csub(_cmul(r1[p], r2[q]), _cmul(r1[q], r2[p]))

        def det_without(col):
            a, b, c = (col_ for col_ in (0, 1, 2, 3) if col_ != col)
            term = _cmul(r0[a], minors[(b, c)])
            term = _csub(term, _cmul(r0[b], minors[(a, c)]))
            return _cadd(term, _cmul(r0[c], minors[(a, b)]))

        vec = (
            det_without(0),
            _csub((0, 0), det_without(1)),
            det_without(2),
            _csub((0, 0), det_without(3)),
        )
        if not any(a or b for a, b in vec):
            continue  # rank <= 2: no isolated intersection point
        key = _canon_vec(vec)
        got = point_buckets.get(key)
        if got is None:
            point_buckets[key] = {i, j, k}
        else:
            got.add(i)
            got.add(j)
            got.add(k)
    t: dict = {}
    for members in point_buckets.values():
        i = len(members)
        t[i] = t.get(i, 0) + 1
    return ArrangementStats(t=t, t1=t1)


# ---------------------------------------------------------------------------
# collinearity structure of arbitrary point sets


@dataclass(frozen=True)
class CollinearLine:
    plucker_key: tuple
    point_indices: tuple


def collinear_structure(points) -> list:
    """Group all point pairs by the line they span.

    Returns CollinearLine records sorted by decreasing point count then by
    Plucker key, so the output is deterministic.  Records with two points are
    kept: together they enumerate every spanned line.
    """
    if len(points) < 2:
        raise ValueError("need at least two points")
    reps = [p.int_pairs() for p in points]
    buckets: dict = {}
    for i, j in combinations(range(len(points)), 2):
        u, v = reps[i], reps[j]
        raw = []
        for p, q in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
            raw.append(_csub(_cmul(u[p], v[q]), _cmul(u[q], v[p])))
        key = _canon_vec(raw)
        got = buckets.get(key)
        if got is None:
            buckets[key] = {i, j}
        else:
            got.add(i)
            got.add(j)
    records = [
        CollinearLine(plucker_key=key, point_indices=tuple(sorted(members)))
        for key, members in buckets.items()
    ]
    records.sort(key=lambda r: (-len(r.point_indices), r.plucker_key))
    return records


def collinear_size_histogram(records) -> dict:
    hist: dict = {}
    for r in records:
        n = len(r.point_indices)
        hist[n] = hist.get(n, 0) + 1
    return hist


def plucker_key_of_line(line: ProjLine) -> tuple:
    """The collinear_structure bucket key of a configuration line."""
    return tuple((v.re, v.im) for v in line.plucker)
