"""Linear systems of forms with base points and fat points.

Covers the degree-6 ideal of the 60-point configuration (24 binomial
generators plus the 4 extra generators of the diminished set), unexpected
hypersurface bookkeeping, the explicit degree-6 cone polynomial with its
exact vertex and vanishing certificates, and the unique sextic singular at
three general points (multiplicities 4, 2, 2).

A fat point of multiplicity m imposes the C(m+2,3) conditions given by the
partial derivatives of order exactly m-1; for homogeneous forms Euler's
relation makes the lower-order derivatives vanish automatically, which the
cone certificate re-checks explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from random import Random

from .configuration import KleinConfiguration, ProjPoint
from .gaussian import ONE, ZERO
from .linalg import ExactMatrix
from .poly import ABCD, XYZW, XYZW_ABCD, MultiPoly, VariableContext, monomial_exponents
from .sampling import draw_general_point


# ---------------------------------------------------------------------------
# linear systems through point sets


@dataclass(frozen=True)
class LinearSystem:
    degree: int
    points: tuple
    basis: tuple  # homogeneous MultiPoly of the given degree, kernel of evaluation

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _evaluation_rows(points, exponents):
    rows = []
    for p in points:
        coords = p.coords
        powers = [[None] * 7 for _ in range(len(coords))]
        row = []
        for e in exponents:
            v = None
            for idx, k in enumerate(e):
                if not k:
                    continue
                cache = powers[idx]
                while len(cache) <= k:
                    cache.append(None)
                if cache[k] is None:
                    cache[k] = coords[idx] ** k
                f = cache[k]
                v = f if v is None else v * f
            row.append(v if v is not None else ONE)
        rows.append(row)
    return rows


def forms_through(points, degree: int, context: VariableContext = XYZW) -> LinearSystem:
    """All degree-d forms vanishing at the given points: the kernel of the
    |points| x C(degree+n-1, n-1) evaluation matrix, as polynomials."""
    if degree < 1:
        raise ValueError("degree must be positive")
    exponents = monomial_exponents(len(context), degree)
    points = tuple(points)
    if not points:
        basis = tuple(MultiPoly.monomial(context, e) for e in exponents)
        return LinearSystem(degree, points, basis)
    matrix = ExactMatrix.from_rows(_evaluation_rows(points, exponents))
    _, kernel = matrix.rank_and_kernel()
    basis = tuple(
        _poly_from_vector(context, exponents, vec).normalized() for vec in kernel
    )
    return LinearSystem(degree, points, basis)


def _poly_from_vector(context, exponents, vec) -> MultiPoly:
    terms = {e: c for e, c in zip(exponents, vec) if not c.is_zero}
    return MultiPoly(context, terms)


# ---------------------------------------------------------------------------
# fat points


@dataclass(frozen=True)
class FatPointSpec:
    """A point with multiplicity m >= 1: location either a ProjPoint or the
    symbolic general point (a:b:c:d)."""

    location: object  # ProjPoint | "symbolic"
    multiplicity: int

    def condition_count(self) -> int:
        return comb(self.multiplicity + 2, 3)


def fat_point_rows(basis, spec: FatPointSpec) -> ExactMatrix:
    """One row per derivative condition of order multiplicity-1, one column
    per basis element.  Symbolic locations give entries in the a,b,c,d ring."""
    if spec.multiplicity < 1:
        raise ValueError("multiplicity must be at least 1")
    order = spec.multiplicity - 1
    operators = monomial_exponents(4, order)
    names = XYZW.names
    rows = []
    for alpha in operators:
        row = []
        for f in basis:
            derived = f
            for name, k in zip(names, alpha):
                if k:
                    derived = derived.partial(name, k)
            if spec.location == "symbolic":
                row.append(derived.rename(ABCD))
            else:
                row.append(derived.value_at(spec.location.coords))
        rows.append(row)
    return ExactMatrix.from_rows(rows)


@dataclass(frozen=True)
class UnexpectednessReport:
    degree: int
    multiplicities: tuple
    base_dimension: int       # forms through Z alone
    actual: int               # with the general fat points imposed
    expected: int             # max(0, base - sum of condition counts)
    dimensions_by_trial: tuple

    @property
    def unexpected(self) -> bool:
        return self.actual > self.expected


class TrialDisagreement(RuntimeError):
    pass


def verify_unexpected(
    points,
    degree: int,
    multiplicities,
    rng: Random,
    config: KleinConfiguration,
    trials: int = 3,
    base_system: LinearSystem | None = None,
) -> UnexpectednessReport:
    """Actual vs expected dimension with general fat points, at seeded random
    specializations.  All trials must agree; disagreement raises rather than
    averaging.  Specialized dimensions can only exceed the generic one, so
    the common value is an upper bound certificate for genericity."""
    system = base_system if base_system is not None else forms_through(points, degree)
    mults = tuple(multiplicities)
    expected = max(
        0, system.dimension - sum(comb(m + 2, 3) for m in mults)
    )
    dims = []
    for _ in range(trials):
        drawn = []
        for m in mults:
            drawn.append(draw_general_point(rng, config, avoid=drawn))
        stacked = None
        for point, m in zip(drawn, mults):
            rows = fat_point_rows(system.basis, FatPointSpec(point, m))
            stacked = rows if stacked is None else stacked.stack(rows)
        if stacked is None:
            dims.append(system.dimension)
            continue
        rank = stacked.rank()
        dims.append(system.dimension - rank)
    if len(set(dims)) > 1:
        raise TrialDisagreement(f"specialized dimensions disagree: {dims}")
    return UnexpectednessReport(
        degree=degree,
        multiplicities=mults,
        base_dimension=system.dimension,
        actual=dims[0],
        expected=expected,
        dimensions_by_trial=tuple(dims),
    )


# ---------------------------------------------------------------------------
# the 24 degree-6 generators and the 4 extra generators


def sextic_generators():
    """The 24 binomial sextics generating the ideal of the 60 points."""
    x, y, z, w = XYZW.gens()
    m_xy = x ** 2 * y ** 2 - z ** 2 * w ** 2
    m_xz = x ** 2 * z ** 2 - y ** 2 * w ** 2
    m_yz = y ** 2 * z ** 2 - x ** 2 * w ** 2
    return (
        x * y * (x ** 4 - y ** 4),
        x * z * (z ** 4 - x ** 4),
        x * w * (x ** 4 - w ** 4),
        y * z * (y ** 4 - z ** 4),
        y * w * (w ** 4 - y ** 4),
        z * w * (z ** 4 - w ** 4),
        x * y * (z ** 4 - w ** 4),
        x * z * (y ** 4 - w ** 4),
        x * w * (y ** 4 - z ** 4),
        y * z * (x ** 4 - w ** 4),
        y * w * (x ** 4 - z ** 4),
        z * w * (x ** 4 - y ** 4),
        y * w * m_xy,
        x * w * m_xy,
        y * z * m_xy,
        x * z * m_xy,
        z * w * m_xz,
        x * w * m_xz,
        y * z * m_xz,
        x * y * m_xz,
        z * w * m_yz,
        y * w * m_yz,
        x * z * m_yz,
        x * y * m_yz,
    )


def diminished_extra_generators():
    """The 4 additional sextics vanishing on the set without the 4 coordinate
    points (killed by requiring vanishing there)."""
    x, y, z, w = XYZW.gens()
    return (
        2 * x ** 2 * y ** 2 * z ** 2 - x ** 4 * w ** 2 - y ** 4 * w ** 2 - z ** 4 * w ** 2 + w ** 6,
        2 * x ** 2 * y ** 2 * w ** 2 - x ** 4 * z ** 2 - y ** 4 * z ** 2 - w ** 4 * z ** 2 + z ** 6,
        2 * x ** 2 * z ** 2 * w ** 2 - x ** 4 * y ** 2 - z ** 4 * y ** 2 - w ** 4 * y ** 2 + y ** 6,
        2 * y ** 2 * z ** 2 * w ** 2 - y ** 4 * x ** 2 - z ** 4 * x ** 2 - w ** 4 * x ** 2 + x ** 6,
    )


def in_span(basis, candidates) -> bool:
    """Whether every candidate lies in the exact linear span of the basis."""
    degree = basis[0].total_degree()
    context = basis[0].context
    exponents = monomial_exponents(len(context), degree)
    rows = [[f.coefficient(e) for e in exponents] for f in basis]
    base_rank = ExactMatrix.from_rows(rows).rank()
    for f in candidates:
        extended = rows + [[f.coefficient(e) for e in exponents]]
        if ExactMatrix.from_rows(extended).rank() != base_rank:
            return False
    return True


def coefficient_rank(polys) -> int:
    degree = max(f.total_degree() for f in polys)
    context = polys[0].context
    exponents = monomial_exponents(len(context), degree)
    rows = [[f.coefficient(e) for e in exponents] for f in polys]
    return ExactMatrix.from_rows(rows).rank()


# ---------------------------------------------------------------------------
# the unexpected cone of degree 6


def cone_coefficients():
    """Coefficients of the cone polynomial on the 24 generators, as
    polynomials in the vertex coordinates a,b,c,d (same generator order)."""
    a, b, c, d = ABCD.gens()
    n_ab = a ** 2 * b ** 2 - c ** 2 * d ** 2
    n_ac = a ** 2 * c ** 2 - b ** 2 * d ** 2
    n_ad = a ** 2 * d ** 2 - b ** 2 * c ** 2
    return (
        c * d * (c ** 4 - d ** 4),
        b * d * (b ** 4 - d ** 4),
        b * c * (b ** 4 - c ** 4),
        a * d * (a ** 4 - d ** 4),
        a * c * (a ** 4 - c ** 4),
        a * b * (a ** 4 - b ** 4),
        (c * d * (a ** 4 - b ** 4)).scale(5),
        (b * d * (c ** 4 - a ** 4)).scale(5),
        (b * c * (a ** 4 - d ** 4)).scale(5),
        (a * d * (b ** 4 - c ** 4)).scale(5),
        (a * c * (d ** 4 - b ** 4)).scale(5),
        (a * b * (c ** 4 - d ** 4)).scale(5),
        (a * c * (-n_ab)).scale(10),
        (b * c * n_ab).scale(10),
        (a * d * n_ab).scale(10),
        (b * d * (-n_ab)).scale(10),
        (a * b * n_ac).scale(10),
        (b * c * (-n_ac)).scale(10),
        (a * d * (-n_ac)).scale(10),
        (c * d * n_ac).scale(10),
        (a * b * n_ad).scale(10),
        (a * c * (-n_ad)).scale(10),
        (b * d * (-n_ad)).scale(10),
        (c * d * n_ad).scale(10),
    )


def cone_polynomial() -> MultiPoly:
    """The bidegree-(6,6) cone: for each vertex (a:b:c:d) a sextic through
    all 60 points with a multiplicity-6 singularity at the vertex."""
    total = XYZW_ABCD.zero()
    for gen, coeff in zip(sextic_generators(), cone_coefficients()):
        total = total + gen.embed(XYZW_ABCD) * coeff.embed(XYZW_ABCD)
    return total


class ConeCertificateError(RuntimeError):
    pass


@dataclass(frozen=True)
class ConeCertificate:
    vanishing_points: int          # points where the identity in a,b,c,d holds
    vertex_identities: int         # vanishing derivative identities, order <= 5
    order5_identities: int         # the 56 top-order ones among them
    swap_symmetric: bool


def cone_certificate(config: KleinConfiguration) -> ConeCertificate:
    """Exact polynomial-identity certificate for the cone:

    - substituting each of the 60 points for (x,y,z,w) yields the zero
      polynomial in (a,b,c,d);
    - every derivative in x,y,z,w of order <= 5, evaluated at
      (x,y,z,w) = (a,b,c,d), vanishes identically (multiplicity 6);
    - swapping the two variable groups fixes the polynomial.
    """
    cone = cone_polynomial()
    names = XYZW.names
    for idx, point in enumerate(config.points):
        assignment = dict(zip(names, point.coords))
        residue = cone.substitute(assignment, target=ABCD)
        if not residue.is_zero:
            raise ConeCertificateError(f"cone does not vanish at point {idx + 1}")

    a_gens = dict(zip(names, ABCD.gens()))
    vertex_count = 0
    order5 = 0
    for order in range(6):
        for alpha in monomial_exponents(4, order):
            derived = cone
            for name, k in zip(names, alpha):
                if k:
                    derived = derived.partial(name, k)
            residue = derived.substitute(a_gens, target=ABCD)
            if not residue.is_zero:
                raise ConeCertificateError(
                    f"vertex derivative {alpha} does not vanish"
                )
            vertex_count += 1
            if order == 5:
                order5 += 1

    union_gens = dict(zip(XYZW_ABCD.names, XYZW_ABCD.gens()))
    swap = {
        "x": union_gens["a"], "y": union_gens["b"],
        "z": union_gens["c"], "w": union_gens["d"],
        "a": union_gens["x"], "b": union_gens["y"],
        "c": union_gens["z"], "d": union_gens["w"],
    }
    swapped = cone.substitute(swap, target=XYZW_ABCD)
    if swapped != cone:
        raise ConeCertificateError("cone is not symmetric under swapping variable groups")
    return ConeCertificate(
        vanishing_points=len(config.points),
        vertex_identities=vertex_count,
        order5_identities=order5,
        swap_symmetric=True,
    )


# ---------------------------------------------------------------------------
# the unique sextic with singularities of multiplicity 4, 2, 2


@dataclass(frozen=True)
class StackedTrial:
    vertex: tuple
    double_points: tuple
    rank: int
    kernel_dimension: int
    sextic: MultiPoly | None


@dataclass(frozen=True)
class Surface422Certificate:
    matrix_shape: tuple
    symbolic_rank: int
    specialization_ranks: tuple    # rank of the symbolic matrix at sample points
    kernel_identities: int         # symbolic kernel vectors verified exactly
    kernel_span_rank: int          # their rank at a sample point
    trials: tuple                  # StackedTrial per seed draw
    degenerate_rank: int           # stacked rank with coincident double points
    degenerate_flagged: bool


def symbolic_multiplicity4_matrix() -> ExactMatrix:
    """The 20 x 24 matrix of order-3 derivatives of the generators at the
    symbolic point (a:b:c:d)."""
    gens = sextic_generators()
    return fat_point_rows(gens, FatPointSpec("symbolic", 4))


def _symbolic_kernel_vectors():
    """Second derivatives of the cone coefficients in the vertex variables:
    each gives a sextic through the 60 points with vertex multiplicity >= 4,
    hence an exact kernel vector of the symbolic matrix."""
    coeffs = cone_coefficients()
    vectors = []
    for p in range(4):
        for q in range(p, 4):
            np_, nq = ABCD.names[p], ABCD.names[q]
            vec = []
            for cpoly in coeffs:
                d = cpoly.partial(np_)
                d = d.partial(nq)
                vec.append(d)
            vectors.append(tuple(vec))
    return vectors


def surface_422_certificate(
    rng: Random, config: KleinConfiguration, trials: int = 3
) -> Surface422Certificate:
    """Two-sided exact certificate that vanishing to order 4 at a general
    point imposes rank 15 on the 24 generators, plus the unique sextic with
    multiplicities (4,2,2) at seeded specializations.

    Rank >= 15 comes from specializations (ranks only drop there); rank <= 15
    from ten symbolic kernel vectors verified as polynomial identities whose
    specialization already spans 9 dimensions.  Together they pin the
    symbolic rank to exactly 15 without eliminating the symbolic matrix.
    """
    gens = sextic_generators()
    sym = symbolic_multiplicity4_matrix()

    vectors = _symbolic_kernel_vectors()
    zero = ABCD.zero()
    for vec in vectors:
        image = sym.mat_vec(vec)
        if any(entry != zero for entry in image):
            raise ConeCertificateError("symbolic kernel identity fails")

    spec_ranks = []
    span_rank = None
    for _ in range(trials):
        point = draw_general_point(rng, config)
        spec_ranks.append(sym.specialize(point.coords).rank())
        if span_rank is None:
            span_matrix = ExactMatrix.from_rows(
                [[v.value_at(point.coords) for v in vec] for vec in vectors]
            )
            span_rank = span_matrix.rank()
    lower = max(spec_ranks)
    upper = 24 - span_rank
    if lower != upper:
        raise ConeCertificateError(
            f"rank certificate gap: specialization gives >= {lower}, "
            f"kernel identities give <= {upper}"
        )
    symbolic_rank = lower

    trial_records = []
    for _ in range(trials):
        vertex = draw_general_point(rng, config)
        q1 = draw_general_point(rng, config, avoid=[vertex])
        q2 = draw_general_point(rng, config, avoid=[vertex, q1])
        rank, kernel = _stacked_system(gens, vertex, q1, q2).rank_and_kernel()
        sextic = None
        if len(kernel) == 1:
            sextic = _combine(gens, kernel[0])
            _check_multiplicities(sextic, vertex, q1, q2)
        trial_records.append(
            StackedTrial(
                vertex=vertex.coords,
                double_points=(q1.coords, q2.coords),
                rank=rank,
                kernel_dimension=len(kernel),
                sextic=sextic,
            )
        )

    vertex = draw_general_point(rng, config)
    q = draw_general_point(rng, config, avoid=[vertex])
    degenerate_rank = _stacked_system(gens, vertex, q, q).rank()
    return Surface422Certificate(
        matrix_shape=(sym.rows, sym.cols),
        symbolic_rank=symbolic_rank,
        specialization_ranks=tuple(spec_ranks),
        kernel_identities=len(vectors),
        kernel_span_rank=span_rank,
        trials=tuple(trial_records),
        degenerate_rank=degenerate_rank,
        degenerate_flagged=degenerate_rank < 23,
    )


def _stacked_system(gens, vertex, q1, q2) -> ExactMatrix:
    stacked = fat_point_rows(gens, FatPointSpec(vertex, 4))
    stacked = stacked.stack(fat_point_rows(gens, FatPointSpec(q1, 2)))
    return stacked.stack(fat_point_rows(gens, FatPointSpec(q2, 2)))


def _combine(gens, vector) -> MultiPoly:
    total = XYZW.zero()
    for g, c in zip(gens, vector):
        total = total + g.scale(c)
    return total.normalized()


def _check_multiplicities(sextic, vertex, q1, q2):
    for point, order in ((vertex, 3), (q1, 1), (q2, 1)):
        for k in range(order + 1):
            for alpha in monomial_exponents(4, k):
                derived = sextic
                for name, e in zip(XYZW.names, alpha):
                    if e:
                        derived = derived.partial(name, e)
                if not derived.value_at(point.coords).is_zero:
                    raise ConeCertificateError(
                        "certified sextic misses a required multiplicity"
                    )
