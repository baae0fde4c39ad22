"""Finite matrix groups acting on projective 3-space.

Builds the order-32 Heisenberg group H_{2,2} from its four standard
generators, the larger group obtained by adjoining the quadric-cycling
matrix, and orbits of polynomials under the substitution action
(g . f)(v) = f(g v), with projective canonicalization throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gaussian import GaussianRational, I, ONE, ZERO, gq
from .linalg import ExactMatrix
from .poly import XYZW, MultiPoly


class GroupElement:
    """An invertible 4x4 matrix over Q(i)."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        rows = tuple(
            tuple(v if isinstance(v, GaussianRational) else gq(v) for v in row)
            for row in entries
        )
        if len(rows) != 4 or any(len(r) != 4 for r in rows):
            raise ValueError("group elements are 4x4 matrices")
        object.__setattr__(self, "entries", rows)
        if ExactMatrix(4, 4, rows).rank() != 4:
            raise ValueError("singular matrix cannot be a group element")

    def __setattr__(self, name, value):
        raise AttributeError("GroupElement is immutable")

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        a, b = self.entries, other.entries
        bt = tuple(zip(*b))
        return GroupElement(
            tuple(
                tuple(_dot(ra, cb) for cb in bt)
                for ra in a
            )
        )

    def __neg__(self) -> "GroupElement":
        return GroupElement(tuple(tuple(-v for v in row) for row in self.entries))

    def scale(self, scalar) -> "GroupElement":
        s = gq(scalar)
        return GroupElement(tuple(tuple(v * s for v in row) for row in self.entries))

    def inverse(self) -> "GroupElement":
        aug = [
            list(row) + [ONE if i == j else ZERO for j in range(4)]
            for i, row in enumerate(self.entries)
        ]
        for c in range(4):
            p = next(i for i in range(c, 4) if not aug[i][c].is_zero)
            aug[c], aug[p] = aug[p], aug[c]
            inv = aug[c][c].inverse()
            aug[c] = [v * inv for v in aug[c]]
            for i in range(4):
                if i != c and not aug[i][c].is_zero:
                    f = aug[i][c]
                    aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
        return GroupElement(tuple(tuple(row[4:]) for row in aug))

    def apply(self, coords):
        """Matrix-vector action on a 4-tuple of coordinates."""
        return tuple(_dot(row, coords) for row in self.entries)

    def key(self):
        return self.entries

    def projective_key(self):
        """Canonical representative of the scalar class: first nonzero entry 1."""
        flat = [v for row in self.entries for v in row]
        lead = next(v for v in flat if not v.is_zero)
        if lead == ONE:
            return self.entries
        inv = lead.inverse()
        return tuple(tuple(v * inv for v in row) for row in self.entries)

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __str__(self):
        return "\n".join("[" + ", ".join(str(v) for v in row) + "]" for row in self.entries)


def _dot(row, col):
    acc = ZERO
    for a, b in zip(row, col):
        if (not a.is_zero) and (not b.is_zero):
            acc = acc + a * b
    return acc


@dataclass
class MatrixGroup:
    """A finite matrix group, closed under products, in linear or projective mode."""

    generators: list
    mode: str
    elements: list = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.elements)

    def element_key(self, g: GroupElement):
        return g.projective_key() if self.mode == "projective" else g.key()

    def __contains__(self, g: GroupElement):
        key = self.element_key(g)
        return any(self.element_key(h) == key for h in self.elements)


class ClosureCapExceeded(RuntimeError):
    def __init__(self, cap):
        super().__init__(
            f"group closure exceeded the size cap {cap}; "
            "generator set is non-finite or mis-entered"
        )
        self.cap = cap


def generate_group(generators, mode="linear", cap=10000) -> MatrixGroup:
    """Breadth-first closure of the generators under multiplication.

    In projective mode elements are identified up to nonzero scalar; the
    stored representative is scaled so its first nonzero entry is 1.
    Element order is the breadth-first discovery order, which makes the
    numbering reproducible.
    """
    if mode not in ("linear", "projective"):
        raise ValueError("mode must be 'linear' or 'projective'")
    group = MatrixGroup(list(generators), mode)

    def keyed(g):
        return g.projective_key() if mode == "projective" else g.key()

    identity = GroupElement(
        [[ONE if i == j else ZERO for j in range(4)] for i in range(4)]
    )
    seen = {keyed(identity)}
    order = [identity]
    frontier = [identity]
    while frontier:
        new_frontier = []
        for h in frontier:
            for g in generators:
                prod = h * g
                k = keyed(prod)
                if k not in seen:
                    seen.add(k)
                    order.append(prod)
                    new_frontier.append(prod)
                    if len(order) > cap:
                        raise ClosureCapExceeded(cap)
        frontier = new_frontier
    group.elements = order
    return group


def act_on_poly(g: GroupElement, poly: MultiPoly) -> MultiPoly:
    """Substitution action: replace each variable by the matrix image of the
    coordinate vector, then canonically normalize (projective action)."""
    ctx = poly.context
    gens = ctx.gens()
    images = g.apply(gens[:4]) if len(ctx) == 4 else None
    if images is None:
        raise ValueError("polynomial action requires a 4-variable context")
    assignment = {name: img for name, img in zip(ctx.names, images)}
    moved = poly.substitute(assignment, target=ctx)
    return moved.normalized()


def orbit(generators, poly: MultiPoly):
    """Orbit of a homogeneous polynomial under the projectivized action,
    in deterministic first-appearance order."""
    if not poly.is_homogeneous():
        raise ValueError("orbit is defined for homogeneous polynomials")
    start = poly.normalized()
    seen = {start.key()}
    out = [start]
    frontier = [start]
    while frontier:
        new_frontier = []
        for f in frontier:
            for g in generators:
                img = act_on_poly(g, f)
                if img.key() not in seen:
                    seen.add(img.key())
                    out.append(img)
                    new_frontier.append(img)
        frontier = new_frontier
    return out


def center_of(group: MatrixGroup):
    """Elements commuting with every group element (brute force)."""
    return [
        g
        for g in group.elements
        if all((g * h).entries == (h * g).entries for h in group.elements)
    ]


def commutator_subgroup(group: MatrixGroup, cap=10000) -> MatrixGroup:
    """Subgroup generated by all commutators a b a^-1 b^-1 (brute force)."""
    comms = {}
    for a in group.elements:
        a_inv = a.inverse()
        for b in group.elements:
            c = a * b * a_inv * b.inverse()
            comms[c.key()] = c
    return generate_group(list(comms.values()), mode=group.mode, cap=cap)


# -- the concrete generators ------------------------------------------------

_ONE_HALF_PLUS = gq("1/2+1/2i")


def heisenberg_generators():
    """The four standard generators S1, S2, T1, T2 of H_{2,2}."""
    s1 = GroupElement([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])
    s2 = GroupElement([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    t1 = GroupElement([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]])
    t2 = GroupElement([[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]])
    return s1, s2, t1, t2


def quadric_cycle_matrix() -> GroupElement:
    """The extra generator ((1+i)/2) * [[-i,0,0,i],[0,1,1,0],[1,0,0,1],[0,-i,i,0]];
    it cycles each of the two families of fundamental quadrics with period 5."""
    base = GroupElement(
        [
            [-I, ZERO, ZERO, I],
            [ZERO, ONE, ONE, ZERO],
            [ONE, ZERO, ZERO, ONE],
            [ZERO, -I, I, ZERO],
        ]
    )
    return base.scale(_ONE_HALF_PLUS)


def extended_generators():
    """Heisenberg generators plus the quadric-cycling matrix."""
    return (*heisenberg_generators(), quadric_cycle_matrix())
