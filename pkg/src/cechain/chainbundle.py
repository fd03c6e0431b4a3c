"""Vector bundles on a chain of projective lines and their cohomology.

Components are numbered 0..k-1 and node ``i`` joins component ``i`` to
component ``i + 1``.  The gluing ``g_i`` identifies the fiber at infinity of
component ``i`` with the fiber at 0 of component ``i + 1``; node data is
always written in the coordinates of the latter.

Cohomology comes from the normalization sequence: global sections of each
component are compared at the nodes by a difference map, whose cokernel plus
the component-wise ``h^1`` is ``h^1`` of the glued bundle.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatch, SingularMatrix, SubspacesMeetProperly
from .exactmath import Matrix, Subspace, dual_intersect_flat, meets_properly
from .exactmath.linalg import rank_of_rows
from .flags import (
    SplittingType,
    flags_transverse,
    is_balanced_type,
    left_flags,
    right_flags,
)
from .rng import ensure_rng


class GluedBundle:
    """Splitting types per component plus invertible gluings at the nodes."""

    __slots__ = ("field", "components", "gluings", "gluing_inverses")

    def __init__(self, field, components, gluings=()):
        comps = tuple(c if isinstance(c, SplittingType) else SplittingType(c) for c in components)
        if not comps:
            raise ValueError("a chain has at least one component")
        r = comps[0].rank
        if any(c.rank != r for c in comps):
            raise DimensionMismatch("components have different ranks")
        glue = tuple(g if isinstance(g, Matrix) else Matrix(field, g) for g in gluings)
        if len(glue) != len(comps) - 1:
            raise DimensionMismatch(f"{len(comps)} components need {len(comps) - 1} gluings, got {len(glue)}")
        for i, g in enumerate(glue):
            if g.shape != (r, r):
                raise DimensionMismatch(f"gluing {i} has shape {g.shape}, expected {(r, r)}")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "gluings", glue)
        try:
            invs = tuple(g.inverse() for g in glue)
        except SingularMatrix as exc:
            raise SingularMatrix("gluing matrices must be invertible") from exc
        object.__setattr__(self, "gluing_inverses", invs)

    def __setattr__(self, name, value):
        raise AttributeError("GluedBundle is immutable")

    @property
    def k(self):
        return len(self.components)

    @property
    def rank(self):
        return self.components[0].rank

    @property
    def nodes(self):
        return len(self.gluings)

    def __eq__(self, other):
        return (isinstance(other, GluedBundle) and self.field == other.field
                and self.components == other.components and self.gluings == other.gluings)

    def __hash__(self):
        return hash((self.components, self.gluings))

    def __repr__(self):
        return f"GluedBundle({', '.join(map(str, self.components))})"

    @classmethod
    def random(cls, field, components, rng):
        """Random invertible gluings between the given components."""
        rng = ensure_rng(rng)
        comps = [c if isinstance(c, SplittingType) else SplittingType(c) for c in components]
        r = comps[0].rank
        glue = []
        for _ in range(len(comps) - 1):
            while True:
                g = Matrix.random(field, rng, r, r)
                if g.is_invertible():
                    glue.append(g)
                    break
        return cls(field, comps, glue)


# -- endomorphisms ---------------------------------------------------------

@dataclass(frozen=True)
class EndSection:
    """A section of End(V) on one component, by its values at 0 and infinity.

    Only monomial sections ``t^m E_st`` occur, so each value is either zero or
    the elementary matrix ``E_st``; ``at_zero``/``at_infinity`` record which.
    """

    s: int
    t: int
    m: int
    at_zero: bool
    at_infinity: bool


def h0_end_component(s: SplittingType) -> list:
    """Monomial basis of global sections of End(V) for one component.

    Entry ``(a, b)`` is a section of ``O(e_a - e_b)`` carrying ``t^m`` for
    ``0 <= m <= e_a - e_b``; its value at 0 is the constant coefficient and
    at infinity the top one.
    """
    e = s.exponents
    out = []
    for a in range(s.rank):
        for b in range(s.rank):
            top = e[a] - e[b]
            for m in range(top + 1):
                out.append(EndSection(a, b, m, m == 0, m == top))
    return out


def h1_end_component(s: SplittingType) -> int:
    e = s.exponents
    return sum(max(0, e[b] - e[a] - 1) for a in range(s.rank) for b in range(s.rank))


def _difference_rows(b: GluedBundle):
    F = b.field
    r = b.rank
    width = r * r
    ncols = b.nodes * width
    zero = F.zero
    rows = []
    for i, comp in enumerate(b.components):
        has_right = i < b.nodes
        if has_right:
            g, ginv = b.gluings[i].rows, b.gluing_inverses[i].rows
        for sec in h0_end_component(comp):
            row = [zero] * ncols
            if has_right and sec.at_infinity:
                # g E_st g^-1 = (column s of g) (row t of g^-1)
                base = i * width
                col = [g[x][sec.s] for x in range(r)]
                inv_row = ginv[sec.t]
                for x in range(r):
                    cx = col[x]
                    if cx:
                        for y in range(r):
                            row[base + x * r + y] = F.mul(cx, inv_row[y])
            if i > 0 and sec.at_zero:
                idx = (i - 1) * width + sec.s * r + sec.t
                row[idx] = F.sub(row[idx], F.one)
            rows.append(row)
    return rows, ncols


def difference_map(b: GluedBundle) -> Matrix:
    """Rows are section basis elements, columns the node matrix entries (row-major per node)."""
    rows, ncols = _difference_rows(b)
    return Matrix._raw(b.field, rows, ncols)


@dataclass(frozen=True)
class EndCohomology:
    h0: int
    h1: int
    rank_difference_map: int
    sum_h0_components: int
    sum_h1_components: int
    node_dims: int


def end_cohomology(b: GluedBundle) -> EndCohomology:
    rows, ncols = _difference_rows(b)
    rk = rank_of_rows(b.field, rows, ncols) if rows and ncols else 0
    sum_h0 = len(rows)
    sum_h1 = sum(h1_end_component(c) for c in b.components)
    return EndCohomology(
        h0=sum_h0 - rk,
        h1=ncols - rk + sum_h1,
        rank_difference_map=rk,
        sum_h0_components=sum_h0,
        sum_h1_components=sum_h1,
        node_dims=ncols,
    )


def h1_end(b: GluedBundle) -> int:
    return end_cohomology(b).h1


def h0_end(b: GluedBundle) -> int:
    return end_cohomology(b).h0


def is_balanced_direct(b: GluedBundle) -> bool:
    return h1_end(b) == 0


def node_flags(b: GluedBundle):
    """``(left, right)`` flag pairs per node; requires balanced components."""
    return list(zip(left_flags(b), right_flags(b)))


def first_nontransverse_node(b: GluedBundle):
    """Index of the first node whose flags fail to be transverse, or ``None``."""
    for j, (left, right) in enumerate(node_flags(b)):
        if not flags_transverse(left, right):
            return j
    return None


def is_balanced_criteria(b: GluedBundle) -> bool:
    if not all(is_balanced_type(c) for c in b.components):
        return False
    return first_nontransverse_node(b) is None


# -- separation and deformations -------------------------------------------

def separating_endomorphism(A: Subspace, B: Subspace, rng=None, tries=8) -> Matrix:
    """An endomorphism ``M`` for which ``A[eps] & (I + eps M) B[eps]`` is not flat.

    Take ``v`` in ``A & B`` and ``w`` outside ``A + B``; the rank-one map
    sending ``v`` to ``w`` (and killing a complement of ``v``) works because
    flatness amounts to ``M(A & B)`` lying in ``A + B``.
    """
    if meets_properly(A, B):
        raise SubspacesMeetProperly("subspaces meet properly; nothing to separate")
    F = A.field
    n = A.ambient_dim
    common = A & B
    v_pivot = common.pivots[0]
    w = (A + B).complement_vectors()[-1]
    rows = [[F.zero] * n for _ in range(n)]
    for x in range(n):
        rows[x][v_pivot] = w[x]
    M = Matrix._raw(F, rows, n)
    if not dual_intersect_flat(A, B, M)[1]:
        return M
    rng = ensure_rng(rng)
    for _ in range(tries):
        M = Matrix.random(F, rng, n, n)
        if not dual_intersect_flat(A, B, M)[1]:
            return M
    raise ArithmeticError("no separating endomorphism found")


def _node_vector(b: GluedBundle, node: int, M: Matrix):
    r = b.rank
    if not 0 <= node < b.nodes:
        raise IndexError(f"node {node} out of range for {b.nodes} nodes")
    if M.shape != (r, r):
        raise DimensionMismatch("node endomorphism has the wrong size")
    vec = [b.field.zero] * (b.nodes * r * r)
    vec[node * r * r:(node + 1) * r * r] = M.flat()
    return vec


def deformation_is_nontrivial(b: GluedBundle, node: int, M: Matrix) -> bool:
    """True when changing the gluing at ``node`` to first order by ``M`` is not a coboundary."""
    vec = _node_vector(b, node, M)
    rows, ncols = _difference_rows(b)
    base = rank_of_rows(b.field, rows, ncols) if rows else 0
    return rank_of_rows(b.field, rows + [vec], ncols) > base


# -- sections of the bundle itself -----------------------------------------

@dataclass(frozen=True)
class BundleCohomology:
    h0: int
    h1: int
    rank_difference_map: int


def bundle_cohomology(b: GluedBundle) -> BundleCohomology:
    F = b.field
    r = b.rank
    ncols = b.nodes * r
    rows = []
    for i, comp in enumerate(b.components):
        for slot, e in enumerate(comp.exponents):
            for m in range(e + 1):
                row = [F.zero] * ncols
                if i < b.nodes and m == e:
                    for x in range(r):
                        row[i * r + x] = b.gluings[i][x, slot]
                if i > 0 and m == 0:
                    idx = (i - 1) * r + slot
                    row[idx] = F.sub(row[idx], F.one)
                rows.append(row)
    rk = rank_of_rows(F, rows, ncols) if rows and ncols else 0
    sum_h1 = sum(max(0, -e - 1) for c in b.components for e in c.exponents)
    return BundleCohomology(h0=len(rows) - rk, h1=ncols - rk + sum_h1, rank_difference_map=rk)


def h0_bundle(b: GluedBundle) -> int:
    return bundle_cohomology(b).h0


def h1_bundle(b: GluedBundle) -> int:
    return bundle_cohomology(b).h1
