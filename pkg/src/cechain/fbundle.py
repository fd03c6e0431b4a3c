"""Bundles of quadrics of degree-d covers of a chain of projective lines.

For the cover attached to a chain of rational normal curves in P^(d-2) the
bundle of quadrics is read off from quadric spaces: its fiber over a node is
the space of quadrics through the d anchor points there, and its directrix
on a link is the space of quadrics containing that link.  Moving a subspace
across a link keeps quadrics containing the link and, for the rest, keeps
their residual intersection with the link.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field
from math import comb

from .chainbundle import GluedBundle, end_cohomology, first_nontransverse_node
from .errors import (
    CEChainError,
    DimensionMismatch,
    OutOfRange,
    PreconditionFailed,
)
from .exactmath import Matrix, Poly, Subspace, kernel_basis
from .exactmath.linalg import dot
from .flags import Filtration, SplittingType, flags_transverse, modify
from .projchain import (
    Chain,
    QuadricSpace,
    _piece_products,
    expected_ideal_quadrics,
    has_transverse_residues,
    is_quadric_generic,
    first_non_generic_range,
    ideal_quadrics,
    quadric_monomials,
    residue_windows,
    sample_chain,
)

# The direct cohomology route builds the glued bundle explicitly; its
# difference map has about k * rk(F)^2 rows, so it is only run for small rank.
DIRECT_ROUTE_MAX_RANK = 9


# -- closed forms ------------------------------------------------------------

def ce_rank(d, i):
    """Rank of the i-th syzygy bundle in the resolution of a degree-d cover."""
    if d < 3 or not 1 <= i <= d - 2:
        raise OutOfRange(f"need d >= 3 and 1 <= i <= d - 2, got d={d}, i={i}")
    if i == d - 2:
        # the last bundle is det E, a line bundle; the general formula gives 0 here
        return 1
    num = i * (d - 2 - i) * comb(d, i + 1)
    q, rem = divmod(num, d - 1)
    assert rem == 0
    return q


@dataclass(frozen=True)
class CEInvariants:
    d: int
    g: int
    rank_E: int
    deg_E: int
    rank_F: int
    deg_F: int
    syzygy_ranks: tuple


def f_invariants(d, g) -> CEInvariants:
    if d < 3:
        raise OutOfRange("degree must be at least 3")
    return CEInvariants(
        d=d,
        g=g,
        rank_E=d - 1,
        deg_E=g + d - 1,
        rank_F=d * (d - 3) // 2,
        deg_F=(d - 3) * (g + d - 1),
        syzygy_ranks=tuple(ce_rank(d, i) for i in range(1, d - 1)),
    )


def genus_decompose(g, d):
    """``(a, b)`` with ``a, b >= 0`` and ``g = (a - 1)(d - 1) + b d``."""
    if d < 3:
        raise OutOfRange("degree must be at least 3")
    if g < (d - 3) * (d - 1):
        raise OutOfRange(f"genus {g} is below (d-3)(d-1) = {(d - 3) * (d - 1)}")
    q, rem = divmod(g, d - 1)
    a, b = q - rem + 1, rem
    assert a >= 0 and (a - 1) * (d - 1) + b * d == g
    return a, b


def admissible_genus(d, genera, n=None):
    """Arithmetic genus of a cover glued from ``n`` covers of the given genera."""
    genera = list(genera)
    n = len(genera) if n is None else n
    if len(genera) != n:
        raise ValueError(f"expected {n} genera, got {len(genera)}")
    return 1 + sum(g - 1 for g in genera) + d * (n - 1)


def low_genus_splittings(d, genus):
    """Splitting types ``(E, F)`` of a general cover of genus 0 or 1.

    ``F`` is ``None`` for ``d = 3``, where the bundle of quadrics has rank 0.
    """
    if d < 3:
        raise OutOfRange("degree must be at least 3")
    if genus == 0:
        E = SplittingType([1] * (d - 1))
        F = [1] * (d - 3) + [2] * comb(d - 2, 2)
    elif genus == 1:
        E = SplittingType([1] * (d - 2) + [2])
        F = [2] * (d * (d - 3) // 2)
    else:
        raise OutOfRange("closed forms exist only for genus 0 and 1")
    return E, (SplittingType(F) if F else None)


# -- fibers and directrices ----------------------------------------------------

def _degree(c: Chain):
    return c.r + 2


def _evaluation_rows(c: Chain, points):
    """Rows indexed by quadric monomials, one column per point."""
    F = c.field
    rows = []
    for i, j in quadric_monomials(c.r):
        rows.append([F.mul(p[i], p[j]) for p in points])
    return rows


def f_node_fiber(c: Chain, j: int, check=True) -> QuadricSpace:
    """Quadrics through the ``d`` anchor points of node ``j`` (between links j and j + 1)."""
    if not 0 <= j < c.n - 1:
        raise IndexError(f"node {j} out of range")
    pts = [a.point for a in c.anchors[j]]
    M = Matrix._raw(c.field, _evaluation_rows(c, pts), len(pts))
    fiber = kernel_basis(M.T)
    d = _degree(c)
    if check and fiber.dim != d * (d - 3) // 2:
        raise DimensionMismatch(f"fiber at node {j} has dimension {fiber.dim}; anchors are not general")
    return fiber


def f_directrix(c: Chain, i: int, check=True) -> QuadricSpace:
    """Quadrics containing link ``i``."""
    W = ideal_quadrics(c, i, i + 1)
    d = _degree(c)
    if check and W.dim != comb(d - 2, 2):
        raise DimensionMismatch(f"directrix of link {i} has dimension {W.dim}")
    return W


class _LinkResidues:
    """Residual maps of one smooth link towards its left and right nodes."""

    def __init__(self, c: Chain, i: int):
        if not c.links[i].is_smooth:
            raise ValueError("the bundle of quadrics is modelled on smooth links only")
        F = c.field
        self.field = F
        self.r = c.r
        prods = _piece_products(c.links[i].pieces[0])
        self.columns = [[int(x) if F.p is not None else x for x in row] for row in prods]
        self.anchor_polys = {}
        if i > 0:
            self.anchor_polys["left"] = Poly.from_roots(F, c.anchor_params(i, "left"))
        if i < c.n - 1:
            self.anchor_polys["right"] = Poly.from_roots(F, c.anchor_params(i, "right"))

    def restrict(self, q):
        F = self.field
        width = len(self.columns[0])
        acc = [F.zero] * width
        for coef, row in zip(q, self.columns):
            if coef:
                for k in range(width):
                    acc[k] = F.add(acc[k], F.mul(coef, row[k]))
        return Poly._raw(F, acc)

    def residual(self, q, side):
        quot, rem = self.restrict(q).divmod(self.anchor_polys[side])
        if not rem.is_zero():
            raise DimensionMismatch("quadric does not vanish at the anchors")
        return quot.padded(self.r - 1)


def _preimage(fiber: Subspace, images, target: Subspace) -> Subspace:
    """Vectors of ``fiber`` whose image (given on the basis as ``images``) lies in ``target``."""
    F = fiber.field
    if target.is_full():
        return fiber
    perp = target.perp().vectors
    cond = [[dot(F, img, w) for w in perp] for img in images]
    # coefficient vectors x with x . cond = 0
    coeffs = kernel_basis(Matrix._raw(F, cond, len(perp)).T) if fiber.dim else Subspace.zero(F, 0)
    return coeffs.lift_from(fiber)


@dataclass
class FBundleModel:
    chain: Chain
    fibers: list
    directrices: list
    left: list = dc_field(default_factory=list)
    right: list = dc_field(default_factory=list)

    @property
    def d(self):
        return self.chain.r + 2

    @property
    def splitting(self):
        return low_genus_splittings(self.d, 0)[1]


def _transport(res: _LinkResidues, W: Subspace, source: Filtration, from_fiber: Subspace,
               to_fiber: Subspace, from_side: str, to_side: str) -> Filtration:
    """Move a flag of ``from_fiber`` containing ``W`` across the link to ``to_fiber``.

    Flags are given and returned in fiber coordinates.
    """
    F = from_fiber.field
    images_to = [res.residual(q, to_side) for q in to_fiber.vectors]
    steps = []
    for rel in source.steps:
        s = rel.lift_from(from_fiber)
        if s.issubset(W):
            steps.append(s.coordinates_in(to_fiber))
            continue
        if not W.issubset(s):
            raise DimensionMismatch("flag step neither contains nor lies in the directrix")
        residuals = Subspace.span(F, res.r - 1, [res.residual(q, from_side) for q in s.vectors])
        steps.append(_preimage(to_fiber, images_to, residuals).coordinates_in(to_fiber))
    return Filtration(F, to_fiber.dim, steps)


def build_model(c: Chain, check=True) -> FBundleModel:
    """Fibers, directrices and node flags; flags are in the coordinates of their node fiber."""
    if c.r < 2 or any(not link.is_smooth for link in c.links):
        raise ValueError("the model needs smooth links in P^r with r >= 2")
    fibers = [f_node_fiber(c, j, check) for j in range(c.n - 1)]
    W = [f_directrix(c, i, check) for i in range(c.n)]
    F = c.field
    model = FBundleModel(c, fibers, W)
    if c.n < 2:
        return model

    def directrix_flag(i, j):
        return Filtration(F, fibers[j].dim, [W[i].coordinates_in(fibers[j])])

    residues = [_LinkResidues(c, i) for i in range(c.n)]
    left = [directrix_flag(0, 0)]
    for j in range(1, c.n - 1):
        refined = modify(left[-1], W[j].coordinates_in(fibers[j - 1]))
        left.append(_transport(residues[j], W[j], refined, fibers[j - 1], fibers[j], "left", "right"))
    right = [None] * (c.n - 1)
    right[-1] = directrix_flag(c.n - 1, c.n - 2)
    for j in range(c.n - 3, -1, -1):
        refined = modify(right[j + 1], W[j + 1].coordinates_in(fibers[j + 1]))
        right[j] = _transport(residues[j + 1], W[j + 1], refined, fibers[j + 1], fibers[j], "right", "left")
    model.left = left
    model.right = right
    return model


def _check_preconditions(c: Chain):
    if not is_quadric_generic(c):
        raise PreconditionFailed("quadric_generic", f"subchain {first_non_generic_range(c)} has non-maximal rank")
    if c.r % 2 == 1 and not has_transverse_residues(c):
        raise PreconditionFailed("transverse_residues", "some window has non-transverse residues")


def f_left_flags(c: Chain):
    """Left flag at every node, as a filtration of the node fiber in its canonical coordinates."""
    _check_preconditions(c)
    return build_model(c).left


def f_right_flags(c: Chain):
    _check_preconditions(c)
    return build_model(c).right


# -- expected ladders ----------------------------------------------------------

def expected_left_dims(d, j):
    """Dimensions of the nonzero left-flag steps at node ``j`` (0-based) on a general chain.

    ``j + 1`` links lie to the left.  Steps are the quadrics containing the
    last ``l`` of them and, for odd ``d``, those spaces cut further by the
    residual condition on the link before.
    """
    links = j + 1
    c = d - 3
    dims = {d * c // 2}
    for l in range(1, links + 1):
        dim = c * (d - 2 * l) // 2
        if dim > 0:
            dims.add(dim)
    if d % 2 == 1:
        half = (d - 1) // 2
        for l in range(0, links - half):
            dim = (d - 2 * l - 1) * c // 2
            if dim > 0:
                dims.add(dim)
    return sorted(dims)


# -- the glued bundle of quadrics ---------------------------------------------

def _frames(c: Chain, model: FBundleModel, residues):
    """Splitting frames of every link at its left and right node.

    The directrix basis comes first (the degree-2 summands), then lifts of a
    fixed basis of residual polynomials.
    """
    F = c.field
    r = c.r
    frames = []
    for i in range(c.n):
        W = model.directrices[i]
        per_side = {}
        for side, j in (("left", i - 1), ("right", i)):
            if not 0 <= j < c.n - 1:
                continue
            fiber = model.fibers[j]
            images = [res_row for res_row in (residues[i].residual(q, side) for q in fiber.vectors)]
            lifts = []
            for k in range(r - 1):
                target = Subspace.coordinate(F, r - 1, [k])
                pre = _preimage(fiber, images, target)
                # pre = W + one line; pick a vector whose residual is exactly e_k
                vec = next(v for v in pre.vectors if not W.contains_vector(v))
                res = residues[i].residual(vec, side)
                lifts.append(tuple(F.div(x, res[k]) for x in vec))
            basis = list(W.vectors) + lifts
            per_side[side] = [fiber_coords(fiber, v) for v in basis]
        frames.append(per_side)
    return frames


def fiber_coords(fiber: Subspace, v):
    return tuple(v[p] for p in fiber.pivots)


def glued_bundle(c: Chain, model: FBundleModel | None = None) -> GluedBundle:
    """The bundle of quadrics as a :class:`GluedBundle` in splitting coordinates."""
    model = model or build_model(c)
    F = c.field
    residues = [_LinkResidues(c, i) for i in range(c.n)]
    frames = _frames(c, model, residues)
    split = model.splitting
    rk = split.rank
    gluings = []
    for i in range(c.n - 1):
        B_inf = Matrix._raw(F, frames[i]["right"], rk)
        B_zero = Matrix._raw(F, frames[i + 1]["left"], rk)
        # x B_inf = y B_zero  =>  y = x B_inf B_zero^-1
        gluings.append((B_inf @ B_zero.inverse()).T)
    return GluedBundle(F, [split] * c.n, gluings)


# -- certificate ----------------------------------------------------------------

@dataclass
class FCertificate:
    d: int
    a: int
    b: int
    genus: int
    seed: object
    quadric_generic: bool
    transverse_residues: bool
    flags_transverse_per_node: list
    ladder_ok: bool
    verdict_predicates: bool
    verdict_flags: bool
    verdict_direct: bool | None
    first_failure: object
    dims: dict
    seconds: float = 0.0
    notes: list = dc_field(default_factory=list)

    @property
    def routes_agree(self):
        verdicts = [self.verdict_predicates, self.verdict_flags]
        if self.verdict_direct is not None:
            verdicts.append(self.verdict_direct)
        return len(set(verdicts)) == 1

    @property
    def balanced(self):
        return self.routes_agree and self.verdict_flags

    def to_record(self):
        return {
            "d": self.d,
            "a": self.a,
            "b": self.b,
            "g": self.genus,
            "seed": self.seed,
            "quadric_generic": self.quadric_generic,
            "transverse_residues": self.transverse_residues,
            "flags_transverse_per_node": self.flags_transverse_per_node,
            "ladder_ok": self.ladder_ok,
            "verdict": self.balanced,
            "verdicts": {
                "predicates": self.verdict_predicates,
                "flags": self.verdict_flags,
                "direct_h1": self.verdict_direct,
            },
            "routes_agree": self.routes_agree,
            "first_failure": self.first_failure,
            "dims": self.dims,
            "notes": self.notes,
        }


def is_f_balanced(c: Chain, direct: bool | None = None, seed=None, b: int = 0):
    """Decide balancedness of the bundle of quadrics by independent routes.

    The predicate route asks for quadric-genericity and, for odd ``d``,
    transverse residues.  The flag route builds left and right flags from
    the quadric model and tests transversality node by node.  When
    ``direct`` is set (by default for small rank) the bundle is also glued
    explicitly and ``h^1(End)`` computed.  Returns ``(balanced, certificate)``.
    """
    start = time.perf_counter()
    d = _degree(c)
    a = c.n
    notes = []
    qg = is_quadric_generic(c)
    tr = has_transverse_residues(c)
    verdict_pred = qg and tr
    dims = {
        "fiber": d * (d - 3) // 2,
        "directrix": comb(d - 2, 2),
        "ideal_quadrics_by_length": [expected_ideal_quadrics(c.r, n) for n in range(1, a + 1)],
    }
    first_failure = None
    if not qg:
        first_failure = {"predicate": "quadric_generic", "range": first_non_generic_range(c)}
    elif not tr:
        bad = next(w for w in residue_windows(c) if not w.ok)
        first_failure = {"predicate": "transverse_residues", "window": bad.start}

    per_node = []
    ladder_ok = True
    model = None
    try:
        model = build_model(c, check=False)
        left, right = model.left, model.right
        per_node = [flags_transverse(lf, rf) for lf, rf in zip(left, right)]
        dims["left_flags"] = [list(f.dims[1:]) for f in left]
        dims["right_flags"] = [list(f.dims[1:]) for f in right]
        for j, f in enumerate(left):
            if list(f.dims[1:]) != expected_left_dims(d, j):
                ladder_ok = False
        for j, f in enumerate(right):
            if list(f.dims[1:]) != expected_left_dims(d, a - 2 - j):
                ladder_ok = False
        verdict_flags = all(per_node)
        if not verdict_flags and first_failure is None:
            first_failure = {"node": per_node.index(False)}
    except (CEChainError, ArithmeticError) as exc:
        notes.append(f"flag model undefined: {exc}")
        verdict_flags = False
        ladder_ok = False

    if direct is None:
        direct = dims["fiber"] <= DIRECT_ROUTE_MAX_RANK
    verdict_direct = None
    if direct and model is not None:
        try:
            bundle = glued_bundle(c, model)
            coh = end_cohomology(bundle)
            verdict_direct = coh.h1 == 0
            dims["h1_end"] = coh.h1
            node = first_nontransverse_node(bundle)
            if (node is None) != verdict_direct:
                notes.append("glued bundle criteria disagree with its own h1")
        except (CEChainError, ArithmeticError) as exc:
            notes.append(f"glued bundle undefined: {exc}")
            verdict_direct = False

    if b:
        notes.append(f"{b} elliptic components with perfectly balanced F of type {low_genus_splittings(d, 1)[1]}")
    cert = FCertificate(
        d=d,
        a=a,
        b=b,
        genus=(a - 1) * (d - 1) + b * d,
        seed=seed,
        quadric_generic=qg,
        transverse_residues=tr,
        flags_transverse_per_node=per_node,
        ladder_ok=ladder_ok,
        verdict_predicates=verdict_pred,
        verdict_flags=verdict_flags,
        verdict_direct=verdict_direct,
        first_failure=first_failure,
        dims=dims,
        notes=notes,
    )
    cert.seconds = time.perf_counter() - start
    return cert.balanced, cert


def certify(d, a, seed=0, field=None, direct=None, b=0):
    """Sample a chain of ``a`` links in P^(d-2) and certify its bundle of quadrics."""
    if d < 4:
        raise OutOfRange("the bundle of quadrics is nonzero only for d >= 4")
    if d - 2 < 3:
        from .projchain import _sample_chain
        from .exactmath import FieldSpec
        from .rng import ensure_rng

        chain = _sample_chain(field or FieldSpec.prime(), d - 2, a, ensure_rng(seed))
    else:
        chain = sample_chain(d - 2, a, seed, field)
    return is_f_balanced(chain, direct=direct, seed=seed, b=b)
