"""Rational normal curves, maximally connected chains and their quadrics.

A chain in P^r is a sequence of links; consecutive links share r + 2 anchor
points.  Links are either one rational normal curve or, in the hyperplane
construction, a line glued to a degree r - 1 curve in a hyperplane.  Every
piece is a polynomial map from the affine parameter line, so restricting a
quadric to a piece is polynomial multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from math import comb

import numpy as np

from .errors import (
    DegeneratePosition,
    DimensionMismatch,
    QuadricContainsLink,
    SingularMatrix,
)
from .exactmath import FieldSpec, Matrix, Poly, Subspace, exact_divide, kernel_basis
from .exactmath import _kernels
from .exactmath.linalg import _rref_rows_python, dot
from .rng import ensure_rng

DEFAULT_TRIES = 8

QuadricSpace = Subspace
"""Subspace of quadric coefficient vectors, monomials ``x_i x_j`` (i <= j) in lexicographic order."""


def n_quadrics(r):
    return comb(r + 2, 2)


def quadric_monomials(r):
    return [(i, j) for i in range(r + 1) for j in range(i, r + 1)]


def expected_ideal_quadrics(r, n):
    """Quadrics through a general chain of ``n`` links in P^r."""
    return max(0, (r - 1) * (r + 2 - 2 * n) // 2)


def expected_restriction_rank(r, n):
    return min(n_quadrics(r), 2 * n * r - (n - 1) * (r + 1) + 1)


def mc_dimension(r, n):
    """Dimension of the space of maximally connected chains of ``n`` links in P^r."""
    if r < 3 or n < 1:
        raise ValueError("need r >= 3 and n >= 1")
    return (r - 1) * (r + 3) + (n - 1) * (2 * r + 1)


# -- pieces, links, chains ---------------------------------------------------

@dataclass(frozen=True)
class ParamPiece:
    """Polynomial map ``t -> (x_0(t) : ... : x_r(t))``; row ``i`` holds ``x_i``."""

    field: FieldSpec
    coeffs: Matrix

    @property
    def r(self):
        return self.coeffs.nrows - 1

    @property
    def degree(self):
        return self.coeffs.ncols - 1

    def polys(self):
        return [Poly._raw(self.field, row) for row in self.coeffs.rows]

    def __call__(self, t):
        F = self.field
        t = F(t)
        out = []
        for row in self.coeffs.rows:
            acc = F.zero
            for c in reversed(row):
                acc = F.add(F.mul(acc, t), c)
            out.append(acc)
        return tuple(out)

    def transformed(self, g: Matrix) -> "ParamPiece":
        """Image under the projective transformation ``g``."""
        return ParamPiece(self.field, g @ self.coeffs)


@dataclass(frozen=True)
class Link:
    """One or two pieces; ``nodes`` lists ``(piece_a, t_a, piece_b, t_b)`` internal nodes."""

    pieces: tuple
    nodes: tuple = ()

    @property
    def degree(self):
        return sum(p.degree for p in self.pieces)

    @property
    def is_smooth(self):
        return len(self.pieces) == 1


@dataclass(frozen=True)
class Anchor:
    """A point shared by links ``i`` and ``i + 1``."""

    left_piece: int
    left_param: object
    right_piece: int
    right_param: object
    point: tuple


@dataclass(frozen=True)
class Chain:
    field: FieldSpec
    r: int
    links: tuple
    anchors: tuple

    def __post_init__(self):
        if len(self.anchors) != max(0, len(self.links) - 1):
            raise DimensionMismatch("need one anchor set per pair of consecutive links")
        if any(len(a) != self.r + 2 for a in self.anchors):
            raise DimensionMismatch("consecutive links share exactly r + 2 anchors")

    @property
    def n(self):
        return len(self.links)

    def subchain(self, start, stop):
        return Chain(self.field, self.r, self.links[start:stop], self.anchors[start:max(start, stop - 1)])

    def anchor_params(self, link, side):
        """Parameters on the smooth ``link`` of the anchors it shares with its ``side`` neighbour."""
        if side == "left":
            if link == 0:
                raise IndexError("the first link has no left neighbour")
            return [a.right_param for a in self.anchors[link - 1]]
        if side == "right":
            if link >= self.n - 1:
                raise IndexError("the last link has no right neighbour")
            return [a.left_param for a in self.anchors[link]]
        raise ValueError("side must be 'left' or 'right'")


def projectively_equal(F, u, v):
    """True when the nonzero vectors ``u`` and ``v`` span the same line."""
    u, v = list(u), list(v)
    if not any(u) or not any(v):
        return False
    i = next(i for i, x in enumerate(u) if x)
    if not v[i]:
        return False
    return all(F.mul(v[i], a) == F.mul(u[i], b) for a, b in zip(u, v))


def anchors_consistent(c: Chain) -> bool:
    """Every anchor evaluates to its stored point on both adjacent links."""
    F = c.field
    for i, group in enumerate(c.anchors):
        for a in group:
            left = c.links[i].pieces[a.left_piece](a.left_param)
            right = c.links[i + 1].pieces[a.right_piece](a.right_param)
            if not (projectively_equal(F, left, a.point) and projectively_equal(F, right, a.point)):
                return False
    return True


def spot_check_intersections(c: Chain, rng, samples=16) -> bool:
    """Random non-anchor parameter pairs on consecutive links give distinct points."""
    rng = ensure_rng(rng)
    F = c.field
    for i in range(c.n - 1):
        for _ in range(samples):
            left = c.links[i].pieces[int(rng.integers(len(c.links[i].pieces)))]
            right = c.links[i + 1].pieces[int(rng.integers(len(c.links[i + 1].pieces)))]
            if projectively_equal(F, left(F.random(rng)), right(F.random(rng))):
                return False
    return True


# -- rational normal curves --------------------------------------------------

def _linear_product(F, factors):
    """Coefficients of prod (alpha u + beta) over ``factors = [(alpha, beta), ...]``."""
    out = [F.one]
    for alpha, beta in factors:
        nxt = [F.zero] * (len(out) + 1)
        for k, c in enumerate(out):
            nxt[k] = F.add(nxt[k], F.mul(c, beta))
            nxt[k + 1] = F.add(nxt[k + 1], F.mul(c, alpha))
        out = nxt
    return out


def fit_rnc(points, field: FieldSpec):
    """Degree-r curve through ``r + 3`` points of P^r, with the parameter of each point.

    After the coordinate change taking the first ``r + 1`` points to the
    coordinate points and the next to ``(1 : ... : 1)``, the curve is
    ``x_i = 1 / (tau - a_i)`` with ``a_i = -1 / q_i`` read off the last point
    ``q``.  The Möbius substitution ``tau = c u / (u - 1)`` keeps every
    parameter finite.
    """
    F = field
    pts = [tuple(F(x) for x in p) for p in points]
    m = len(pts[0])
    r = m - 1
    if len(pts) != r + 3 or any(len(p) != m for p in pts):
        raise DimensionMismatch(f"need r + 3 = {r + 3} points in P^{r}")
    A = Matrix.from_columns(F, pts[:m])
    try:
        A_inv = A.inverse()
    except SingularMatrix as exc:
        raise DegeneratePosition("first r + 1 points are dependent") from exc
    lam = A_inv @ pts[m]
    if not all(lam):
        raise DegeneratePosition("point r + 2 lies on a coordinate hyperplane of the frame")
    lam_inv = [F.inv(x) for x in lam]
    q = tuple(F.mul(li, x) for li, x in zip(lam_inv, A_inv @ pts[m + 1]))
    if not all(q):
        raise DegeneratePosition("last point lies on a coordinate hyperplane of the frame")
    a = [F.neg(F.inv(x)) for x in q]
    if len(set(a)) != len(a):
        raise DegeneratePosition("points do not determine distinct poles")
    used = set(a)
    c = next(F(k) for k in range(1, len(a) + 2) if F(k) not in used)
    columns = []
    for i in range(m):
        factors = [(F.sub(c, a[j]), a[j]) for j in range(m) if j != i]
        columns.append(_linear_product(F, factors))
    X = Matrix._raw(F, columns, m)
    # back to the original coordinates: A diag(lam) X
    scaled = Matrix._raw(F, [[F.mul(row[j], lam[j]) for j in range(m)] for row in A.rows], m)
    piece = ParamPiece(F, scaled @ X)
    params = [F.div(a[i], F.sub(a[i], c)) for i in range(m)] + [F.one, F.zero]
    return piece, params


def rnc_through(points, field: FieldSpec) -> ParamPiece:
    return fit_rnc(points, field)[0]


def moment_curve(field: FieldSpec, r) -> ParamPiece:
    return ParamPiece(field, Matrix.identity(field, r + 1))


def _random_invertible(F, rng, n):
    while True:
        g = Matrix.random(F, rng, n, n)
        if g.is_invertible():
            return g


def _distinct_params(F, rng, count, avoid=()):
    seen = set(avoid)
    out = []
    while len(out) < count:
        t = F.random(rng)
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def _smooth_link(piece):
    return Link((piece,))


def _next_link(F, rng, piece, r, avoid, tries):
    """Random RNC meeting ``piece`` in ``r + 2`` random points; returns (piece, anchors)."""
    for _ in range(tries):
        left_params = _distinct_params(F, rng, r + 2, avoid)
        pts = [piece(t) for t in left_params]
        extra = tuple(F.random_vector(rng, r + 1))
        try:
            new, params = fit_rnc(pts + [extra], F)
        except DegeneratePosition:
            continue
        anchors = tuple(Anchor(0, lt, 0, rt, p) for lt, rt, p in zip(left_params, params, pts))
        return new, anchors
    raise DegeneratePosition(f"no general position found in {tries} tries")


def _sample_chain(F, r, n, rng, tries=DEFAULT_TRIES):
    current = moment_curve(F, r).transformed(_random_invertible(F, rng, r + 1))
    links = [_smooth_link(current)]
    anchors = []
    used = []
    for _ in range(n - 1):
        current, group = _next_link(F, rng, current, r, used, tries)
        links.append(_smooth_link(current))
        anchors.append(group)
        used = [a.right_param for a in group]
    return Chain(F, r, tuple(links), tuple(anchors))


def sample_chain(r, n, seed=0, field: FieldSpec | None = None, tries=DEFAULT_TRIES) -> Chain:
    """Random maximally connected chain of ``n`` smooth links in P^r."""
    if r < 3 or n < 1:
        raise ValueError("need r >= 3 and n >= 1")
    F = field or FieldSpec.prime()
    return _sample_chain(F, r, n, ensure_rng(seed), tries)


# -- the hyperplane construction --------------------------------------------

def _line_through(F, A, B):
    """Line ``u -> A + u (B - A)``."""
    rows = [[a, F.sub(b, a)] for a, b in zip(A, B)]
    return ParamPiece(F, Matrix._raw(F, rows, 2))


@dataclass(frozen=True)
class LarsonParts:
    chain: Chain
    hyperplane_chain: Chain
    hyperplane_basis: Matrix
    lines: tuple = dc_field(default=())


def larson_construction(r, n, seed=0, field: FieldSpec | None = None, tries=DEFAULT_TRIES) -> LarsonParts:
    """Chain ``R_0, L_1 + Rbar_1, ..., L_{n-1} + Rbar_{n-1}`` built around a hyperplane H.

    ``R_0`` is a rational normal curve, ``L_1`` a secant line of it, the
    ``Rbar_i`` a maximally connected chain inside H whose first curve passes
    through ``R_0 & H`` and ``L_1 & H``, and each ``L_i`` joins ``L_{i-1}``
    to ``Rbar_i``.
    """
    if r < 3 or n < 2:
        raise ValueError("need r >= 3 and n >= 2")
    F = field or FieldSpec.prime()
    rng = ensure_rng(seed)
    for _ in range(tries):
        try:
            return _larson_once(F, r, n, rng, tries)
        except DegeneratePosition:
            continue
    raise DegeneratePosition(f"hyperplane construction failed {tries} times")


def _larson_once(F, r, n, rng, tries):
    R0 = moment_curve(F, r).transformed(_random_invertible(F, rng, r + 1))
    # H is spanned by r points of R0, so R0 & H is known exactly
    h_params = _distinct_params(F, rng, r)
    h_points = [R0(t) for t in h_params]
    normal = kernel_basis(Matrix._raw(F, h_points, r + 1))
    if normal.dim != 1:
        raise DegeneratePosition("points of R0 do not span a hyperplane")
    h = normal.vectors[0]
    H = kernel_basis(Matrix._raw(F, [h], r + 1))
    basis = H.basis  # r x (r+1), RREF
    sec_params = _distinct_params(F, rng, 2, h_params)
    P1, P2 = R0(sec_params[0]), R0(sec_params[1])
    L1 = _line_through(F, P1, P2)
    denom = dot(F, h, [F.sub(b, a) for a, b in zip(P1, P2)])
    if not denom or not dot(F, h, P2):
        raise DegeneratePosition("secant line meets H badly")
    u_p = F.neg(F.div(dot(F, h, P1), denom))
    p = L1(u_p)

    def to_h(point):
        return tuple(point[c] for c in H.pivots)

    lift = basis.T  # (r+1) x r, maps H coordinates to ambient points

    # Rbar_1 through R0 & H, p and one extra point of H
    extra = tuple(F.random_vector(rng, r))
    bar1, bar_params = fit_rnc([to_h(x) for x in h_points] + [to_h(p), extra], F)
    bars = [bar1]
    bar_anchors = []
    used = bar_params[:r + 1]
    for _ in range(n - 2):
        nxt, group = _next_link(F, rng, bars[-1], r - 1, used, tries)
        bars.append(nxt)
        bar_anchors.append(group)
        used = [a.right_param for a in group]
    hyper_chain = Chain(F, r - 1, tuple(_smooth_link(b) for b in bars), tuple(bar_anchors))
    lifted = [b.transformed(lift) for b in bars]

    # lines: L_1 meets Rbar_1 at p; L_i joins a point of L_{i-1} to a point of Rbar_i
    lines = [L1]
    line_nodes = [(u_p, bar_params[r])]
    joins = []
    for i in range(1, n - 1):
        u_prev = F.random_nonzero(rng)
        t_bar = F.random(rng)
        A = lines[-1](u_prev)
        B = lifted[i](t_bar)
        if projectively_equal(F, A, B):
            raise DegeneratePosition("joining line collapses")
        lines.append(_line_through(F, A, B))
        line_nodes.append((F.one, t_bar))
        joins.append(u_prev)

    links = [_smooth_link(R0)]
    for i in range(n - 1):
        u, t = line_nodes[i]
        links.append(Link((lines[i], lifted[i]), ((0, u, 1, t),)))

    anchors = []
    # R0 & R1: R0 & H on Rbar_1 and the two secant points on L_1
    first = [Anchor(0, s, 1, bar_params[k], R0(s)) for k, s in enumerate(h_params)]
    first += [Anchor(0, sec_params[0], 0, F.zero, P1), Anchor(0, sec_params[1], 0, F.one, P2)]
    anchors.append(tuple(first))
    for i in range(1, n - 1):
        group = [Anchor(1, a.left_param, 1, a.right_param, lifted[i - 1](a.left_param))
                 for a in bar_anchors[i - 1]]
        group.append(Anchor(0, joins[i - 1], 0, F.zero, lines[i - 1](joins[i - 1])))
        anchors.append(tuple(group))
    chain = Chain(F, r, tuple(links), tuple(anchors))
    return LarsonParts(chain, hyper_chain, basis, tuple(lines))


def larson_chain(r, n, seed=0, field: FieldSpec | None = None, tries=DEFAULT_TRIES) -> Chain:
    return larson_construction(r, n, seed, field, tries).chain


# -- special chains used as counterexamples ----------------------------------

def repeated_link_chain(r, n, seed=0, field: FieldSpec | None = None, at=0) -> Chain:
    """A chain whose links ``at`` and ``at + 1`` coincide; never quadric-generic."""
    if n < 2 or not 0 <= at < n - 1:
        raise ValueError("need two consecutive links to repeat")
    F = field or FieldSpec.prime()
    rng = ensure_rng(seed)
    base = _sample_chain(F, r, n - 1, rng)
    links = list(base.links)
    anchors = list(base.anchors)
    piece = links[at].pieces[0]
    params = _distinct_params(F, rng, r + 2)
    links.insert(at + 1, links[at])
    anchors.insert(at, tuple(Anchor(0, t, 0, t, piece(t)) for t in params))
    return Chain(F, r, tuple(links), tuple(anchors))


def mirror_chain(r, seed=0, field: FieldSpec | None = None) -> Chain:
    """Length ``r + 2`` chain with link ``h + j`` equal to link ``h - j``, ``h = (r + 1) / 2``.

    The two halves around the middle link then have identical residuals on
    it, so the residue condition fails.
    """
    if r % 2 == 0:
        raise ValueError("mirror chains are only interesting for odd r")
    F = field or FieldSpec.prime()
    h = (r + 1) // 2
    base = _sample_chain(F, r, h + 1, ensure_rng(seed))
    links = list(base.links)
    anchors = list(base.anchors)
    for j in range(1, h + 1):
        links.append(base.links[h - j])
        src = base.anchors[h - j]
        anchors.append(tuple(Anchor(a.right_piece, a.right_param, a.left_piece, a.left_param, a.point)
                             for a in src))
    return Chain(F, r, tuple(links), tuple(anchors))


# -- quadrics ----------------------------------------------------------------

def _piece_products(piece: ParamPiece):
    """Rows: pulled-back monomials x_i x_j as coefficient lists of length 2e + 1."""
    F = piece.field
    if _kernels.supports(F.p):
        arr = np.array(piece.coeffs.rows, dtype=np.int64)
        return _kernels.poly_products(arr, F.p)
    rows = piece.coeffs.rows
    e = piece.degree
    out = []
    for i in range(len(rows)):
        for j in range(i, len(rows)):
            acc = [F.zero] * (2 * e + 1)
            for u, cu in enumerate(rows[i]):
                if cu:
                    for v, cv in enumerate(rows[j]):
                        acc[u + v] += cu * cv
            out.append([F(x) for x in acc] if F.p is not None else acc)
    return out


def _restriction_block(c: Chain, start, stop):
    blocks = [_piece_products(p) for link in c.links[start:stop] for p in link.pieces]
    if _kernels.supports(c.field.p):
        return np.hstack(blocks) if blocks else np.zeros((n_quadrics(c.r), 0), dtype=np.int64)
    return [sum((list(b[i]) for b in blocks), []) for i in range(n_quadrics(c.r))]


def _range(c: Chain, start, stop):
    stop = c.n if stop is None else stop
    if not 0 <= start < stop <= c.n:
        raise IndexError(f"link range [{start}, {stop}) invalid for {c.n} links")
    return start, stop


def quadric_restriction_matrix(c: Chain, start=0, stop=None) -> Matrix:
    """Quadric monomials (rows) restricted to every piece of links ``start..stop-1``."""
    start, stop = _range(c, start, stop)
    block = _restriction_block(c, start, stop)
    rows = block.tolist() if isinstance(block, np.ndarray) else block
    ncols = len(rows[0]) if rows else 0
    return Matrix._raw(c.field, rows, ncols)


def restriction_rank(c: Chain, start=0, stop=None) -> int:
    start, stop = _range(c, start, stop)
    block = _restriction_block(c, start, stop)
    F = c.field
    if isinstance(block, np.ndarray):
        if block.shape[1] == 0:
            return 0
        rk, _ = _kernels.rref_inplace(np.ascontiguousarray(block), F.p, True)
        return int(rk)
    return len(_rref_rows_python(F, block, len(block[0]), rank_only=True)[1])


def h0_ideal_quadrics(c: Chain, start=0, stop=None) -> int:
    return n_quadrics(c.r) - restriction_rank(c, start, stop)


def ideal_quadrics(c: Chain, start=0, stop=None) -> QuadricSpace:
    """Quadrics containing links ``start..stop-1``."""
    m = quadric_restriction_matrix(c, start, stop)
    return kernel_basis(m.T)


def is_quadric_generic(c: Chain) -> bool:
    return first_non_generic_range(c) is None


def first_non_generic_range(c: Chain):
    """First ``(start, stop)`` whose restriction rank is not maximal, or ``None``."""
    for length in range(1, c.n + 1):
        expected = expected_restriction_rank(c.r, length)
        for start in range(c.n - length + 1):
            if restriction_rank(c, start, start + length) != expected:
                return (start, start + length)
    return None


def pullback(q, c: Chain, link: int, piece: int = 0) -> Poly:
    """The quadric ``q`` restricted to one piece, as a polynomial in its parameter."""
    F = c.field
    prods = _piece_products(c.links[link].pieces[piece])
    q = [F(x) for x in q]
    cols = len(prods[0])
    coeffs = [dot(F, q, [int(row[j]) if F.p else row[j] for row in prods]) for j in range(cols)]
    return Poly._raw(F, coeffs)


def residual_divisor(q, c: Chain, link: int, side: str) -> Poly:
    """Residual of ``q`` on a smooth link after removing the anchors on ``side``."""
    if not c.links[link].is_smooth:
        raise ValueError("residuals are defined on smooth links only")
    f = pullback(q, c, link)
    if f.is_zero():
        raise QuadricContainsLink(f"quadric contains link {link}")
    anchor_poly = Poly.from_roots(c.field, c.anchor_params(link, side))
    return exact_divide(f, anchor_poly)


def residual_space(c: Chain, quadrics: QuadricSpace, link: int, side: str) -> Subspace:
    """Span of the residuals of ``quadrics`` in the space of polynomials of degree <= r - 2."""
    F = c.field
    r = c.r
    rows = [residual_divisor(q, c, link, side).padded(r - 1) for q in quadrics.vectors]
    space = Subspace.span(F, r - 1, rows)
    if space.dim != quadrics.dim:
        # a combination of the quadrics contains the link
        raise QuadricContainsLink(f"a quadric in the span contains link {link}")
    return space


@dataclass(frozen=True)
class ResidueWindow:
    start: int
    middle: int
    dim_left: int
    dim_right: int
    dim_intersection: int | None
    failure: str | None = None

    @property
    def ok(self):
        return self.failure is None and self.dim_intersection == 0


def residue_windows(c: Chain):
    """Residue data for every window of ``r + 2`` links (odd ``r`` only)."""
    r = c.r
    h = (r + 1) // 2
    out = []
    for w in range(c.n - (r + 2) + 1):
        mid = w + h
        VL = ideal_quadrics(c, w, mid)
        VR = ideal_quadrics(c, mid + 1, w + r + 2)
        try:
            PL = residual_space(c, VL, mid, "left")
            PR = residual_space(c, VR, mid, "right")
        except QuadricContainsLink as exc:
            out.append(ResidueWindow(w, mid, VL.dim, VR.dim, None, str(exc)))
            continue
        out.append(ResidueWindow(w, mid, VL.dim, VR.dim, (PL & PR).dim))
    return out


def has_transverse_residues(c: Chain) -> bool:
    if c.r % 2 == 0:
        return True
    expected = (c.r - 1) // 2
    for win in residue_windows(c):
        if not win.ok or win.dim_left != expected or win.dim_right != expected:
            return False
    return True

