"""Filtrations of fibers, directrix flags, modification and node flags.

Fibers are written in splitting coordinates, slots ordered by descending
degree.  In those coordinates the directrix of a balanced bundle is a
coordinate subspace and moving a flag from the fiber at 0 to the fiber at
infinity of one component changes nothing, so all the geometry of a chain
sits in its gluing matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import (
    ComponentNotBalanced,
    DimensionMismatch,
    FlagDoesNotContainDirectrix,
    NotBalanced,
    NotTransverse,
)
from .exactmath import FieldSpec, Matrix, Subspace, meets_properly
from .exactmath.linalg import dot
from .rng import ensure_rng

DEFAULT_TRIES = 8


@dataclass(frozen=True)
class SplittingType:
    """Degrees of the line-bundle summands, kept sorted in descending order."""

    exponents: tuple

    def __init__(self, exponents):
        exps = tuple(sorted((int(e) for e in exponents), reverse=True))
        if not exps:
            raise ValueError("a splitting type needs at least one summand")
        object.__setattr__(self, "exponents", exps)

    @property
    def rank(self):
        return len(self.exponents)

    @property
    def degree(self):
        return sum(self.exponents)

    def __str__(self):
        return "{" + ",".join(map(str, self.exponents)) + "}"


def is_balanced_type(s: SplittingType) -> bool:
    return s.exponents[0] - s.exponents[-1] <= 1


def is_perfectly_balanced(s: SplittingType) -> bool:
    return s.exponents[0] == s.exponents[-1]


class Filtration:
    """An increasing chain ``0 = F^0 < F^1 < ... < F^m = k^n``.

    Missing endpoints are added and repeated steps dropped on construction, so
    two filtrations are equal when they describe the same set of subspaces.
    """

    __slots__ = ("field", "ambient_dim", "steps")

    def __init__(self, field: FieldSpec, ambient_dim: int, steps=()):
        chain = [Subspace.zero(field, ambient_dim)]
        for s in steps:
            if s.ambient_dim != ambient_dim:
                raise DimensionMismatch("filtration step lives in the wrong ambient space")
            if s == chain[-1]:
                continue
            if not chain[-1].issubset(s):
                raise ValueError("filtration steps are not nested")
            chain.append(s)
        if not chain[-1].is_full():
            chain.append(Subspace.full(field, ambient_dim))
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "steps", tuple(chain))

    def __setattr__(self, name, value):
        raise AttributeError("Filtration is immutable")

    @classmethod
    def trivial(cls, field, n):
        return cls(field, n)

    @classmethod
    def coordinate(cls, field, n, order=None):
        """Complete flag spanned by standard vectors taken in ``order``."""
        order = list(range(n)) if order is None else list(order)
        return cls(field, n, [Subspace.coordinate(field, n, order[:i]) for i in range(1, n + 1)])

    @property
    def dims(self):
        return tuple(s.dim for s in self.steps)

    @property
    def length(self):
        """Number of proper inclusions."""
        return len(self.steps) - 1

    def is_complete(self):
        return self.length == self.ambient_dim

    def contains_step(self, space: Subspace):
        return space in self.steps

    def image(self, g: Matrix) -> "Filtration":
        """Push every step forward by the invertible matrix ``g``."""
        return Filtration(self.field, self.ambient_dim, [s.image(g) for s in self.steps])

    def coordinates_in(self, parent: Subspace) -> "Filtration":
        """Rewrite a filtration of ``parent`` (a subspace) in its own coordinates."""
        return Filtration(self.field, parent.dim, [s.coordinates_in(parent) for s in self.steps])

    def __eq__(self, other):
        if not isinstance(other, Filtration):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.steps == other.steps

    def __hash__(self):
        return hash(self.steps)

    def __repr__(self):
        return f"Filtration(dims={list(self.dims)})"


@dataclass(frozen=True)
class DirectrixFlag:
    """``{0 < W < V}`` for a balanced splitting type."""

    splitting: SplittingType
    W: Subspace

    @property
    def filtration(self):
        return Filtration(self.W.field, self.W.ambient_dim, [self.W])

    @property
    def is_trivial(self):
        return self.W.is_zero() or self.W.is_full()


def directrix_slots(s: SplittingType):
    """Indices of the top-degree summands, or all slots when perfectly balanced."""
    top = s.exponents[0]
    return [i for i, e in enumerate(s.exponents) if e == top]


def directrix(s: SplittingType, field: FieldSpec) -> DirectrixFlag:
    if not is_balanced_type(s):
        raise NotBalanced(f"splitting type {s} is not balanced")
    return DirectrixFlag(s, Subspace.coordinate(field, s.rank, directrix_slots(s)))


def _middle(g) -> Subspace:
    if isinstance(g, DirectrixFlag):
        return g.W
    if isinstance(g, Subspace):
        return g
    inner = g.steps[1:-1]
    if len(inner) > 1:
        raise ValueError("modification needs a flag with at most one intermediate step")
    return inner[0] if inner else g.steps[-1]


def modify(f: Filtration, g) -> Filtration:
    """Interleave ``f`` with ``B``: the steps ``F^i & B`` followed by ``B + F^j``.

    ``g`` is a :class:`DirectrixFlag`, a two-step :class:`Filtration`, or the
    subspace ``B`` itself.
    """
    B = _middle(g)
    if B.ambient_dim != f.ambient_dim:
        raise DimensionMismatch("flag and directrix live in different fibers")
    steps = [s & B for s in f.steps] + [B + s for s in f.steps]
    return Filtration(f.field, f.ambient_dim, steps)


def transport(f: Filtration, s: SplittingType, direction: str = "right") -> Filtration:
    """Move a flag between the fibers at 0 and infinity of one component.

    Valid flags are those containing the directrix.  In splitting coordinates
    the move is the identity on subspaces.
    """
    if direction not in ("left", "right"):
        raise ValueError("direction must be 'left' or 'right'")
    if f.ambient_dim != s.rank:
        raise DimensionMismatch("flag rank differs from the splitting type rank")
    if not is_perfectly_balanced(s):
        W = directrix(s, f.field).W
        if not f.contains_step(W):
            raise FlagDoesNotContainDirectrix(f"flag {f.dims} does not contain the directrix of {s}")
    return f


def _check_balanced(bundle):
    for i, s in enumerate(bundle.components):
        if not is_balanced_type(s):
            raise ComponentNotBalanced(f"component {i} has unbalanced splitting type {s}")


def left_flags(bundle) -> list:
    """Left flag at every node, written in the coordinates of the fiber at 0 of the next component."""
    _check_balanced(bundle)
    F = bundle.field
    comps = bundle.components
    current = transport(directrix(comps[0], F).filtration, comps[0], "right")
    out = []
    for i, g in enumerate(bundle.gluings):
        crossed = current.image(g)
        out.append(crossed)
        nxt = comps[i + 1]
        current = transport(modify(crossed, directrix(nxt, F)), nxt, "right")
    return out


def right_flags(bundle) -> list:
    """Right flag at every node, in the same coordinates as :func:`left_flags`."""
    _check_balanced(bundle)
    F = bundle.field
    comps = bundle.components
    k = len(comps)
    if k < 2:
        return []
    out = [None] * (k - 1)
    out[k - 2] = transport(directrix(comps[k - 1], F).filtration, comps[k - 1], "left")
    for i in range(k - 3, -1, -1):
        back = out[i + 1].image(bundle.gluing_inverses[i + 1])
        out[i] = transport(modify(back, directrix(comps[i + 1], F)), comps[i + 1], "left")
    return out


def flags_transverse(f: Filtration, g: Filtration) -> bool:
    if f.ambient_dim != g.ambient_dim:
        raise DimensionMismatch("flags live in different ambient spaces")
    return all(meets_properly(a, b) for a, b in product(f.steps[1:-1], g.steps[1:-1]))


def _random_refinement(f: Filtration, rng) -> Filtration:
    F = f.field
    steps = [f.steps[0]]
    for nxt in f.steps[1:]:
        cur = steps[-1]
        while cur.dim < nxt.dim - 1:
            coeffs = F.random_vector(rng, nxt.dim)
            v = [dot(F, coeffs, col) for col in zip(*nxt.vectors)]
            grown = cur + Subspace.span(F, f.ambient_dim, [v])
            if grown.dim > cur.dim:
                cur = grown
                steps.append(cur)
        steps.append(nxt)
    return Filtration(F, f.ambient_dim, steps)


def splitting_matrix_pair(f: Filtration, g: Filtration, target: Matrix, rng=None, tries=DEFAULT_TRIES):
    """Write ``target = P - Q`` with ``P`` preserving ``f`` and ``Q`` preserving ``g``.

    Both flags are refined to transverse complete flags; the lines
    ``F^i & G^(n+1-i)`` then give a basis in which ``P`` is the upper
    triangular part of ``target`` and ``-Q`` its strictly lower part.
    """
    if not flags_transverse(f, g):
        raise NotTransverse("flags are not transverse")
    n = f.ambient_dim
    if target.shape != (n, n):
        raise DimensionMismatch("target endomorphism has the wrong size")
    F = f.field
    rng = ensure_rng(rng)
    for _ in range(tries):
        cf = f if f.is_complete() else _random_refinement(f, rng)
        cg = g if g.is_complete() else _random_refinement(g, rng)
        if flags_transverse(cf, cg):
            break
    else:
        raise NotTransverse(f"no transverse complete refinement found in {tries} tries")
    basis = [(cf.steps[i] & cg.steps[n + 1 - i]).vectors[0] for i in range(1, n + 1)]
    S = Matrix.from_columns(F, basis)
    S_inv = S.inverse()
    local = S_inv @ target @ S
    upper = [[local[i, j] if j >= i else F.zero for j in range(n)] for i in range(n)]
    lower = [[F.neg(local[i, j]) if j < i else F.zero for j in range(n)] for i in range(n)]
    P = S @ Matrix._raw(F, upper, n) @ S_inv
    Q = S @ Matrix._raw(F, lower, n) @ S_inv
    return P, Q


def preserves(m: Matrix, f: Filtration) -> bool:
    """True when ``m`` maps every step of ``f`` into itself."""
    return all(s.image(m).issubset(s) for s in f.steps)
