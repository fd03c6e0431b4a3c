"""Exact dense matrices, reduced row echelon forms and subspaces of k^n.

Vectors are rows (tuples of scalars).  A :class:`Matrix` acts on column
vectors, so the image of a subspace spanned by rows ``v`` under ``g`` is
spanned by the rows ``v @ g.T``.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from ..errors import DimensionMismatch, SingularMatrix
from . import _kernels
from .field import FieldSpec


class Matrix:
    """Immutable matrix over a :class:`FieldSpec`."""

    __slots__ = ("field", "rows", "nrows", "ncols")

    def __init__(self, field: FieldSpec, rows, ncols: int | None = None):
        rows = tuple(tuple(field(x) for x in row) for row in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for a matrix without rows")
            ncols = len(rows[0])
        if any(len(row) != ncols for row in rows):
            raise DimensionMismatch("ragged matrix rows")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "nrows", len(rows))
        object.__setattr__(self, "ncols", ncols)

    @classmethod
    def _raw(cls, field, rows, ncols):
        # rows already reduced into the field
        m = object.__new__(cls)
        object.__setattr__(m, "field", field)
        object.__setattr__(m, "rows", tuple(tuple(r) for r in rows))
        object.__setattr__(m, "nrows", len(m.rows))
        object.__setattr__(m, "ncols", ncols)
        return m

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def zeros(cls, field, nrows, ncols):
        z = field.zero
        return cls._raw(field, [[z] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, field, n):
        z, o = field.zero, field.one
        return cls._raw(field, [[o if i == j else z for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, field, columns, nrows=None):
        columns = [list(c) for c in columns]
        if not columns:
            return cls.zeros(field, nrows or 0, 0)
        return cls(field, list(zip(*columns)), len(columns))

    @classmethod
    def random(cls, field, rng, nrows, ncols):
        vals = field.random_vector(rng, nrows * ncols)
        return cls._raw(field, [vals[i * ncols:(i + 1) * ncols] for i in range(nrows)], ncols)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def column(self, j):
        return tuple(row[j] for row in self.rows)

    def flat(self):
        """Entries in row-major order."""
        return [x for row in self.rows for x in row]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.field, self.ncols, self.rows))

    def __repr__(self):
        fmt = self.field.format_scalar
        body = "; ".join(" ".join(fmt(x) for x in row) for row in self.rows)
        return f"Matrix[{self.nrows}x{self.ncols}]({body})"

    @property
    def T(self):
        if self.nrows == 0:
            return Matrix.zeros(self.field, self.ncols, 0)
        return Matrix._raw(self.field, list(zip(*self.rows)), self.nrows)

    def transpose(self):
        return self.T

    def _check_same(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch(f"shapes {self.shape} and {other.shape} differ")

    def __add__(self, other):
        self._check_same(other)
        F = self.field
        return Matrix._raw(F, [[F.add(a, b) for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                           self.ncols)

    def __sub__(self, other):
        self._check_same(other)
        F = self.field
        return Matrix._raw(F, [[F.sub(a, b) for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                           self.ncols)

    def __neg__(self):
        F = self.field
        return Matrix._raw(F, [[F.neg(a) for a in r] for r in self.rows], self.ncols)

    def scale(self, c):
        F = self.field
        c = F(c)
        return Matrix._raw(F, [[F.mul(c, a) for a in r] for r in self.rows], self.ncols)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
            return Matrix._raw(self.field, matmul_rows(self.field, self.rows, other.rows, other.ncols),
                               other.ncols)
        vec = tuple(other)
        if len(vec) != self.ncols:
            raise DimensionMismatch("vector length does not match matrix columns")
        return tuple(dot(self.field, row, vec) for row in self.rows)

    def is_zero(self):
        return not any(x for row in self.rows for x in row)

    def rank(self):
        return rank(self)

    def inverse(self):
        if self.nrows != self.ncols:
            raise DimensionMismatch("only square matrices are invertible")
        n = self.nrows
        F = self.field
        aug = [list(row) + [F.one if i == j else F.zero for j in range(n)] for i, row in enumerate(self.rows)]
        red, pivots = _rref_rows(F, aug, 2 * n)
        if len(pivots) < n or pivots[n - 1] != n - 1:
            raise SingularMatrix("matrix is not invertible")
        return Matrix._raw(F, [row[n:] for row in red[:n]], n)

    def is_invertible(self):
        return self.nrows == self.ncols and rank(self) == self.nrows


def dot(F, u, v):
    if F.p is None:
        return sum((a * b for a, b in zip(u, v)), F.zero)
    return sum(a * b for a, b in zip(u, v)) % F.p


def matmul_rows(F, a_rows, b_rows, b_ncols):
    cols = list(zip(*b_rows)) if b_rows else [()] * b_ncols
    if F.p is None:
        return [[sum((x * y for x, y in zip(row, col)), F.zero) for col in cols] for row in a_rows]
    p = F.p
    return [[sum(x * y for x, y in zip(row, col)) % p for col in cols] for row in a_rows]


# -- row reduction ---------------------------------------------------------

def _rref_rows_python(F, rows, ncols, rank_only=False):
    rows = [list(r) for r in rows]
    nrows = len(rows)
    pivots = []
    rank_ = 0
    p = F.p
    for col in range(ncols):
        if rank_ == nrows:
            break
        piv = next((i for i in range(rank_, nrows) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank_], rows[piv] = rows[piv], rows[rank_]
        prow = rows[rank_]
        inv = F.inv(prow[col])
        if p is None:
            prow = [x * inv for x in prow]
        else:
            prow = [x * inv % p for x in prow]
        rows[rank_] = prow
        targets = range(rank_ + 1, nrows) if rank_only else range(nrows)
        for i in targets:
            if i == rank_:
                continue
            f = rows[i][col]
            if not f:
                continue
            if p is None:
                rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
            else:
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], prow)]
        pivots.append(col)
        rank_ += 1
    return rows, pivots


def _rref_rows(F, rows, ncols, rank_only=False):
    rows = list(rows)
    if not rows or ncols == 0:
        return [list(r) for r in rows], []
    if _kernels.supports(F.p):
        arr = np.array(rows, dtype=np.int64).reshape(len(rows), ncols)
        rk, piv = _kernels.rref_inplace(arr, F.p, rank_only)
        return arr.tolist(), [int(c) for c in piv]
    return _rref_rows_python(F, rows, ncols, rank_only)


def rref(m: Matrix):
    """Reduced row echelon form.  Returns ``(R, rank, pivots)``."""
    rows, pivots = _rref_rows(m.field, m.rows, m.ncols)
    return Matrix._raw(m.field, rows, m.ncols), len(pivots), pivots


def rank(m: Matrix) -> int:
    _, pivots = _rref_rows(m.field, m.rows, m.ncols, rank_only=True)
    return len(pivots)


def rank_of_rows(F, rows, ncols) -> int:
    return len(_rref_rows(F, rows, ncols, rank_only=True)[1])


def kernel_basis(m: Matrix) -> "Subspace":
    """Subspace of column vectors ``v`` with ``m @ v == 0``."""
    F = m.field
    n = m.ncols
    rows, pivots = _rref_rows(F, m.rows, n)
    pivot_set = set(pivots)
    basis = []
    for free in range(n):
        if free in pivot_set:
            continue
        v = [F.zero] * n
        v[free] = F.one
        for r, pc in enumerate(pivots):
            v[pc] = F.neg(rows[r][free])
        basis.append(v)
    return Subspace.span(F, n, basis)


# -- subspaces -------------------------------------------------------------

class Subspace:
    """A subspace of k^n stored through the RREF of a spanning set.

    Two subspaces are equal exactly when their canonical bases agree.
    """

    __slots__ = ("field", "ambient_dim", "basis", "pivots")

    def __init__(self, field: FieldSpec, ambient_dim: int, basis_rows, pivots):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "basis", Matrix._raw(field, basis_rows, ambient_dim))
        object.__setattr__(self, "pivots", tuple(pivots))

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @classmethod
    def span(cls, field, ambient_dim, vectors):
        vectors = [[field(x) for x in v] for v in vectors]
        if any(len(v) != ambient_dim for v in vectors):
            raise DimensionMismatch("vector length differs from ambient dimension")
        rows, pivots = _rref_rows(field, vectors, ambient_dim)
        return cls(field, ambient_dim, rows[:len(pivots)], pivots)

    @classmethod
    def zero(cls, field, n):
        return cls(field, n, [], [])

    @classmethod
    def full(cls, field, n):
        return cls(field, n, Matrix.identity(field, n).rows, range(n))

    @classmethod
    def coordinate(cls, field, n, indices):
        """Span of the standard basis vectors ``e_i`` for ``i`` in ``indices``."""
        idx = sorted(set(indices))
        rows = [[field.one if j == i else field.zero for j in range(n)] for i in idx]
        return cls(field, n, rows, idx)

    @property
    def dim(self):
        return self.basis.nrows

    @property
    def vectors(self):
        return self.basis.rows

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.field == other.field and self.ambient_dim == other.ambient_dim
                and self.basis.rows == other.basis.rows)

    def __hash__(self):
        return hash((self.ambient_dim, self.basis.rows))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"

    def _check(self, other):
        if self.ambient_dim != other.ambient_dim or self.field != other.field:
            raise DimensionMismatch(
                f"ambient spaces differ: {self.ambient_dim} vs {other.ambient_dim}")

    def is_zero(self):
        return self.dim == 0

    def is_full(self):
        return self.dim == self.ambient_dim

    def contains_vector(self, v):
        v = [self.field(x) for x in v]
        F = self.field
        # reduce v against the canonical basis using its pivots
        for row, pc in zip(self.basis.rows, self.pivots):
            c = v[pc]
            if c:
                v = [F.sub(a, F.mul(c, b)) for a, b in zip(v, row)]
        return not any(v)

    def issubset(self, other):
        self._check(other)
        return all(other.contains_vector(v) for v in self.vectors)

    __le__ = issubset

    def __add__(self, other):
        return subspace_sum(self, other)

    def __and__(self, other):
        return intersect(self, other)

    def perp(self):
        """Annihilator under the standard pairing (as row vectors)."""
        if self.dim == 0:
            return Subspace.full(self.field, self.ambient_dim)
        return kernel_basis(self.basis)

    def image(self, g: Matrix):
        """Image under ``g`` acting on column vectors."""
        if g.ncols != self.ambient_dim:
            raise DimensionMismatch("matrix does not act on this ambient space")
        if self.dim == 0:
            return Subspace.zero(self.field, g.nrows)
        rows = matmul_rows(self.field, self.basis.rows, g.T.rows, g.nrows)
        return Subspace.span(self.field, g.nrows, rows)

    def coordinates_in(self, parent: "Subspace") -> "Subspace":
        """Express ``self`` (contained in ``parent``) in the canonical basis of ``parent``."""
        self._check(parent)
        piv = parent.pivots
        rows = [[v[c] for c in piv] for v in self.vectors]
        sub = Subspace.span(self.field, parent.dim, rows)
        if sub.dim != self.dim or not self.issubset(parent):
            raise DimensionMismatch("subspace is not contained in the parent space")
        return sub

    def lift_from(self, parent: "Subspace") -> "Subspace":
        """Inverse of :meth:`coordinates_in`: ``self`` lives in coordinates of ``parent``."""
        if self.ambient_dim != parent.dim:
            raise DimensionMismatch("coordinate space does not match parent dimension")
        if self.dim == 0:
            return Subspace.zero(self.field, parent.ambient_dim)
        rows = matmul_rows(self.field, self.basis.rows, parent.basis.rows, parent.ambient_dim)
        return Subspace.span(self.field, parent.ambient_dim, rows)

    def complement_vectors(self):
        """Standard basis vectors at the non-pivot columns; they complete a basis."""
        F = self.field
        piv = set(self.pivots)
        n = self.ambient_dim
        return [tuple(F.one if j == i else F.zero for j in range(n)) for i in range(n) if i not in piv]


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    a._check(b)
    if a.dim == 0:
        return b
    if b.dim == 0:
        return a
    return Subspace.span(a.field, a.ambient_dim, list(a.vectors) + list(b.vectors))


def intersect(a: Subspace, b: Subspace) -> Subspace:
    a._check(b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.field, a.ambient_dim)
    if a.is_full():
        return b
    if b.is_full():
        return a
    constraints = list(a.perp().vectors) + list(b.perp().vectors)
    return kernel_basis(Matrix._raw(a.field, constraints, a.ambient_dim))


def meets_properly(a: Subspace, b: Subspace) -> bool:
    """True when ``dim(a & b)`` is the expected ``max(0, dim a + dim b - n)``."""
    a._check(b)
    n = a.ambient_dim
    # dim(a & b) = dim a + dim b - dim(a + b)
    return a.dim + b.dim - subspace_sum(a, b).dim == max(0, a.dim + b.dim - n)


def stack(F, blocks: Sequence[Sequence[Sequence]], ncols) -> Matrix:
    rows = [row for block in blocks for row in block]
    return Matrix._raw(F, rows, ncols)
