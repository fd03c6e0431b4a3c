"""Submodules of V[eps] = V (x) k[eps]/(eps^2), used to test separation.

An element ``x + eps*y`` of V[eps] is stored as the row ``x || y`` of length 2r,
so a submodule is a k-subspace of k^(2r) stable under ``(x, y) -> (0, x)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DimensionMismatch
from .linalg import Matrix, Subspace, intersect, matmul_rows


@dataclass(frozen=True)
class DualModule:
    r: int
    space: Subspace

    def __post_init__(self):
        if self.space.ambient_dim != 2 * self.r:
            raise DimensionMismatch("a module in V[eps] lives in k^(2r)")
        if not self.eps_image().issubset(self.space):
            raise ValueError("subspace is not closed under multiplication by eps")

    def eps_image(self) -> Subspace:
        F = self.space.field
        r = self.r
        zero = [F.zero] * r
        return Subspace.span(F, 2 * r, [zero + list(v[:r]) for v in self.space.vectors])

    def eps_kernel(self) -> Subspace:
        """Elements of the module killed by eps: those with zero value part."""
        F = self.space.field
        r = self.r
        tail = Subspace.span(F, 2 * r, [[F.zero] * r + [F.one if j == i else F.zero for j in range(r)]
                                        for i in range(r)])
        return intersect(self.space, tail)

    def is_flat(self) -> bool:
        # N = k[eps]^a + k^b has dim eps*N = a and dim ker(eps) = a + b
        return self.eps_kernel().dim == self.eps_image().dim

    @classmethod
    def free_over(cls, A: Subspace) -> "DualModule":
        """A[eps] = A + eps*A."""
        F = A.field
        r = A.ambient_dim
        zero = [F.zero] * r
        rows = [list(v) + zero for v in A.vectors] + [zero + list(v) for v in A.vectors]
        return cls(r, Subspace.span(F, 2 * r, rows))


def twist_by(B: Subspace, M: Matrix) -> DualModule:
    """(I + eps*M) applied to B[eps]."""
    F = B.field
    r = B.ambient_dim
    if M.shape != (r, r):
        raise DimensionMismatch("endomorphism shape does not match the subspace")
    zero = [F.zero] * r
    images = matmul_rows(F, B.vectors, M.T.rows, r) if B.dim else []
    rows = [list(b) + list(mb) for b, mb in zip(B.vectors, images)]
    rows += [zero + list(b) for b in B.vectors]
    return DualModule(r, Subspace.span(F, 2 * r, rows))


def dual_intersect_flat(A: Subspace, B: Subspace, M: Matrix):
    """``(A[eps] & (I + eps*M) B[eps], is_flat)``."""
    if A.ambient_dim != B.ambient_dim or M.shape != (A.ambient_dim, A.ambient_dim):
        raise DimensionMismatch("A, B and M must share the ambient dimension")
    module = DualModule(A.ambient_dim, intersect(DualModule.free_over(A).space, twist_by(B, M).space))
    return module, module.is_flat()
