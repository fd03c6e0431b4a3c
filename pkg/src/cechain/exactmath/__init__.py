"""Exact arithmetic: fields, matrices, subspaces, polynomials, dual-number modules."""

from .dual import DualModule, dual_intersect_flat
from .field import MERSENNE61, FieldSpec, default_prime
from .linalg import (
    Matrix,
    Subspace,
    intersect,
    kernel_basis,
    meets_properly,
    rank,
    rref,
    subspace_sum,
)
from .poly import Poly, exact_divide

__all__ = [
    "DualModule",
    "FieldSpec",
    "MERSENNE61",
    "Matrix",
    "Poly",
    "Subspace",
    "default_prime",
    "dual_intersect_flat",
    "exact_divide",
    "intersect",
    "kernel_basis",
    "meets_properly",
    "rank",
    "rref",
    "subspace_sum",
]
