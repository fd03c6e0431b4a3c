"""Compiled row reduction over GF(p) for word-size primes.

Two regimes are supported: the Mersenne prime 2**61 - 1 (products reduced by
splitting into 31-bit halves, all intermediate values kept below 2**63), and
any prime below 2**31 (plain int64 products).  Everything is int64 so numba
never promotes to float.
"""

import numpy as np
from numba import njit

M61 = (1 << 61) - 1
SMALL_PRIME_LIMIT = 1 << 31

_LO31 = (1 << 31) - 1
_LO30 = (1 << 30) - 1


def supports(p):
    return p is not None and (p == M61 or p < SMALL_PRIME_LIMIT)


@njit(cache=True)
def _reduce61(x):
    x = (x & M61) + (x >> 61)
    x = (x & M61) + (x >> 61)
    if x >= M61:
        x -= M61
    return x


@njit(cache=True)
def _mulmod61(a, b):
    a_hi = a >> 31
    a_lo = a & _LO31
    b_hi = b >> 31
    b_lo = b & _LO31
    mid = a_hi * b_lo + a_lo * b_hi
    low = a_lo * b_lo
    low = (low & M61) + (low >> 61)
    # 2**62 = 2 (mod M61) and mid * 2**31 = (mid >> 30) * 2**61 + (mid & LO30) * 2**31
    s = 2 * a_hi * b_hi + (mid >> 30) + ((mid & _LO30) << 31) + low
    return _reduce61(s)


@njit(cache=True)
def _mulmod(a, b, p):
    if p == M61:
        return _mulmod61(a, b)
    return (a * b) % p


@njit(cache=True)
def _powmod(a, e, p):
    result = 1
    base = a
    while e > 0:
        if e & 1:
            result = _mulmod(result, base, p)
        base = _mulmod(base, base, p)
        e >>= 1
    return result


@njit(cache=True)
def mulmod_array(a, b, p):
    out = np.empty_like(a)
    for i in range(a.shape[0]):
        out[i] = _mulmod(a[i], b[i], p)
    return out


@njit(cache=True)
def rref_inplace(a, p, rank_only):
    """Reduce ``a`` (entries in [0, p)) in place.

    Returns ``(rank, pivots)``.  With ``rank_only`` the matrix is left in row
    echelon form and elimination stops once every row holds a pivot.
    """
    nrows, ncols = a.shape
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    rank = 0
    for col in range(ncols):
        if rank == nrows:
            break
        piv = -1
        for i in range(rank, nrows):
            if a[i, col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for j in range(col, ncols):
                tmp = a[rank, j]
                a[rank, j] = a[piv, j]
                a[piv, j] = tmp
        inv = _powmod(a[rank, col], p - 2, p)
        for j in range(col, ncols):
            a[rank, j] = _mulmod(a[rank, j], inv, p)
        start = rank + 1 if rank_only else 0
        for i in range(start, nrows):
            if i == rank:
                continue
            f = a[i, col]
            if f == 0:
                continue
            for j in range(col, ncols):
                v = a[rank, j]
                if v != 0:
                    t = a[i, j] - _mulmod(f, v, p)
                    if t < 0:
                        t += p
                    a[i, j] = t
        pivots[rank] = col
        rank += 1
    return rank, pivots[:rank]


@njit(cache=True)
def poly_products(coeffs, p):
    """Coefficients of x_i * x_j (i <= j) for the rows x_i of ``coeffs``.

    ``coeffs`` has shape (m, e + 1); the result has one row per pair in
    lexicographic order and 2e + 1 columns.
    """
    m, width = coeffs.shape
    npairs = m * (m + 1) // 2
    out = np.zeros((npairs, 2 * width - 1), dtype=np.int64)
    row = 0
    for i in range(m):
        for j in range(i, m):
            for u in range(width):
                cu = coeffs[i, u]
                if cu == 0:
                    continue
                for v in range(width):
                    cv = coeffs[j, v]
                    if cv == 0:
                        continue
                    t = out[row, u + v] + _mulmod(cu, cv, p)
                    if t >= p:
                        t -= p
                    out[row, u + v] = t
            row += 1
    return out
