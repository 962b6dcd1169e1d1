"""Symmetric tridiagonal eigenvalues by Sturm-sequence bisection, vectors by inverse iteration."""

from __future__ import annotations

import numba
import numpy as np
from scipy.linalg import solve_banded

_TINY = 1e-300


@numba.njit(cache=True)
def sturm_count(d, e, x):
    """Number of eigenvalues strictly below ``x`` (negative LDL^T pivots of T - x)."""
    count = 0
    q = d[0] - x
    if q < 0.0:
        count += 1
    for i in range(1, d.shape[0]):
        if q == 0.0:
            q = _TINY
        q = d[i] - x - e[i - 1] * e[i - 1] / q
        if q < 0.0:
            count += 1
    return count


@numba.njit(cache=True)
def _bisect_index(d, e, j, lo, hi, rtol):
    # invariant: count(lo) <= j < count(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if hi - lo <= rtol * max(abs(lo), abs(hi)):
            break
        if sturm_count(d, e, mid) > j:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@numba.njit(cache=True)
def bisect_window(d, e, lo, hi, rtol=1e-15):
    """All eigenvalues in [lo, hi) as an ascending array, plus the index of the first one."""
    c_lo = sturm_count(d, e, lo)
    c_hi = sturm_count(d, e, hi)
    out = np.empty(c_hi - c_lo)
    for j in range(c_lo, c_hi):
        out[j - c_lo] = _bisect_index(d, e, j, lo, hi, rtol)
    return out, c_lo


@numba.njit(cache=True)
def bisect_indices(d, e, first, last, lo, hi, rtol=1e-15):
    """Eigenvalues with indices first..last-1; [lo, hi) must bracket them."""
    out = np.empty(last - first)
    for j in range(first, last):
        out[j - first] = _bisect_index(d, e, j, lo, hi, rtol)
    return out


def gershgorin(d, e):
    r = np.zeros_like(d)
    r[:-1] += np.abs(e)
    r[1:] += np.abs(e)
    return float(np.min(d - r)), float(np.max(d + r))


def inverse_iteration(d, e, eigenvalue, iterations=3):
    """Unit eigenvector for an isolated eigenvalue; sign fixed so the largest entry is positive."""
    n = d.size
    scale = max(abs(eigenvalue), 1.0)
    shift = eigenvalue + 1e-13 * scale
    ab = np.zeros((3, n))
    ab[0, 1:] = e
    ab[1, :] = d - shift
    ab[2, :-1] = e
    # fixed seed: symmetric start vectors can be orthogonal to odd-parity modes
    v = np.random.default_rng(20240517).uniform(0.5, 1.5, n)
    for _ in range(iterations):
        v = solve_banded((1, 1), ab, v, check_finite=False)
        v /= np.linalg.norm(v)
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return v


def tridiag_matvec(d, e, v):
    out = d * v
    out[:-1] += e * v[1:]
    out[1:] += e * v[:-1]
    return out
