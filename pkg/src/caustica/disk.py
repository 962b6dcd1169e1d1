"""Dirichlet Laplacian on the unit disk: joint spectrum, modes, caustics.

Modes are ``phi_{k,n}(r, theta) = c_{k,n} J_n(lambda_{k,n} r) e^{i n theta}``
with ``lambda_{k,n}`` the k-th zero of ``J_n``.  Only ``n >= 0`` is stored;
``n > 0`` carries multiplicity 2 for the pair ``+-n`` since ``|phi|^2`` does
not depend on the sign of ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import specfun
from .cutoff import DEFAULT_CUTOFF, CutoffSpec


@dataclass(frozen=True)
class JointEigenvalue:
    lam: float
    n: int
    k: int
    mu: float

    @classmethod
    def make(cls, lam, n, k):
        return cls(float(lam), int(n), int(k), abs(int(n)) / float(lam))


@dataclass(frozen=True)
class DiskMode:
    nu: JointEigenvalue
    c: float

    @property
    def multiplicity(self):
        return 1 if self.nu.n == 0 else 2


@dataclass(frozen=True)
class Caustic:
    """Caustic circle ``r = mu``; its distance to the boundary is ``1 - mu``."""

    mu: float

    @property
    def boundary_distance(self):
        return 1.0 - self.mu


def disk_norm_const(n: int, k: int, zero) -> float:
    """c_{k,n} = 1 / (sqrt(pi) |J_{n+1}(lambda_{k,n})|).

    Uses int_0^1 J_n(lambda r)^2 r dr = J_{n+1}(lambda)^2 / 2 at a zero of J_n.
    """
    value = zero.value if hasattr(zero, "value") else float(zero)
    jn1 = abs(float(special.jv(n + 1, value)))
    if jn1 < 1e-300:
        raise specfun.ConvergenceError("J_{n+1} vanishes at the supplied zero", {"n": n, "k": k, "zero": value})
    return 1.0 / (math.sqrt(math.pi) * jn1)


def disk_mode(n: int, k: int) -> DiskMode:
    z = specfun.bessel_zero(n, k)
    return DiskMode(JointEigenvalue.make(z.value, n, k), disk_norm_const(n, k, z))


def _zeros_with_cache(ns, ks, cache, surface_id):
    values = np.empty(ns.shape)
    missing = []
    for i, (n, k) in enumerate(zip(ns.tolist(), ks.tolist())):
        hit = cache.get_zero(surface_id, n, k) if cache is not None else None
        if hit is None:
            missing.append(i)
        else:
            values[i] = hit
    if missing:
        idx = np.array(missing)
        solved = specfun.bessel_zeros(ns[idx], ks[idx])
        values[idx] = solved
        if cache is not None:
            cache.put_zeros(surface_id, ns[idx].tolist(), ks[idx].tolist(), solved.tolist())
    return values


def disk_band_spectrum(lam: float, delta: float, cutoff: CutoffSpec = DEFAULT_CUTOFF,
                       n_min_fraction: float = 0.0, cache=None, surface_id: str = "disk") -> list:
    """All disk modes with lambda_{k,n} in the open cutoff support around ``lam``.

    Candidate radial indices come from the Bessel phase count, so only the
    zeros that can fall in the window are ever refined.
    """
    if lam < 10:
        raise specfun.DomainError("disk bands need lambda >= 10")
    if delta <= 0:
        raise specfun.DomainError("delta must be positive")
    if not (0.0 <= n_min_fraction < 1.0):
        raise specfun.DomainError("n_min_fraction must lie in [0, 1)")
    lo, hi = cutoff.window(lam, delta)
    n_max = int(math.floor(hi))
    n_min = int(math.ceil(n_min_fraction * lam))
    ns = np.arange(n_min, n_max + 1)
    if ns.size == 0:
        return []
    centre = np.rint(specfun.bessel_phase_count(ns, lam)).astype(np.int64)
    cand_n = np.repeat(ns, 3)
    cand_k = (centre[:, None] + np.array([-1, 0, 1])[None, :]).ravel()
    keep = cand_k >= 1
    cand_n, cand_k = cand_n[keep], cand_k[keep]
    values = _zeros_with_cache(cand_n, cand_k, cache, surface_id)
    inside = (values > lo) & (values < hi)
    modes = []
    for n, k, v in zip(cand_n[inside].tolist(), cand_k[inside].tolist(), values[inside].tolist()):
        modes.append(DiskMode(JointEigenvalue.make(v, n, k), disk_norm_const(n, k, v)))
    modes.sort(key=lambda m: (m.nu.n, m.nu.k))
    return modes


def disk_eigenfunction_sq(mode: DiskMode, r):
    """|phi(r, theta)|^2 = c^2 J_n(lambda r)^2 for a single sign of n."""
    r = np.asarray(r, dtype=float)
    out = mode.c ** 2 * special.jv(mode.nu.n, mode.nu.lam * r) ** 2
    return float(out) if out.ndim == 0 else out


def disk_modes_sq(modes, r):
    """Matrix of |phi_j(r_i)|^2, shape (len(modes), len(r)), one sign of n per row."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if not modes:
        return np.zeros((0, r.size))
    n = np.array([m.nu.n for m in modes], dtype=float)[:, None]
    lam = np.array([m.nu.lam for m in modes])[:, None]
    c = np.array([m.c for m in modes])[:, None]
    return c ** 2 * special.jv(n, lam * r[None, :]) ** 2


def disk_modes_abs(modes, r):
    return np.sqrt(disk_modes_sq(modes, r))


def caustic(mode: DiskMode) -> Caustic:
    return Caustic(mode.nu.mu)
