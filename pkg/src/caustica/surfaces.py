"""Uniform spectrum-source interface over the disk and surfaces of revolution.

A source knows how to list the modes of a band, evaluate ``|phi|^2`` on its
radial chart (r for the disk, s for a revolution surface) and measure the
distance from a chart point to a caustic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import disk, revolution
from .cutoff import DEFAULT_CUTOFF


@dataclass
class DiskSurface:
    n_min_fraction: float = 0.0
    cache: object = None
    kind = "disk"
    surface_id = "disk"
    A = 1.0

    @property
    def chart(self):
        return 0.0, 1.0

    def band_modes(self, lam, delta, cutoff=DEFAULT_CUTOFF):
        return disk.disk_band_spectrum(lam, delta, cutoff, self.n_min_fraction, cache=self.cache,
                                       surface_id=self.surface_id)

    def modes_sq(self, modes, x):
        return disk.disk_modes_sq(modes, x)

    def caustic_distance(self, mus, x):
        """|r - mu| for every (mu, r) pair, shape (len(mus), len(x))."""
        mus = np.atleast_1d(np.asarray(mus, dtype=float))
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.abs(x[None, :] - mus[:, None])

    def caustic_points(self, mu):
        return [float(mu)]


@dataclass
class RevolutionSurface:
    profile: revolution.RevolutionProfile
    cells: int | None = None
    cone_eps: float = 0.05
    cache: object = None
    kind = "revolution"

    @property
    def surface_id(self):
        return self.profile.name

    @property
    def A(self):
        return self.profile.A

    @property
    def chart(self):
        return 0.0, self.profile.L

    def band_modes(self, lam, delta, cutoff=DEFAULT_CUTOFF):
        return revolution.rev_band_spectrum(self.profile, lam, delta, cutoff, self.cone_eps,
                                            cells=self.cells, cache=self.cache)

    def modes_sq(self, modes, x):
        return revolution.rev_modes_sq(modes, x)

    def caustic_distance(self, mus, x):
        """Arclength to the nearer turning circle; mu = 0 tori have the poles as caustic."""
        mus = np.abs(np.atleast_1d(np.asarray(mus, dtype=float)))
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty((mus.size, x.size))
        pole = np.minimum(x, self.profile.L - x)
        zero = mus <= 0
        out[zero] = pole[None, :]
        inner = ~zero
        if inner.any():
            s_minus, s_plus = revolution._caustics_many(self.profile, np.minimum(mus[inner], self.profile.A))
            out[inner] = np.minimum(np.abs(x[None, :] - s_minus[:, None]), np.abs(x[None, :] - s_plus[:, None]))
        return out

    def caustic_points(self, mu):
        if mu <= 0 or mu >= self.profile.A:
            return []
        return list(revolution.rev_caustics(self.profile, mu))


def make_surface(kind: str, profile: str | None = None, cache=None, cells=None, cone_eps=0.05,
                 n_min_fraction=0.0):
    if kind == "disk":
        return DiskSurface(n_min_fraction=n_min_fraction, cache=cache)
    if kind == "revolution":
        return RevolutionSurface(revolution.parse_profile(profile or "perturbed(0.1)"), cells=cells,
                                 cone_eps=cone_eps, cache=cache)
    raise ValueError(f"unknown surface kind {kind!r}")


def log_grid(lo, hi, count):
    """``count`` log-spaced levels on [lo, hi]; interior levels land off any lattice by construction."""
    if count <= 0:
        return np.zeros(0)
    if count == 1:
        return np.array([float(lo)])
    out = np.exp(np.linspace(math.log(lo), math.log(hi), count))
    out[0], out[-1] = lo, hi
    return out
