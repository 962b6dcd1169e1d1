"""Smooth compactly supported cutoff used to define thin spectral windows."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _g(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def smooth_step(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1."""
    gu = _g(u)
    gv = _g(1.0 - np.asarray(u, dtype=float))
    return gu / (gu + gv)


@dataclass(frozen=True)
class CutoffSpec:
    """phi(t) = 1 on |t| <= plateau, 0 for |t| >= support, smooth in between."""

    plateau: float = 1.0
    support: float = 2.0

    def __post_init__(self):
        if not (0 < self.plateau < self.support):
            raise ValueError("cutoff needs 0 < plateau < support")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        u = (self.support - np.abs(t)) / (self.support - self.plateau)
        out = smooth_step(u)
        return float(out) if out.ndim == 0 else out

    def weight(self, eigenvalue, lam, delta):
        """Squared cutoff phi((eigenvalue - lam) / delta)**2, the projector-kernel weight."""
        return self((np.asarray(eigenvalue, dtype=float) - lam) / delta) ** 2

    def window(self, lam, delta):
        """Open support window (lam - support*delta, lam + support*delta)."""
        return lam - self.support * delta, lam + self.support * delta


DEFAULT_CUTOFF = CutoffSpec()


def default_delta(lam, exponent=-1.0 / 3.0, scale=1.0):
    return scale * lam ** exponent
