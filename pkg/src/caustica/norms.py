"""Pointwise spectral-projector sums, their sup over a region, envelopes and the boundary split."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .bands import Band
from .specfun import DomainError

CAUSTIC_OFFSETS = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class Region:
    """Radial-chart region: an annulus r in [lo, hi] on the disk, or s-intervals on a revolution surface."""

    kind: str
    intervals: tuple

    def __post_init__(self):
        if self.kind not in ("disk", "revolution"):
            raise DomainError(f"unknown region kind {self.kind!r}")
        if not self.intervals:
            raise DomainError("region needs at least one interval")
        for lo, hi in self.intervals:
            if not lo < hi:
                raise DomainError(f"empty interval [{lo}, {hi}]")
            if self.kind == "disk" and not (0 < lo and hi <= 1):
                raise DomainError("disk annulus must lie in (0, 1] (the centre is excluded)")

    @classmethod
    def annulus(cls, lo, hi):
        return cls("disk", ((float(lo), float(hi)),))

    @classmethod
    def s_intervals(cls, *intervals):
        return cls("revolution", tuple((float(a), float(b)) for a, b in intervals))

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.intervals:
            out |= (x >= lo) & (x <= hi)
        return out

    @property
    def endpoints(self):
        return sorted({p for iv in self.intervals for p in iv})

    def as_dict(self):
        return {"kind": self.kind, "intervals": [list(iv) for iv in self.intervals]}


def region_grid(band: Band, source, region: Region) -> np.ndarray:
    """Uniform grid at step lambda^(-2/3)/4, every caustic in the region, and offsets around each caustic."""
    scale = band.lam ** (-2.0 / 3.0)
    pts = []
    for lo, hi in region.intervals:
        count = int(math.ceil((hi - lo) / (0.25 * scale))) + 1
        pts.append(np.linspace(lo, hi, count))
    caustics = []
    for mu in np.unique(band.member_mus()):
        caustics.extend(source.caustic_points(float(mu)))
    if caustics:
        c = np.asarray(caustics)
        offs = np.concatenate(([0.0], scale * np.array(CAUSTIC_OFFSETS), -scale * np.array(CAUSTIC_OFFSETS)))
        pts.append((c[:, None] + offs[None, :]).ravel())
    x = np.unique(np.concatenate(pts))
    return x[region.contains(x)]


def projector_sum(band: Band, source, x):
    """S(x) = sum_nu weight * multiplicity * |phi_nu(x)|^2 on the radial chart."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if len(band) == 0:
        return np.zeros(x.shape)
    sq = source.modes_sq(band.modes, x)
    coeff = band.weights * band.multiplicities
    return coeff @ sq


@dataclass
class SumResult:
    sup_value: float
    argmax: float
    points: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    term_count: int
    argmax_on_boundary: bool
    argmax_caustic_distance: float  # in units of lambda^(-2/3)

    def as_dict(self):
        return {"sup": self.sup_value, "sqrt_sup": math.sqrt(self.sup_value), "argmax": self.argmax,
                "term_count": self.term_count, "argmax_on_boundary": self.argmax_on_boundary,
                "argmax_caustic_distance": self.argmax_caustic_distance, "grid_points": int(self.points.size)}


def sup_over_region(band: Band, source, region: Region, points=None) -> SumResult:
    x = region_grid(band, source, region) if points is None else np.asarray(points, dtype=float)
    values = projector_sum(band, source, x)
    i = int(np.argmax(values)) if values.size else 0
    arg = float(x[i]) if x.size else math.nan
    on_edge = bool(x.size) and any(abs(arg - e) <= 1e-12 for e in region.endpoints)
    dist = math.inf
    if len(band) and x.size:
        mus = np.unique(band.member_mus())
        dist = float(np.min(source.caustic_distance(mus, [arg]))) * band.lam ** (2.0 / 3.0)
    sup = float(values[i]) if values.size else 0.0
    return SumResult(sup, arg, x, values, len(band), on_edge, dist)


# --- Airy envelope -----------------------------------------------------------

@dataclass
class EnvelopeReport:
    max_ratio: float
    argmax_mode: tuple
    argmax_point: float
    samples: int

    def as_dict(self):
        return {"max_ratio": self.max_ratio, "argmax_mode": list(self.argmax_mode),
                "argmax_point": self.argmax_point, "samples": self.samples}


def envelope(band: Band, source, x):
    """|nu|^(1/6) <d(x, C_nu) |nu|^(2/3)>^(-1/4) per (mode, point), |nu| the Euclidean norm of (lambda, n)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    norm = np.hypot(band.lams, band.ns)[:, None]
    d = source.caustic_distance(band.member_mus(), x)
    return norm ** (1.0 / 6.0) * (1.0 + (d * norm ** (2.0 / 3.0)) ** 2) ** (-1.0 / 8.0)


def envelope_ratio(band: Band, source, x) -> EnvelopeReport:
    """max |phi_nu(x)| / envelope over the band's modes and the sample points."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if len(band) == 0 or x.size == 0:
        return EnvelopeReport(0.0, (), math.nan, 0)
    ratio = np.sqrt(source.modes_sq(band.modes, x)) / envelope(band, source, x)
    j, i = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    nu = band.members[j].nu
    return EnvelopeReport(float(ratio[j, i]), (nu.n, nu.k), float(x[i]), int(ratio.size))


def shadow_ratio(band: Band, source, x, alpha: float = 0.1):
    """Largest |phi| / envelope at points deeper than lambda^(-2/3+alpha) inside the shadow r < mu."""
    if band.kind != "disk":
        raise DomainError("shadow-side check is implemented for the disk chart")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if len(band) == 0:
        return 0.0
    mus = band.member_mus()
    deep = (mus[:, None] - x[None, :]) > band.lam ** (-2.0 / 3.0 + alpha)
    if not deep.any():
        return 0.0
    ratio = np.sqrt(source.modes_sq(band.modes, x)) / envelope(band, source, x)
    return float(np.max(ratio[deep]))


# --- boundary decomposition --------------------------------------------------

@dataclass
class ABCResult:
    r: float
    eta: float
    alpha: float
    threshold: float   # lambda^(-2/3 + alpha)
    upper: float       # max(2 eta, threshold)
    sum_a: float
    sum_b: float
    sum_c: float
    count_a: int
    count_b: int
    count_c: int
    total: float

    def as_dict(self):
        return dict(self.__dict__)


def abc_decomposition(band: Band, source, r: float, alpha: float = 0.1) -> ABCResult:
    """Split S(r) by the position of r relative to each caustic mu_j.

    A: r - mu < -t (shadow side), B: -t <= r - mu <= max(2 eta, t), C: r - mu > max(2 eta, t),
    with t = lambda^(-2/3+alpha) and eta = 1 - r.  Ties go to B so the three sets partition the band.
    """
    if band.kind != "disk":
        raise DomainError("the boundary decomposition is defined for disk bands")
    if not (0.0 < r <= 1.0):
        raise DomainError("r must lie in (0, 1]")
    eta = 1.0 - r
    t = band.lam ** (-2.0 / 3.0 + alpha)
    upper = max(2.0 * eta, t)
    if len(band) == 0:
        return ABCResult(r, eta, alpha, t, upper, 0.0, 0.0, 0.0, 0, 0, 0, 0.0)
    terms = band.weights * band.multiplicities * source.modes_sq(band.modes, [r])[:, 0]
    d = r - band.member_mus()
    in_a = d < -t
    in_c = d > upper
    in_b = ~in_a & ~in_c
    return ABCResult(r, eta, alpha, t, upper, float(terms[in_a].sum()), float(terms[in_b].sum()),
                     float(terms[in_c].sum()), int(in_a.sum()), int(in_b.sum()), int(in_c.sum()),
                     float(terms.sum()))


def run_report(band: Band, region: Region, result: SumResult, checks: dict | None = None, extra=None) -> dict:
    """Per-run JSON-ready record."""
    out = {"lambda": band.lam, "delta": band.delta, "region": region.as_dict(), "sup": result.sup_value,
           "argmax": result.argmax, "counts": {"modes": len(band), "cardinality": band.cardinality},
           "mu_convention": band.mu_convention, "checks": checks or {}}
    if extra:
        out.update(extra)
    return out


def write_report(path, report: dict):
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=_jsonable)


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    if hasattr(v, "as_dict"):
        return v.as_dict()
    raise TypeError(type(v))
