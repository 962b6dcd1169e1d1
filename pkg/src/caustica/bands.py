"""Bands of the joint spectrum and the lattice diagnostics run on them."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .cutoff import DEFAULT_CUTOFF, CutoffSpec


class UnsupportedError(ValueError):
    """The requested check does not apply to this spectrum source."""


@dataclass(frozen=True)
class BandMember:
    mode: object
    weight: float
    multiplicity: int

    @property
    def nu(self):
        return self.mode.nu


@dataclass
class Band:
    lam: float
    delta: float
    members: list
    kind: str
    A: float
    mu_convention: str = "mode"
    mus: np.ndarray = field(init=False)
    mu_counts: np.ndarray = field(init=False)

    def __post_init__(self):
        vals = self.member_mus()
        mult = np.array([m.multiplicity for m in self.members], dtype=np.int64)
        if vals.size:
            self.mus, inv = np.unique(vals, return_inverse=True)
            self.mu_counts = np.bincount(inv, weights=mult).astype(np.int64)
        else:
            self.mus = np.zeros(0)
            self.mu_counts = np.zeros(0, dtype=np.int64)

    def member_mus(self):
        """mu per member: |n|/lambda_nu ("mode") or |n|/lambda at the band level ("level")."""
        ns = np.abs(self.ns).astype(float)
        if self.mu_convention == "level":
            return ns / self.lam
        return ns / self.lams if len(self.members) else np.zeros(0)

    @property
    def modes(self):
        return [m.mode for m in self.members]

    @property
    def ns(self):
        return np.array([m.nu.n for m in self.members], dtype=np.int64)

    @property
    def ks(self):
        return np.array([m.nu.k for m in self.members], dtype=np.int64)

    @property
    def lams(self):
        return np.array([m.nu.lam for m in self.members], dtype=float)

    @property
    def weights(self):
        return np.array([m.weight for m in self.members], dtype=float)

    @property
    def multiplicities(self):
        return np.array([m.multiplicity for m in self.members], dtype=np.int64)

    @property
    def cardinality(self):
        """Number of eigenfunctions in the band, counting +-n separately."""
        return int(self.multiplicities.sum())

    def __len__(self):
        return len(self.members)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["lambda_nu", "n", "k", "mu", "weight", "multiplicity"])
            for m, mu in zip(self.members, self.member_mus()):
                out.writerow([repr(m.nu.lam), m.nu.n, m.nu.k, repr(float(mu)), repr(m.weight), m.multiplicity])


def assemble_band(source, lam: float, delta: float | None = None, cutoff: CutoffSpec = DEFAULT_CUTOFF,
                  mu_convention: str = "mode") -> Band:
    """Weights phi((lambda_nu - lam)/delta)^2 for every mode the source returns in the cutoff support."""
    if mu_convention not in ("mode", "level"):
        raise ValueError("mu_convention must be 'mode' or 'level'")
    delta = lam ** (-1.0 / 3.0) if delta is None else float(delta)
    modes = source.band_modes(lam, delta, cutoff)
    members = []
    for mode in modes:
        w = float(cutoff.weight(mode.nu.lam, lam, delta))
        if w > 0.0:
            members.append(BandMember(mode, w, mode.multiplicity))
    return Band(float(lam), delta, members, source.kind, float(source.A), mu_convention)


def band_from_members(lam, delta, members, kind="synthetic", A=1.0, mu_convention="mode") -> Band:
    return Band(float(lam), float(delta), list(members), kind, float(A), mu_convention)


# --- gap lemma ---------------------------------------------------------------

@dataclass
class GapReport:
    injective: bool
    checked: int
    violations: list  # (n, count) for every n carried by more than one member
    min_n_gap: float

    def as_dict(self):
        return {"injective": self.injective, "checked": self.checked,
                "violations": [list(v) for v in self.violations], "min_n_gap": self.min_n_gap}


def check_gap(band: Band, cone_eps: float = 0.05) -> GapReport:
    """Injectivity of mode -> n inside the cone |n| <= (A - cone_eps) lambda."""
    ns = np.abs(band.ns)
    inside = ns <= (band.A - cone_eps) * band.lam
    ns = ns[inside]
    values, counts = np.unique(ns, return_counts=True)
    violations = [(int(v), int(c)) for v, c in zip(values, counts) if c > 1]
    if ns.size < 2:
        gap = math.inf
    else:
        gap = float(np.min(np.diff(np.sort(ns))))
    return GapReport(not violations, int(ns.size), violations, gap)


# --- caustic spacing ---------------------------------------------------------

@dataclass
class SpacingReport:
    region: tuple
    normalization: str
    count: int
    min_gap: float
    normalized_gap: float
    trivial: bool
    mu_convention: str

    def as_dict(self):
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def boundary_window(lam: float, eps: float | None = None):
    """[1 - 2 eps, 1 - eps/2] with eps = lambda^(-1/3) by default."""
    eps = lam ** (-1.0 / 3.0) if eps is None else eps
    return 1.0 - 2.0 * eps, 1.0 - 0.5 * eps


def check_caustic_spacing(band: Band, region, normalization: str = "interior", eps: float | None = None) -> SpacingReport:
    """Minimal adjacent gap of the caustic parameters inside ``region``.

    ``interior`` scales the gap by lambda, ``boundary`` by lambda eps^(1/2)
    (the refined spacing near mu = 1).  Fewer than two caustics is a trivial pass.
    """
    lo, hi = float(region[0]), float(region[1])
    if normalization not in ("interior", "boundary"):
        raise ValueError("normalization must be 'interior' or 'boundary'")
    mus = np.sort(band.member_mus())
    mus = mus[(mus >= lo) & (mus <= hi)]
    if mus.size < 2:
        return SpacingReport((lo, hi), normalization, int(mus.size), math.inf, math.inf, True, band.mu_convention)
    gap = float(np.min(np.diff(mus)))
    scale = band.lam
    if normalization == "boundary":
        eps = band.lam ** (-1.0 / 3.0) if eps is None else eps
        scale *= math.sqrt(eps)
    return SpacingReport((lo, hi), normalization, int(mus.size), gap, gap * scale, False, band.mu_convention)


# --- Bessel-zero asymptotics (disk only) -------------------------------------

@dataclass
class ZeroAsymptoticsReport:
    ok: bool
    count: int
    n_min: int
    max_scaled_residual: float  # max n |lambda - n - n F(a_k / n^(2/3))|
    max_residual: float
    residual_bound: float       # C / n_min
    constant: float
    max_argument: float
    max_pair_ratio: float       # max n1^(1/3) |a_k1 - a_k2| / (n2 - n1)
    pair_constant: float | None

    def as_dict(self):
        return dict(self.__dict__)


def check_zero_asymptotics(band: Band, n_min_fraction: float = 0.3, constant: float | None = None,
                           pair_constant: float | None = None, argument_bound: float = 20.0) -> ZeroAsymptoticsReport:
    """Residuals of the Olver form lambda_{k,n} = n + n F(a_k/n^(2/3)) + O(1/n) over the cone n >= c lambda.

    ``constant`` defaults to twice the constant of :func:`specfun.olver_fit`.
    The pair ratio is always reported and asserted only when ``pair_constant`` is given.
    """
    if band.kind != "disk":
        raise UnsupportedError(f"zero asymptotics apply to disk bands only, not {band.kind!r}")
    constant = 2.0 * specfun.olver_fit().constant if constant is None else constant
    ns = band.ns
    keep = ns >= max(1.0, n_min_fraction * band.lam)
    ns, ks, lams = ns[keep], band.ks[keep], band.lams[keep]
    if ns.size == 0:
        return ZeroAsymptoticsReport(True, 0, 0, 0.0, 0.0, math.inf, constant, 0.0, 0.0, pair_constant)
    a = specfun.airy_zeros(ks)
    t = a / ns ** (2.0 / 3.0)
    res = np.abs(lams - ns - ns * specfun.olver_F(np.minimum(t, 100.0)))
    scaled = float(np.max(res * ns))
    n_min = int(ns.min())
    order = np.argsort(ns)
    ns_o, a_o = ns[order].astype(float), a[order]
    ratio = 0.0
    if ns.size > 1:
        dn = ns_o[None, :] - ns_o[:, None]
        upper = dn > 0
        num = ns_o[:, None] ** (1.0 / 3.0) * np.abs(a_o[:, None] - a_o[None, :])
        ratio = float(np.max(np.where(upper, num / np.where(upper, dn, 1.0), 0.0)))
    ok = scaled <= constant and float(t.max()) <= argument_bound
    if pair_constant is not None:
        ok = ok and ratio <= pair_constant
    return ZeroAsymptoticsReport(bool(ok), int(ns.size), n_min, scaled, float(res.max()), constant / n_min,
                                 constant, float(t.max()), ratio, pair_constant)
