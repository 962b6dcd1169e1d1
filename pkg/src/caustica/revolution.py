"""Simple metrics of revolution ds^2 + a(s)^2 dtheta^2 on the sphere.

Separated modes are ``psi(s) e^{i n theta}`` with
``-(a psi')'/a + n^2/a^2 psi = lambda^2 psi``.  The radial operator is
discretised in flux form on a cell-centred uniform grid and symmetrised by
the Liouville variable ``w = sqrt(a) psi``; the pole faces carry zero flux
because ``a`` vanishes there, so no boundary condition is needed at a pole.
Reported eigenvalues are Richardson-extrapolated from grids N and 2N; the
raw scheme is second order.
"""

from __future__ import annotations

import csv
import functools
import hashlib
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import interpolate, optimize

from . import tridiag
from .cutoff import DEFAULT_CUTOFF, CutoffSpec
from .disk import JointEigenvalue
from .specfun import DomainError


class ResolutionError(ValueError):
    """Grid too coarse for the requested eigenvalue window."""


# --- profiles ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RevolutionProfile:
    a: Callable
    da: Callable
    dda: Callable
    L: float
    name: str
    A: float = field(init=False)
    s_max: float = field(init=False)

    def __post_init__(self):
        s = np.linspace(0.0, self.L, 20001)
        i = int(np.argmax(self.a(s)))
        s_max = float(s[i])
        lo, hi = s[max(i - 1, 0)], s[min(i + 1, s.size - 1)]
        if self.da(lo) > 0 > self.da(hi):
            s_max = optimize.brentq(self.da, lo, hi, xtol=1e-15)
        object.__setattr__(self, "s_max", s_max)
        object.__setattr__(self, "A", float(self.a(s_max)))


def round_sphere() -> RevolutionProfile:
    return RevolutionProfile(np.sin, np.cos, lambda s: -np.sin(s), math.pi, "round")


def perturbed(eps: float = 0.1) -> RevolutionProfile:
    """a(s) = sin s + eps sin 2s on [0, pi]."""
    return RevolutionProfile(
        lambda s: np.sin(s) + eps * np.sin(2 * s),
        lambda s: np.cos(s) + 2 * eps * np.cos(2 * s),
        lambda s: -np.sin(s) - 4 * eps * np.sin(2 * s),
        math.pi,
        f"perturbed({eps:g})",
    )


def from_table(path) -> RevolutionProfile:
    """Profile from a CSV with columns s, a, a', a'' (header optional)."""
    path = Path(path)
    rows = []
    with path.open(newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rows.append([float(x) for x in row[:4]])
            except ValueError:
                continue  # header
    data = np.array(rows)
    if data.ndim != 2 or data.shape[1] < 4 or data.shape[0] < 4:
        raise ValueError(f"{path}: need at least 4 rows of s, a, a', a''")
    s, a, da, dda = data.T
    if s[0] != 0.0 or np.any(np.diff(s) <= 0):
        raise ValueError(f"{path}: s must start at 0 and increase")
    a_spline = interpolate.CubicHermiteSpline(s, a, da)
    da_spline = interpolate.CubicHermiteSpline(s, da, dda)
    dda_spline = da_spline.derivative()
    digest = hashlib.sha256(path.read_bytes()).hexdigest()[:16]
    return RevolutionProfile(a_spline, da_spline, dda_spline, float(s[-1]), f"table:{digest}")


_PERTURBED_RE = re.compile(r"^perturbed\(\s*([-+0-9.eE]+)\s*\)$")


def parse_profile(spec: str) -> RevolutionProfile:
    spec = spec.strip()
    if spec == "round":
        return round_sphere()
    if spec == "perturbed":
        return perturbed()
    m = _PERTURBED_RE.match(spec)
    if m:
        return perturbed(float(m.group(1)))
    if spec.startswith("table:"):
        return from_table(spec[len("table:"):])
    raise ValueError(f"unknown profile {spec!r}; expected round, perturbed(eps) or table:PATH")


@dataclass
class ValidationReport:
    ok: bool
    failures: list
    s_max: float
    A: float

    def __bool__(self):
        return self.ok


def validate_profile(profile: RevolutionProfile, points: int = 20001, tol: float = 1e-10) -> ValidationReport:
    """Check a(0)=a(L)=0, a>0 inside, and a single nondegenerate critical point."""
    s = np.linspace(0.0, profile.L, max(points, 10001))
    a = np.asarray(profile.a(s), dtype=float)
    da = np.asarray(profile.da(s), dtype=float)
    failures = []
    if abs(a[0]) > tol or abs(a[-1]) > tol:
        failures.append(("endpoints", f"a(0)={a[0]:.3g}, a(L)={a[-1]:.3g}"))
    inner = a[1:-1]
    if np.any(inner <= 0):
        where = s[1:-1][inner <= 0]
        failures.append(("positivity", f"a <= 0 at {where.size} interior points, first s={where[0]:.6g}"))
    signs = np.sign(da)
    changes = np.nonzero(signs[1:] * signs[:-1] < 0)[0]
    exact = np.nonzero(signs[1:-1] == 0)[0]
    n_crit = changes.size + exact.size
    if n_crit != 1:
        failures.append(("single_critical_point", f"a' changes sign {n_crit} times"))
    else:
        dda = float(profile.dda(profile.s_max))
        if not dda < 0:
            failures.append(("nondegenerate_maximum", f"a''(s_max)={dda:.3g} is not negative"))
    return ValidationReport(not failures, failures, profile.s_max, profile.A)


# --- radial discretisation ---------------------------------------------------

@functools.lru_cache(maxsize=32)
def _grid(profile: RevolutionProfile, cells: int):
    h = profile.L / cells
    faces = np.arange(cells + 1) * h
    centres = faces[:-1] + 0.5 * h
    af = np.asarray(profile.a(faces), dtype=float).copy()
    af[0] = af[-1] = 0.0
    ac = np.asarray(profile.a(centres), dtype=float)
    return h, centres, af, ac


def _operator(profile, cells, n, i0, i1):
    h, _, af, ac = _grid(profile, cells)
    a = ac[i0:i1]
    left = af[i0:i1].copy()
    right = af[i0 + 1:i1 + 1].copy()
    # ghost cell psi = -psi_boundary doubles the flux through a truncation face
    left[0] *= 2.0
    right[-1] *= 2.0
    d = (left + right) / (h * h * a) + (n * n) / (a * a)
    e = -af[i0 + 1:i1] / (h * h * np.sqrt(a[:-1] * a[1:]))
    return d, e


def _truncation(profile, cells, n, hi, factor, decay):
    """Cell range [i0, i1) kept for angular momentum n; Dirichlet at the cut faces.

    A side is cut where the barrier n^2/a^2 exceeds factor*hi^2 *and* the
    WKB decay integral from the turning point has reached ``decay``.
    """
    h, _, _, ac = _grid(profile, cells)
    if n == 0:
        return 0, cells
    excess = (n * n) / (ac * ac) - hi * hi
    forbidden = excess > 0
    root = np.sqrt(np.where(forbidden, excess, 0.0)) * h
    i_max = int(np.argmax(ac))
    barrier = (n * n) / (ac * ac) > factor * hi * hi
    # left side, walking from the equator towards s = 0
    left = np.cumsum(root[:i_max + 1][::-1])[::-1]
    ok_left = np.nonzero(barrier[:i_max + 1] & (left >= decay))[0]
    i0 = int(ok_left[-1]) + 1 if ok_left.size else 0
    right = np.cumsum(root[i_max:])
    ok_right = np.nonzero(barrier[i_max:] & (right >= decay))[0]
    i1 = i_max + int(ok_right[0]) if ok_right.size else cells
    if i1 - i0 < 3:
        return i_max, i_max
    return i0, i1


@dataclass(eq=False)
class RevolutionMode:
    nu: JointEigenvalue
    w: np.ndarray
    s_lo: float
    h: float
    raw_eigenvalue: float
    residual: float
    profile: RevolutionProfile

    @property
    def multiplicity(self):
        return 1 if self.nu.n == 0 else 2

    @property
    def fold_type(self):
        """n = 0 tori have the poles as their only caustic, which is not of fold type."""
        return self.nu.n != 0

    @property
    def grid(self):
        return self.s_lo, self.h, self.w.size


def _interp_norm_sq(v, h):
    """Exact int w^2 ds of the piecewise-linear interpolant used by rev_eigenfunction_sq.

    Nodes sit at cell centres; the interpolant falls to 0 half a cell beyond each end.
    """
    inner = np.sum(v[:-1] ** 2 + v[:-1] * v[1:] + v[1:] ** 2) * h / 3.0
    ends = (v[0] ** 2 + v[-1] ** 2) * (0.5 * h) / 3.0
    return float(inner + ends)


def default_cells(profile, hi, lambda_h=0.05, minimum=2000):
    return max(minimum, int(math.ceil(profile.L * hi / lambda_h)))


def radial_spectrum(profile: RevolutionProfile, n: int, window, cells: int | None = None,
                    truncation_factor: float = 4.0, decay: float = 36.0, vectors: bool = True,
                    cache=None) -> list:
    """Modes with lambda in [lo, hi] for angular momentum ``n``.

    ``cells`` is the coarse grid size N over [0, L]; the fine grid is 2N.
    """
    lo, hi = float(window[0]), float(window[1])
    if not (0 <= lo < hi):
        raise DomainError("window must satisfy 0 <= lo < hi")
    n = abs(int(n))
    if n >= profile.A * hi:
        return []
    cells = cells or default_cells(profile, hi)
    if profile.L / cells * hi > 0.1:
        raise ResolutionError(f"lambda*h = {profile.L / cells * hi:.3g} > 0.1; increase the grid")
    key = None
    if cache is not None:
        key = (profile.name, n, cells, lo, hi)
        hit = cache.get_eigen(*key)
    else:
        hit = None
    i0, i1 = _truncation(profile, cells, n, hi, truncation_factor, decay)
    if i1 - i0 < 3:
        return []
    dc, ec = _operator(profile, cells, n, i0, i1)
    df, ef = _operator(profile, 2 * cells, n, 2 * i0, 2 * i1)
    if hit is None:
        h_f = profile.L / (2 * cells)
        margin = hi * hi * (hi * h_f) ** 2 / 4.0 + 1e-12
        glo, ghi = tridiag.gershgorin(dc, ec)
        e_lo = max(lo * lo - margin, glo - 1.0)
        e_hi = hi * hi + margin
        c_lo = tridiag.sturm_count(df, ef, e_lo)
        c_hi = tridiag.sturm_count(df, ef, e_hi)
        if c_hi > c_lo:
            fine = tridiag.bisect_indices(df, ef, c_lo, c_hi, glo - 1.0, ghi + 1.0)
            coarse = tridiag.bisect_indices(dc, ec, c_lo, c_hi, glo - 1.0, ghi + 1.0)
        else:
            fine = coarse = np.zeros(0)
        idx = np.arange(c_lo, c_hi)
        if cache is not None:
            cache.put_eigen(*key, idx, coarse, fine)
    else:
        idx, coarse, fine = hit
    extrap = (4.0 * fine - coarse) / 3.0
    lam = np.sqrt(np.maximum(extrap, 0.0))
    keep = (lam >= lo) & (lam <= hi)
    modes = []
    h_f = profile.L / (2 * cells)
    s_lo = (2 * i0 + 0.5) * h_f
    for j, lv, ef_j in zip(idx[keep], lam[keep], fine[keep]):
        if vectors:
            v = tridiag.inverse_iteration(df, ef, ef_j)
            res = float(np.linalg.norm(tridiag.tridiag_matvec(df, ef, v) - ef_j * v) / max(ef_j, 1.0))
            w = v / math.sqrt(_interp_norm_sq(v, h_f))
        else:
            w, res = np.zeros(0), float("nan")
        mu = n / lv if lv > 0 else 0.0
        nu = JointEigenvalue(float(lv), n, int(j) + 1, mu)
        modes.append(RevolutionMode(nu, w, s_lo, h_f, float(ef_j), res, profile))
    return modes


def rev_band_spectrum(profile: RevolutionProfile, lam: float, delta: float,
                      cutoff: CutoffSpec = DEFAULT_CUTOFF, cone_eps: float = 0.05,
                      cells: int | None = None, cache=None) -> list:
    """All modes in the open cutoff support window with |n| <= (A - cone_eps)(lam + 2 delta)."""
    if not (0 < cone_eps < profile.A):
        raise DomainError("cone_eps must lie in (0, A)")
    lo, hi = cutoff.window(lam, delta)
    cells = cells or default_cells(profile, hi)
    n_max = int(math.floor((profile.A - cone_eps) * hi))
    modes = []
    for n in range(0, n_max + 1):
        for m in radial_spectrum(profile, n, (lo, hi), cells=cells, cache=cache):
            if lo < m.nu.lam < hi:
                modes.append(m)
    return modes


def rev_eigenfunction_sq(mode: RevolutionMode, s):
    """|phi(s, theta)|^2 = w(s)^2 / (2 pi a(s)); zero outside the kept domain."""
    s = np.asarray(s, dtype=float)
    n = mode.w.size
    xs = np.concatenate(([mode.s_lo - 0.5 * mode.h], mode.s_lo + mode.h * np.arange(n), [mode.s_lo + (n - 0.5) * mode.h]))
    ws = np.concatenate(([0.0], mode.w, [0.0]))
    w = np.interp(s, xs, ws, left=0.0, right=0.0)
    a = np.asarray(mode.profile.a(s), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(a > 0, w * w / (2 * math.pi * a), 0.0)
    return float(out) if out.ndim == 0 else out


def rev_modes_sq(modes, s):
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if not modes:
        return np.zeros((0, s.size))
    return np.vstack([rev_eigenfunction_sq(m, s) for m in modes])


# --- caustics ----------------------------------------------------------------

def rev_caustics(profile: RevolutionProfile, mu: float):
    """The two Clairaut turning circles a(s) = mu, s_minus < s_max < s_plus."""
    mu = abs(float(mu))
    if not (0 < mu < profile.A):
        raise DomainError(f"caustic parameter must lie in (0, A={profile.A:.6g})")
    f = lambda s: float(profile.a(s)) - mu  # noqa: E731
    s_minus = optimize.brentq(f, 0.0, profile.s_max, xtol=1e-15, maxiter=200)
    s_plus = optimize.brentq(f, profile.s_max, profile.L, xtol=1e-15, maxiter=200)
    return s_minus, s_plus


def caustic_distance(profile: RevolutionProfile, mu, s):
    """Arclength distance from s to the nearer caustic circle of parameter mu."""
    s_minus, s_plus = rev_caustics(profile, mu)
    s = np.asarray(s, dtype=float)
    return np.minimum(np.abs(s - s_minus), np.abs(s - s_plus))


# --- action curve and genericity --------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(256)


def _caustics_many(profile, mus):
    """Vectorised turning points for an array of mu in (0, A), by bisection on each branch."""
    mus = np.asarray(mus, dtype=float)
    out = []
    for lo0, hi0, rising in ((0.0, profile.s_max, True), (profile.s_max, profile.L, False)):
        lo = np.full(mus.shape, lo0)
        hi = np.full(mus.shape, hi0)
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            above = np.asarray(profile.a(mid), dtype=float) > mus
            move_hi = above if rising else ~above
            hi = np.where(move_hi, mid, hi)
            lo = np.where(move_hi, lo, mid)
        out.append(0.5 * (lo + hi))
    return out[0], out[1]


def _turning_quadrature(profile, mus):
    s_minus, s_plus = _caustics_many(profile, mus)
    # s = s- + (s+ - s-)(1 - cos phi)/2 absorbs the square-root endpoint behaviour
    phi = 0.5 * math.pi * (_GL_NODES + 1.0)
    half = 0.5 * (s_plus - s_minus)[:, None]
    s = s_minus[:, None] + half * (1.0 - np.cos(phi))[None, :]
    jac = half * (np.sin(phi) * 0.5 * math.pi * _GL_WEIGHTS)[None, :]
    return s, jac


def action(profile: RevolutionProfile, mu):
    """I1(mu) = (1/pi) int_{a >= |mu|} sqrt(1 - mu^2/a^2) ds."""
    mus = np.abs(np.atleast_1d(np.asarray(mu, dtype=float)))
    out = np.full(mus.shape, profile.L / math.pi)
    inner = mus > 0
    if inner.any():
        s, jac = _turning_quadrature(profile, mus[inner])
        a = np.asarray(profile.a(s), dtype=float)
        m = mus[inner][:, None]
        out[inner] = np.sum(np.sqrt(np.maximum(1.0 - (m / a) ** 2, 0.0)) * jac, axis=1) / math.pi
    return float(out[0]) if np.ndim(mu) == 0 else out


def action_slope(profile: RevolutionProfile, mu):
    """dI1/dmu = -(mu/pi) int ds / (a sqrt(a^2 - mu^2))."""
    mus = np.abs(np.atleast_1d(np.asarray(mu, dtype=float)))
    s, jac = _turning_quadrature(profile, mus)
    a = np.asarray(profile.a(s), dtype=float)
    m = mus[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = np.where(a > m, 1.0 / (a * np.sqrt(a * a - m * m)), 0.0)
    out = -mus / math.pi * np.sum(integrand * jac, axis=1)
    return float(out[0]) if np.ndim(mu) == 0 else out


def _curvature(profile, mus, dmu):
    slope = action_slope(profile, mus)
    second = (action_slope(profile, mus + dmu) - action_slope(profile, mus - dmu)) / (2 * dmu)
    # x = I1(mu), y = mu: kappa = (x' y'' - y' x'') / (x'^2 + y'^2)^1.5 with y' = 1, y'' = 0
    return slope, -second / (1.0 + slope ** 2) ** 1.5


@dataclass
class ActionCurve:
    mu: np.ndarray
    I1: np.ndarray
    slope: np.ndarray
    curvature: np.ndarray


def action_curve(profile: RevolutionProfile, mu_lo_frac=0.02, mu_hi_frac=0.98, count=801,
                 dmu_frac=1e-3) -> ActionCurve:
    """Samples of I1 and the signed curvature of the planar curve (I1(mu), mu)."""
    A = profile.A
    mus = np.linspace(mu_lo_frac * A, mu_hi_frac * A, count)
    slope, kappa = _curvature(profile, mus, dmu_frac * A)
    return ActionCurve(mus, action(profile, mus), slope, kappa)


@dataclass
class GenericityReport:
    verdict: str
    inflections: list
    max_curvature: float
    curve: ActionCurve = field(repr=False)

    def as_dict(self):
        return {"verdict": self.verdict, "max_curvature": self.max_curvature,
                "inflections": [dict(x) for x in self.inflections]}


def genericity_check(profile: RevolutionProfile, count: int = 801, flat_floor: float = 1e-6,
                     zero_rel: float = 1e-10, slope_rel: float = 1e-6) -> GenericityReport:
    """Inflection points of {q1 = 1}, i.e. zeros of the curvature of mu -> (I1(mu), mu).

    Verdicts: ``degenerate-flat`` (curvature below the noise floor
    everywhere), ``generic`` (every zero transversal, or none),
    ``degenerate`` (a zero with vanishing derivative) or ``inconclusive``
    (a zero at the edge of the scanned range).
    """
    curve = action_curve(profile, count=count)
    kappa = curve.curvature
    kmax = float(np.max(np.abs(kappa)))
    if kmax < flat_floor:
        return GenericityReport("degenerate-flat", [], kmax, curve)
    mus = curve.mu
    dmu = 1e-3 * profile.A

    def kappa_at(m):
        return float(_curvature(profile, np.array([m]), dmu)[1][0])

    inflections = []
    verdict = "generic"
    scale = kmax / profile.A
    sign = np.sign(kappa)
    near_zero = np.abs(kappa) < zero_rel * kmax
    candidates = set(np.nonzero(sign[1:] * sign[:-1] < 0)[0].tolist())
    candidates |= set(np.nonzero(near_zero)[0].tolist())
    for i in sorted(candidates):
        j = min(i + 1, mus.size - 1)
        if sign[i] * sign[j] < 0:
            root = optimize.brentq(kappa_at, mus[i], mus[j], xtol=1e-12)
        else:
            root = float(mus[i])
        step = 5 * dmu
        dk = (kappa_at(root + step) - kappa_at(root - step)) / (2 * step)
        nondeg = abs(dk) >= slope_rel * scale
        edge = i <= 1 or j >= mus.size - 2
        inflections.append({"mu": root, "dkappa_dmu": dk, "nondegenerate": bool(nondeg), "at_edge": bool(edge)})
        if edge:
            verdict = "inconclusive"
        elif not nondeg and verdict == "generic":
            verdict = "degenerate"
    return GenericityReport(verdict, inflections, kmax, curve)
