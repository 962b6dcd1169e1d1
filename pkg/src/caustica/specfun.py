"""Airy and Bessel functions, their zeros, and Olver's uniform zero map.

Away from the oscillatory tail the Airy function is taken from
``scipy.special.airy``.  For ``x < -12`` the classical asymptotic series is
summed here with a double-double phase, which keeps the relative error near
machine precision out to ``|x| = 1e6`` where a plain double phase loses
about ``|x|**1.5 * eps``.

Zeros are 1-based: ``airy_zero(1) = 2.3381...`` (magnitude convention,
``Ai(-a_k) = 0``) and ``bessel_zero(0, 1).value = 2.4048...``.
"""

from __future__ import annotations

import functools
import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "DomainError",
    "ConvergenceError",
    "AiryZeroTable",
    "BesselZero",
    "airy_ai",
    "airy_ai_prime",
    "airy_zero",
    "airy_zeros",
    "airy_zero_table",
    "bessel_j",
    "bessel_j_prime",
    "bessel_zero",
    "bessel_zeros",
    "bessel_zeros_in_interval",
    "bessel_phase_count",
    "olver_p0",
    "olver_F",
    "olver_p0_inverse",
    "zero_solve_count",
]


class DomainError(ValueError):
    """Argument outside the domain where a function is defined or supported."""


class ConvergenceError(ArithmeticError):
    """An iterative solver failed; ``payload`` carries the last iterate."""

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload or {}


# Test hook: added to every airy_ai value.  Must stay 0 outside fault-injection tests.
_AIRY_PERTURBATION = 0.0

_ASYMPTOTIC_CUTOFF = -12.0

_TWO_PI = (6.283185307179586, 2.4492935982947064e-16)
_QUARTER_PI = (0.7853981633974483, 3.061616997868383e-17)
_TWO_THIRDS = (0.6666666666666666, 3.700743415417188e-17)
_SPLITTER = 134217729.0  # 2**27 + 1


# --- double-double helpers (Dekker); numpy never fuses multiply-add ----------

def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _dd_mul(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    e = e + (ah * bl + al * bh)
    return _quick_two_sum(p, e)


def _dd_sqrt(y):
    s = np.sqrt(y)
    p, e = _two_prod(s, s)
    r = ((y - p) - e) / (2.0 * s)
    return _quick_two_sum(s, r)


def _oscillatory_phase(z):
    """Return (zeta, sin, cos) of zeta - pi/4 for zeta = (2/3) z**1.5, z > 0."""
    sh, sl = _dd_sqrt(z)
    ph, pl = _dd_mul(z, 0.0, sh, sl)
    zh, zl = _dd_mul(ph, pl, *_TWO_THIRDS)
    th, tl = _two_sum(zh, -_QUARTER_PI[0])
    tl = tl + (zl - _QUARTER_PI[1])
    th, tl = _quick_two_sum(th, tl)
    m = np.round(th / _TWO_PI[0])
    mh, ml = _two_prod(m, _TWO_PI[0])
    rh, rl = _two_sum(th, -mh)
    rl = rl + (tl - ml - m * _TWO_PI[1])
    rh, rl = _quick_two_sum(rh, rl)
    s = np.sin(rh) + np.cos(rh) * rl
    c = np.cos(rh) - np.sin(rh) * rl
    return zh, s, c


@functools.lru_cache(maxsize=1)
def _asymptotic_coefficients(count=40):
    u = [1.0]
    for k in range(1, count):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216.0 * k * (2 * k - 1)))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, count)]
    return np.array(u), np.array(v)


def _series_pair(coef, zeta):
    """Sum the even/odd alternating series in 1/zeta with error-bounded truncation.

    Terms are added while they decrease; the remainder is below the first
    omitted term, so the loop stops once that drops under 1e-17 relative.
    """
    zeta = np.asarray(zeta, dtype=float)
    inv = 1.0 / zeta
    even = np.zeros_like(zeta)
    odd = np.zeros_like(zeta)
    power = np.ones_like(zeta)
    prev = np.full_like(zeta, np.inf)
    active = np.ones(zeta.shape, dtype=bool)
    for k in range(len(coef)):
        term = coef[k] * power
        mag = np.abs(term)
        active &= mag < prev
        sign = 1.0 if (k // 2) % 2 == 0 else -1.0
        if k % 2 == 0:
            even = np.where(active, even + sign * term, even)
        else:
            odd = np.where(active, odd + sign * term, odd)
        active &= mag > 1e-17
        if not active.any():
            break
        prev = mag
        power = power * inv
    return even, odd


def _airy_oscillatory(x):
    z = -x
    zeta, s, c = _oscillatory_phase(z)
    u, v = _asymptotic_coefficients()
    pe, po = _series_pair(u, zeta)
    qe, qo = _series_pair(v, zeta)
    amp = 1.0 / math.sqrt(math.pi)
    ai = amp * z ** -0.25 * (c * pe + s * po)
    aip = amp * z ** 0.25 * (s * qe - c * qo)
    return ai, aip


def _check_airy_arg(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("Airy argument must be finite")
    if np.any(np.abs(x) > 1e6):
        raise DomainError("Airy argument outside |x| <= 1e6")
    return x


def _airy_both(x):
    x = _check_airy_arg(x)
    ai, aip, _, _ = special.airy(x)
    ai = np.array(ai, dtype=float)
    aip = np.array(aip, dtype=float)
    tail = x < _ASYMPTOTIC_CUTOFF
    if np.any(tail):
        ai_t, aip_t = _airy_oscillatory(x[tail])
        ai[tail] = ai_t
        aip[tail] = aip_t
    return ai, aip


def _unwrap(value, like):
    return float(value) if np.ndim(like) == 0 else value


def airy_ai(x):
    """Ai(x) for real ``x`` (scalar or array)."""
    ai, _ = _airy_both(x)
    return _unwrap(ai + _AIRY_PERTURBATION, x)


def airy_ai_prime(x):
    """Ai'(x) for real ``x`` (scalar or array)."""
    _, aip = _airy_both(x)
    return _unwrap(aip, x)


# --- Airy zeros --------------------------------------------------------------

def _airy_zero_guess(k):
    t = 3.0 * np.pi * (4.0 * np.asarray(k, dtype=float) - 1.0) / 8.0
    t2 = t ** -2
    return t ** (2.0 / 3.0) * (1.0 + t2 * (5.0 / 48 + t2 * (-5.0 / 36 + t2 * (77125.0 / 82944 - t2 * 108056875.0 / 6967296))))


def airy_zeros(k):
    """Vectorised ``airy_zero``; ``k`` is an integer array of 1-based indices."""
    k = np.asarray(k)
    if np.any(k < 1):
        raise IndexError("Airy zero index is 1-based; got k < 1")
    if np.any(k > 10 ** 6):
        raise DomainError("Airy zero index above 1e6")
    a = _airy_zero_guess(k)
    for _ in range(20):
        ai, aip = _airy_both(-a)
        step = ai / aip
        a = a + step
        if np.all(np.abs(step) <= 4e-16 * a):
            break
    else:
        raise ConvergenceError("Airy zero Newton did not converge", {"k": k, "a": a})
    # one more pass polishes the last ulp
    ai, aip = _airy_both(-a)
    return a + ai / aip


def airy_zero(k: int) -> float:
    """Magnitude of the k-th zero of Ai (1-based)."""
    if int(k) != k:
        raise IndexError("Airy zero index must be an integer")
    return float(airy_zeros(np.array([int(k)]))[0])


@dataclass(frozen=True)
class AiryZeroTable:
    zeros: tuple
    count: int

    def __getitem__(self, k):
        """1-based lookup."""
        if k < 1 or k > self.count:
            raise IndexError(f"Airy zero index {k} outside 1..{self.count}")
        return self.zeros[k - 1]


@functools.lru_cache(maxsize=8)
def airy_zero_table(count: int = 2000) -> AiryZeroTable:
    zeros = airy_zeros(np.arange(1, count + 1))
    return AiryZeroTable(tuple(float(z) for z in zeros), count)


# --- Bessel J ----------------------------------------------------------------

def _check_bessel_args(n, x):
    n = np.asarray(n)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("Bessel argument must be finite")
    if np.any(x < 0):
        raise DomainError("bessel_j takes x >= 0; use J_n(-x) = (-1)^n J_n(x)")
    if np.any(n < 0):
        raise DomainError("bessel_j takes n >= 0; use J_{-n} = (-1)^n J_n")
    return n, x


def bessel_j(n, x):
    """J_n(x) for integer ``n >= 0`` and ``x >= 0`` (broadcasting)."""
    n, x = _check_bessel_args(n, x)
    return _unwrap(special.jv(n, x), np.broadcast(n, x))


def bessel_j_prime(n, x):
    """J_n'(x) = (J_{n-1}(x) - J_{n+1}(x)) / 2, with J_{-1} = -J_1."""
    n, x = _check_bessel_args(n, x)
    return _unwrap(special.jvp(n, x), np.broadcast(n, x))


# --- Olver's uniform map -----------------------------------------------------

def _olver_lhs(z):
    """sqrt(z^2-1) - arccos(1/z) = w - arctan(w) with w = sqrt(z^2-1), series for small w."""
    z = np.asarray(z, dtype=float)
    w = np.sqrt(np.maximum((z - 1.0) * (z + 1.0), 0.0))
    w2 = w * w
    # w^3/3 - w^5/5 + w^7/7 - ...; 30 terms reach double precision for w < 0.5
    series = np.zeros_like(w)
    for j in range(29, -1, -1):
        series = (-1) ** j / (2 * j + 3) + w2 * series
    series = w * w2 * series
    return np.where(w < 0.5, series, w - np.arctan(w))


def olver_p0(t):
    """z >= 1 with sqrt(z**2 - 1) - arccos(1/z) = (2/3) t**1.5.

    The first zeros of J_n then sit at ``n * olver_p0(a_k / n**(2/3)) + O(1/n)``.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t_arr)) or np.any(t_arr < 0) or np.any(t_arr > 100):
        raise DomainError("olver_p0 takes 0 <= t <= 100")
    rhs = (2.0 / 3.0) * t_arr ** 1.5
    lo = np.ones_like(t_arr)
    hi = rhs + 1.0 + np.pi / 2
    # near z = 1 the lhs is (2*sqrt(2)/3) (z-1)**1.5
    z = np.where(t_arr < 1.0, 1.0 + 2.0 ** (-1.0 / 3.0) * t_arr, rhs + np.pi / 2)
    z = np.clip(z, lo, hi)
    for _ in range(100):
        g = _olver_lhs(z) - rhs
        lo = np.where(g < 0, z, lo)
        hi = np.where(g > 0, z, hi)
        dg = np.sqrt(z * z - 1.0) / z
        with np.errstate(divide="ignore", invalid="ignore"):
            znew = z - g / dg
        bad = ~np.isfinite(znew) | (znew <= lo) | (znew >= hi)
        znew = np.where(bad, 0.5 * (lo + hi), znew)
        done = np.abs(znew - z) <= 1e-15 * znew
        z = znew
        if np.all(done | (hi - lo <= 4e-16 * hi)):
            break
    else:
        raise ConvergenceError("olver_p0 did not converge", {"t": t_arr, "z": z})
    z = np.where(t_arr == 0, 1.0, z)
    return _unwrap(z, t)


def olver_F(t):
    """p0(t) - 1."""
    return _unwrap(np.asarray(olver_p0(t)) - 1.0, t)


def olver_p0_inverse(z):
    """Closed-form inverse of ``olver_p0`` for z >= 1."""
    z = np.asarray(z, dtype=float)
    return _unwrap((1.5 * np.maximum(_olver_lhs(z), 0.0)) ** (2.0 / 3.0), z)


def bessel_phase_count(n, x):
    """Smooth count of zeros of J_n below x: (sqrt(x^2-n^2) - n arccos(n/x))/pi + 1/4.

    Equals k up to a small offset at the k-th zero, so it gives zero indices
    without any root finding.  Zero for x <= n.
    """
    n = np.asarray(n, dtype=float)
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(x > 0, n / np.where(x > 0, x, 1.0), 1.0)
        val = (np.sqrt(np.maximum(x * x - n * n, 0.0)) - n * np.arccos(np.minimum(ratio, 1.0))) / np.pi + 0.25
    return _unwrap(np.where(x > n, val, 0.0), np.broadcast(n, x))


# --- Bessel zeros ------------------------------------------------------------

@dataclass(frozen=True)
class BesselZero:
    n: int
    k: int
    value: float


_solve_lock = threading.Lock()
_solve_count = 0


def zero_solve_count() -> int:
    """Number of Bessel zeros refined by Newton since import (instrumentation)."""
    return _solve_count


def _bump(count):
    global _solve_count
    with _solve_lock:
        _solve_count += count


def _bessel_zero_guess(n, k):
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    beta = (k + 0.5 * n - 0.25) * np.pi
    m4 = 4.0 * n * n
    mcmahon = beta - (m4 - 1.0) / (8.0 * beta) - 4.0 * (m4 - 1.0) * (7.0 * m4 - 31.0) / (3.0 * (8.0 * beta) ** 3)
    safe_n = np.where(n > 0, n, 1.0)
    a = airy_zeros(k.astype(np.int64))
    t = a / safe_n ** (2.0 / 3.0)
    olver = np.where(n > 0, safe_n * olver_p0(np.minimum(t, 100.0)), 0.0)
    # t > 100 only happens for k >> n, where McMahon's expansion is the better start
    return np.where((n == 0) | (t > 100.0), mcmahon, olver)


def bessel_zeros(n, k, max_iter: int = 50):
    """Vectorised zeros: ``n`` and ``k`` broadcast to a common shape.

    Each zero is bracketed by the midpoints to its neighbours' asymptotic
    guesses and refined by Newton, falling back to bisection whenever a step
    leaves the bracket.
    """
    n, k = np.broadcast_arrays(np.asarray(n, dtype=np.int64), np.asarray(k, dtype=np.int64))
    if np.any(k < 1):
        raise IndexError("Bessel zero index is 1-based; got k < 1")
    if np.any(n < 0):
        raise DomainError("bessel_zero takes n >= 0")
    shape = n.shape
    n = n.ravel()
    k = k.ravel()
    if n.size == 0:
        return np.zeros(shape)
    g = _bessel_zero_guess(n, k)
    g_next = _bessel_zero_guess(n, k + 1)
    g_prev = np.where(k > 1, _bessel_zero_guess(n, np.maximum(k - 1, 1)), 2 * g - g_next)
    lo = np.maximum(0.5 * (g_prev + g), n.astype(float))
    hi = 0.5 * (g + g_next)
    f_lo = special.jv(n, lo)
    x = g.copy()
    it = 0
    converged = np.zeros(n.shape, dtype=bool)
    while it < max_iter:
        it += 1
        fx = special.jv(n, x)
        dfx = special.jvp(n, x)
        same = np.sign(fx) == np.sign(f_lo)
        lo = np.where(same & ~converged, x, lo)
        f_lo = np.where(same & ~converged, fx, f_lo)
        hi = np.where(~same & ~converged, x, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = fx / dfx
        done = (np.abs(step) <= 1e-14 * x) | (fx == 0)
        xn = x - step
        outside = ~np.isfinite(xn) | (xn < lo) | (xn > hi)
        xn = np.where(outside, 0.5 * (lo + hi), xn)
        x = np.where(converged | done, np.where(done & ~converged, xn, x), xn)
        converged |= done
        if converged.all():
            break
    if not converged.all():
        bad = ~converged
        raise ConvergenceError(
            "Bessel zero Newton did not converge",
            {"n": n[bad].tolist(), "k": k[bad].tolist(), "x": x[bad].tolist(), "iterations": it},
        )
    _bump(n.size)
    return x.reshape(shape)


def bessel_zero(n: int, k: int) -> BesselZero:
    """k-th positive zero of J_n (1-based)."""
    if k < 1:
        raise IndexError("Bessel zero index is 1-based; got k < 1")
    value = float(bessel_zeros(np.array([n]), np.array([k]))[0])
    return BesselZero(int(n), int(k), value)


def _index_range(n, lo, hi):
    k_lo = max(1, int(math.floor(float(bessel_phase_count(n, lo)))) - 1)
    k_hi = int(math.ceil(float(bessel_phase_count(n, hi)))) + 1
    return k_lo, k_hi


def bessel_zeros_in_interval(n: int, lo: float, hi: float) -> list:
    """All zeros of J_n in [lo, hi], ascending."""
    if not (0 <= lo < hi):
        raise DomainError("need 0 <= lo < hi")
    if hi <= n:
        return []
    k_lo, k_hi = _index_range(n, lo, hi)
    ks = np.arange(k_lo, k_hi + 1)
    values = bessel_zeros(np.full(ks.shape, n), ks)
    return [BesselZero(int(n), int(kk), float(v)) for kk, v in zip(ks, values) if lo <= v <= hi]


# --- Olver residual fit ------------------------------------------------------

OLVER_ORDERS = (50, 100, 200, 400, 800)


@dataclass(frozen=True)
class OlverFit:
    """max_k |lambda_{k,n} - n p0(a_k / n^(2/3))| against n, fitted on log-log axes."""

    orders: tuple
    max_residuals: tuple
    max_argument: float
    slope: float
    constant: float  # max over the sample of n * residual


def olver_fit(orders=OLVER_ORDERS, t_max: float = 2.0) -> OlverFit:
    residuals = []
    arg = 0.0
    for n in orders:
        count = max(1, int(np.searchsorted(airy_zeros(np.arange(1, 4 * n + 2)), t_max * n ** (2.0 / 3.0), side="right")))
        ks = np.arange(1, count + 1)
        t = airy_zeros(ks) / n ** (2.0 / 3.0)
        z = bessel_zeros(np.full(ks.shape, n), ks)
        residuals.append(float(np.max(np.abs(z - n * olver_p0(t)))))
        arg = max(arg, float(t.max()))
    slope = float(np.polyfit(np.log(orders), np.log(residuals), 1)[0])
    constant = max(r * n for r, n in zip(residuals, orders))
    return OlverFit(tuple(orders), tuple(residuals), arg, slope, constant)
