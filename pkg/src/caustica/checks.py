"""Self-check suite for the special functions, shared by the CLI and the acceptance tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun

AI_0 = 0.35502805388781723926
AI_PRIME_0 = -0.25881940379280679840
A_1 = 2.33810741045976704
J0_ZERO_1 = 2.40482555769577277


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    bound: float
    detail: str = ""

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name:<34s} value={self.value:.3e}  bound={self.bound:.3e}  {self.detail}".rstrip()

    def as_dict(self):
        return dict(self.__dict__)


def _le(name, value, bound, detail=""):
    value = float(value)
    return CheckResult(name, bool(value <= bound), value, float(bound), detail)


def airy_ode_residual(x, h=1e-3):
    """|Ai'' - x Ai| with Ai'' from central differences at steps h and 2h, Richardson-combined."""
    x = np.asarray(x, dtype=float)
    ai = specfun.airy_ai

    def d2(step):
        return (ai(x + step) - 2.0 * ai(x) + ai(x - step)) / step ** 2

    second = (4.0 * d2(h) - d2(2.0 * h)) / 3.0
    return np.abs(second - x * ai(x))


def bessel_recurrence_residual(n, x):
    """|J_{n-1} + J_{n+1} - (2n/x) J_n| relative to the largest of the three terms."""
    n = np.asarray(n, dtype=float)
    x = np.asarray(x, dtype=float)
    jm, j0, jp = specfun.bessel_j(n - 1, x), specfun.bessel_j(n, x), specfun.bessel_j(n + 1, x)
    scale = np.maximum.reduce([np.abs(jm), np.abs(jp), np.abs(2 * n / x * j0)])
    res = np.abs(jm + jp - 2 * n / x * j0)
    return np.where(scale > 0, res / np.where(scale > 0, scale, 1.0), 0.0)


def specfun_suite(seed: int = 20240517) -> list:
    rng = np.random.default_rng(seed)
    out = [
        _le("Ai(0)", abs(specfun.airy_ai(0.0) - AI_0), 1e-12),
        _le("Ai'(0)", abs(specfun.airy_ai_prime(0.0) - AI_PRIME_0), 1e-12),
        _le("Ai(10) small", specfun.airy_ai(10.0), 1e-9),
        _le("Airy ODE residual [-20, 5]", np.max(airy_ode_residual(rng.uniform(-20.0, 5.0, 200))), 1e-8,
            "200 random x, Richardson FD h=1e-3"),
        _le("a_1", abs(specfun.airy_zero(1) - A_1), 1e-10),
    ]
    table = specfun.airy_zero_table()
    z = np.asarray(table.zeros)
    k = np.arange(1, z.size + 1)
    centre = (3 * math.pi * (4 * k - 1) / 8) ** (2.0 / 3.0)
    out.append(_le("Airy zeros increasing", 0.0 if np.all(np.diff(z) > 0) else 1.0, 0.0, f"k <= {z.size}"))
    out.append(_le("Airy zeros in bracket", np.max(np.abs(z - centre)), 1.0))
    out.append(_le("Airy zero residual", np.max(np.abs(specfun.airy_ai(-z))), 1e-12))
    out.append(_le("J_0 zero 1", abs(specfun.bessel_zero(0, 1).value - J0_ZERO_1), 1e-10))
    n = rng.integers(1, 1001, 500)
    x = rng.uniform(1e-3, 2000.0, 500)
    out.append(_le("Bessel recurrence residual", np.max(bessel_recurrence_residual(n, x)), 1e-9,
                   "500 random (n, x), n <= 1000, x <= 2000"))
    ns = rng.integers(0, 300, 200)
    ks = rng.integers(1, 200, 200)
    zeros = specfun.bessel_zeros(ns, ks)
    out.append(_le("Bessel zero residual", np.max(np.abs(specfun.bessel_j(ns, zeros))), 1e-12, "200 random (n, k)"))
    out.append(_le("Bessel zeros exceed order", 0.0 if np.all(zeros > ns) else 1.0, 0.0))
    out.append(_le("p0(0) = 1", abs(specfun.olver_p0(0.0) - 1.0), 1e-15))
    t = np.linspace(0.0, 5.0, 501)
    h = 1e-4
    slope = (specfun.olver_p0(t + h) - specfun.olver_p0(t)) / h
    out.append(_le("p0' >= 2^(-1/3)", 2 ** (-1 / 3) - 1e-6 - np.min(slope), 0.0))
    fit = specfun.olver_fit()
    out.append(_le("Olver slope", fit.slope, -0.9, f"n in {list(fit.orders)}, C={fit.constant:.4g}"))
    return out
