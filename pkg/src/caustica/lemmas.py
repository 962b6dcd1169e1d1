"""Lemma-level checks at a single level lambda, with JSON-ready verdicts."""

from __future__ import annotations

import math

import numpy as np

from . import bands, frozen, norms

PASS, FAIL, UNSUPPORTED, REPORTED = "pass", "fail", "unsupported", "reported"


def _verdict(name, ok, /, **values):
    return {"check": name, "status": PASS if ok else FAIL, **values}


def disk_lemmas(source, lam: float, delta: float | None = None, cone_eps: float = 0.05, alpha: float = 0.1,
                boundary_region=(0.9, 1.0)) -> list:
    band = bands.assemble_band(source, lam, delta)
    out = []
    gap = bands.check_gap(band, cone_eps)
    out.append(_verdict("gap", gap.injective, **gap.as_dict()))

    inner = bands.check_caustic_spacing(band, (0.3, 0.9), "interior")
    bound = frozen.lower(frozen.DISK_SPACING_INTERIOR)
    out.append(_verdict("caustic_spacing_interior", inner.trivial or inner.normalized_gap >= bound,
                        bound=bound, **inner.as_dict()))
    edge = bands.check_caustic_spacing(band, bands.boundary_window(lam), "boundary")
    bound = frozen.lower(frozen.DISK_SPACING_BOUNDARY)
    out.append(_verdict("caustic_spacing_boundary", edge.trivial or edge.normalized_gap >= bound,
                        bound=bound, **edge.as_dict()))

    zero = bands.check_zero_asymptotics(band, pair_constant=frozen.upper(frozen.DISK_PAIR_RATIO))
    out.append(_verdict("zero_asymptotics", zero.ok, **zero.as_dict()))

    dist = float(np.min(1.0 - band.member_mus())) * lam ** (2.0 / 3.0) if len(band) else math.inf
    bound = frozen.lower(frozen.DISK_BOUNDARY_DISTANCE)
    out.append(_verdict("boundary_distance", dist >= bound, min_scaled=dist, bound=bound))

    interior = norms.Region.annulus(0.3, 0.7)
    env = norms.envelope_ratio(band, source, norms.region_grid(band, source, interior))
    bound = frozen.upper(frozen.DISK_ENVELOPE)
    out.append(_verdict("envelope", env.max_ratio <= bound, bound=bound, region=[0.3, 0.7], **env.as_dict()))

    grid = norms.region_grid(band, source, norms.Region.annulus(*boundary_region))
    frac = sig_c = 0.0
    complete = True
    for r in grid:
        part = norms.abc_decomposition(band, source, float(r), alpha)
        s = float(norms.projector_sum(band, source, [r])[0])
        complete &= abs(part.sum_a + part.sum_b + part.sum_c - s) <= 1e-12 * max(s, 1e-300)
        if part.total > 0:
            frac = max(frac, part.sum_a / part.total)
        sig_c = max(sig_c, part.sum_c / lam ** (8.0 / 9.0))
    frac_bound = frozen.upper(frozen.DISK_SIGMA_A_FRACTION)
    c_bound = frozen.upper(frozen.DISK_SIGMA_C)
    out.append(_verdict("abc_partition", bool(complete), points=int(grid.size)))
    out.append(_verdict("abc_sigma_a", frac <= frac_bound, max_fraction=frac, bound=frac_bound, alpha=alpha))
    out.append(_verdict("abc_sigma_c", sig_c <= c_bound, max_scaled=sig_c, bound=c_bound, alpha=alpha))
    return out


def revolution_lemmas(source, lam: float, region: norms.Region, delta: float | None = None,
                      cone_eps: float = 0.05) -> list:
    band = bands.assemble_band(source, lam, delta)
    out = []
    gap = bands.check_gap(band, cone_eps)
    out.append(_verdict("gap", gap.injective, **gap.as_dict()))
    A = source.A
    spacing = bands.check_caustic_spacing(band, (0.2 * A, 0.9 * A), "interior")
    out.append(_verdict("caustic_spacing_interior", spacing.trivial or spacing.normalized_gap > 0, **spacing.as_dict()))
    # geodesic spacing of the turning circles against the mu gap
    mus = np.sort(band.member_mus())
    mus = mus[(mus >= 0.2 * A) & (mus <= 0.9 * A)]
    if mus.size >= 2:
        d = source.caustic_distance(mus, [0.0])[:, 0]  # s_minus for every mu, measured from the pole
        ratio = float(np.min(np.abs(np.diff(d)) / np.diff(mus)))
    else:
        ratio = math.inf
    out.append(_verdict("caustic_geodesic_spacing", ratio > 0, min_ratio=ratio))
    out.append({"check": "zero_asymptotics", "status": UNSUPPORTED, "reason": "disk bands only"})
    env = norms.envelope_ratio(band, source, norms.region_grid(band, source, region))
    out.append({"check": "envelope", "status": REPORTED, **env.as_dict()})
    out.append({"check": "abc_decomposition", "status": UNSUPPORTED, "reason": "boundary split is a disk statement"})
    return out


def failed(results) -> bool:
    return any(r["status"] == FAIL for r in results)
