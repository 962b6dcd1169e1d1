"""End-to-end acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import math
import time

import numpy as np
import pytest

from caustica import bands, checks, cli, norms, specfun, sweep
from caustica import revolution as rv
from caustica.cache import Cache
from caustica.surfaces import DiskSurface, RevolutionSurface, log_grid

pytestmark = pytest.mark.slow

LAMS = log_grid(125, 2000, 16)
CAL = log_grid(125, 500, 8)
CHK = log_grid(500, 2000, 8)


@pytest.fixture(scope="module")
def cache_path(tmp_path_factory):
    return tmp_path_factory.mktemp("cache") / "zeros.bin"


@pytest.fixture(scope="module")
def disk(cache_path):
    return DiskSurface(cache=Cache(cache_path))


@pytest.fixture(scope="module")
def interior_table(disk):
    return sweep.run_sweep(disk, LAMS, norms.Region.annulus(0.3, 0.7), sweep.SweepOptions(workers=4))


def test_01_special_function_oracles(verdict):
    t0 = time.perf_counter()
    j0 = specfun.bessel_zero(0, 1).value
    a1 = specfun.airy_zero(1)
    suite = checks.specfun_suite()
    elapsed = time.perf_counter() - t0
    ok = (abs(j0 - 2.40482555769577) <= 1e-10 and abs(a1 - 2.33810741045977) <= 1e-10
          and all(r.passed for r in suite) and elapsed < 10)
    verdict(1, "special-function oracles", ok,
            f"|j01 err| {abs(j0 - 2.40482555769577):.1e}, |a1 err| {abs(a1 - 2.33810741045977):.1e}, "
            f"suite {sum(r.passed for r in suite)}/{len(suite)}, {elapsed:.1f}s")
    assert ok


def test_02_olver_residual_slope(verdict):
    t0 = time.perf_counter()
    fit = specfun.olver_fit()
    elapsed = time.perf_counter() - t0
    ok = fit.slope <= -0.9 and fit.max_argument <= 2.0 and elapsed < 60
    verdict(2, "Olver residual O(1/n)", ok,
            f"slope {fit.slope:.4f} <= -0.9 over n {list(fit.orders)}, {elapsed:.1f}s")
    assert ok


def test_03_gap_lemma(interior_table, verdict):
    t0 = time.perf_counter()
    violations = sum(not r.gap_ok for r in interior_table.rows)
    ok = interior_table.failures == 0 and violations == 0 and len(interior_table) == 16
    verdict(3, "gap lemma, disk", ok, f"{violations} violations over {len(interior_table)} bands, "
            f"sweep wall {sum(r.wall_time for r in interior_table.rows):.1f}s")
    assert ok and time.perf_counter() - t0 < 300


def test_04_band_count(interior_table, verdict):
    counts = np.array([r.band_count for r in interior_table.rows], dtype=float)
    slope = np.polyfit(np.log(interior_table.lambdas), np.log(counts), 1)[0]
    ok = abs(slope - 2 / 3) <= 0.05
    verdict(4, "band count ~ lambda^(2/3)", ok, f"slope {slope:.4f} (2/3 +- 0.05)")
    assert ok


def _spacing(disk, lam):
    band = bands.assemble_band(disk, lam)
    inner = bands.check_caustic_spacing(band, (0.3, 0.9), "interior")
    edge = bands.check_caustic_spacing(band, bands.boundary_window(lam), "boundary")
    return inner.normalized_gap, (math.inf if edge.trivial else edge.normalized_gap)


def test_05_caustic_spacing_frozen(disk, verdict):
    cal = np.array([_spacing(disk, lam) for lam in CAL])
    chk = np.array([_spacing(disk, lam) for lam in CHK])
    c = cal.min(axis=0)
    got = chk.min(axis=0)
    ok = bool(np.all(c > 0) and np.all(got >= c / 2))
    verdict(5, "caustic spacing, frozen constants", ok,
            f"interior c={c[0]:.3f} check min {got[0]:.3f}; boundary c'={c[1]:.3f} check min {got[1]:.3f}")
    assert ok


def test_06_envelope_no_growth(disk, verdict):
    region = norms.Region.annulus(0.3, 0.7)
    ratios = {}
    for lam in (125.0, 250.0, 500.0, 1000.0, 2000.0):
        band = bands.assemble_band(disk, lam)
        ratios[lam] = norms.envelope_ratio(band, disk, norms.region_grid(band, disk, region)).max_ratio
    growth = max(ratios.values()) / ratios[125.0]
    ok = growth < 2
    verdict(6, "Airy envelope, no growth", ok,
            "ratios " + ", ".join(f"{v:.3f}" for v in ratios.values()) + f"; growth x{growth:.3f} < 2")
    assert ok


def test_07_interior_exponent(interior_table, verdict):
    fit = sweep.fit_exponent(interior_table)
    limit = 5 / 12 + 0.03
    lev = sweep.leverage(interior_table)
    ok = fit.slope <= limit and fit.count == 16
    verdict(7, "interior disk exponent", ok,
            f"slope {fit.slope:.4f} <= {limit:.4f} (16 levels), leverage {lev:.4f}")
    assert ok


def _abc(disk, lam, alpha=0.1):
    band = bands.assemble_band(disk, lam)
    grid = norms.region_grid(band, disk, norms.Region.annulus(0.9, 1.0))
    frac = sig_c = 0.0
    for r in grid:
        p = norms.abc_decomposition(band, disk, float(r), alpha)
        if p.total > 0:
            frac = max(frac, p.sum_a / p.total)
        sig_c = max(sig_c, p.sum_c / lam ** (8 / 9))
    return frac, sig_c


def test_08_boundary_exponent_and_abc(disk, verdict):
    table = sweep.run_sweep(disk, LAMS, norms.Region.annulus(0.9, 1.0), sweep.SweepOptions(workers=4))
    fit = sweep.fit_exponent(table)
    limit = 4 / 9 + 0.03
    cal = np.array([_abc(disk, lam) for lam in CAL]).max(axis=0)
    chk = np.array([_abc(disk, lam) for lam in CHK]).max(axis=0)
    ok = fit.slope <= limit and table.failures == 0 and bool(np.all(chk <= 2 * cal))
    verdict(8, "boundary disk exponent + A/B/C", ok,
            f"slope {fit.slope:.4f} <= {limit:.4f}; Sigma_A frac cal {cal[0]:.2e} check {chk[0]:.2e}; "
            f"Sigma_C/l^(8/9) cal {cal[1]:.3f} check {chk[1]:.3f} (<= 2x)")
    assert ok


def test_09_revolution_solver(verdict):
    t0 = time.perf_counter()
    sphere = rv.round_sphere()
    worst = 0.0
    for n in range(0, 51):
        for m in rv.radial_spectrum(sphere, n, (10.0, 100.0), cells=8000, vectors=False):
            l = round((-1 + math.sqrt(1 + 4 * m.nu.lam ** 2)) / 2)
            worst = max(worst, abs(m.nu.lam - math.sqrt(l * (l + 1))) / m.nu.lam)
    errs = []
    for cells in (1000, 2000, 4000):
        m = rv.radial_spectrum(sphere, 10, (20, 21), cells=cells, vectors=False)[0]
        errs.append(abs(m.raw_eigenvalue - 420))
    ratio = errs[1] / errs[2]
    flat = rv.genericity_check(sphere).verdict
    generic = rv.genericity_check(rv.perturbed()).verdict
    elapsed = time.perf_counter() - t0
    ok = (worst <= 1e-6 and 3.5 < ratio < 4.5 and flat == "degenerate-flat" and generic == "generic"
          and elapsed < 300)
    verdict(9, "revolution solver oracle", ok,
            f"max rel err {worst:.1e}, refinement ratio {ratio:.3f}, round {flat}, perturbed {generic}, "
            f"{elapsed:.0f}s")
    assert ok


def test_10_revolution_exponent(tmp_path, verdict):
    t0 = time.perf_counter()
    source = RevolutionSurface(rv.perturbed(), cache=Cache(tmp_path / "eigen.bin"))
    region = norms.Region.s_intervals((0.4, 1.0), (1.8, 2.7))
    table = sweep.run_sweep(source, log_grid(60, 300, 8), region, sweep.SweepOptions(workers=4))
    fit = sweep.fit_exponent(table)
    limit = 5 / 12 + 0.05
    elapsed = time.perf_counter() - t0
    ok = fit.slope <= limit and elapsed < 1800
    verdict(10, "revolution exponent (perturbed)", ok,
            f"slope {fit.slope:.4f} +- {fit.slope_stderr:.4f} <= {limit:.4f} over [60, 300], "
            f"small-lambda corrections visible; {elapsed:.0f}s")
    assert ok


def test_11_infrastructure(tmp_path, monkeypatch, verdict):
    monkeypatch.delenv("CAUSTICA_CACHE", raising=False)
    lams = log_grid(125, 500, 6)
    region = norms.Region.annulus(0.3, 0.7)
    runs = [sweep.run_sweep(DiskSurface(), lams, region),
            sweep.run_sweep(DiskSurface(), lams, region, sweep.SweepOptions(workers=4)),
            sweep.run_sweep(DiskSurface(cache=Cache(tmp_path / "c.bin")), lams, region),
            sweep.run_sweep(DiskSurface(cache=Cache(tmp_path / "c.bin")), lams, region)]
    identical = all(r.data() == runs[0].data() for r in runs)

    good = cli.main(["specfun-check"])
    monkeypatch.setattr(specfun, "_AIRY_PERTURBATION", 1e-6)
    perturbed = cli.main(["specfun-check"])
    monkeypatch.setattr(specfun, "_AIRY_PERTURBATION", 0.0)
    bad = tmp_path / "bad.json"
    bad.write_text('{"surface": "disk", "region": [[0.3, 0.7]], "lambda_min": -1}')
    config = cli.main(["sweep", "--config", str(bad), "--out", str(tmp_path / "none")])
    codes = (good, perturbed, config)
    ok = identical and codes == (0, 1, 2) and not (tmp_path / "none").exists()
    verdict(11, "determinism, cache transparency, exit codes", ok,
            f"bit-identical across serial/threaded/cold/warm: {identical}; exit codes {codes} == (0, 1, 2)")
    assert ok
