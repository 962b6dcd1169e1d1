import math

import numpy as np
import pytest
from scipy import integrate

from caustica import revolution as rv
from caustica.cutoff import default_delta
from caustica.specfun import DomainError

ROUND = rv.round_sphere()
PERT = rv.perturbed(0.1)


def _legendre_error(lam):
    l = round((-1 + math.sqrt(1 + 4 * lam * lam)) / 2)
    return abs(lam - math.sqrt(l * (l + 1))) / lam


def test_round_sphere_matches_legendre():
    worst, count = 0.0, 0
    for n in range(0, 51, 5):
        modes = rv.radial_spectrum(ROUND, n, (10.0, 100.0), cells=8000, vectors=False)
        # one eigenvalue for every l with n <= l and sqrt(l(l+1)) in the window
        expected = [l for l in range(max(n, 1), 101) if 10 <= math.sqrt(l * (l + 1)) <= 100]
        assert len(modes) == len(expected)
        worst = max(worst, max(_legendre_error(m.nu.lam) for m in modes))
        count += len(modes)
    assert count > 500
    assert worst <= 1e-6


def test_second_order_convergence():
    # raw (unextrapolated) eigenvalue error falls by ~4 per doubling
    exact = 20 * 21
    errs = []
    for cells in (1000, 2000, 4000):
        m = [m for m in rv.radial_spectrum(ROUND, 10, (20, 21), cells=cells, vectors=False)][0]
        errs.append(abs(m.raw_eigenvalue - exact))
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    assert all(3.8 < r < 4.2 for r in ratios)


def test_indices_and_residual():
    modes = rv.radial_spectrum(ROUND, 10, (20, 30), cells=8000)
    for m in modes:
        l = round((-1 + math.sqrt(1 + 4 * m.nu.lam ** 2)) / 2)
        assert m.nu.k == l - 10 + 1
        # ||T w - lambda^2 w|| / lambda^2 at the rounding level of T (||T|| ~ 4/h^2)
        assert m.residual <= 1e-12 * (4 / m.h ** 2) / m.nu.lam ** 2 * 10


def test_resolution_error():
    with pytest.raises(rv.ResolutionError):
        rv.radial_spectrum(ROUND, 3, (10, 100), cells=500)


def test_empty_beyond_cone():
    assert rv.radial_spectrum(PERT, 60, (20.0, 50.0)) == []
    assert rv.radial_spectrum(ROUND, 5, (0.5, 2.0)) == []  # below the potential floor l >= 5


def test_modes_inside_cone():
    lam = 80.0
    for m in rv.rev_band_spectrum(PERT, lam, default_delta(lam)):
        assert abs(m.nu.n) < PERT.A * m.nu.lam


def test_constant_mode():
    m = rv.radial_spectrum(ROUND, 0, (0.0, 1.0), cells=4000)[0]
    assert m.nu.lam ** 2 < 1e-8  # lambda^2 = 0 up to roundoff
    s = np.linspace(0.3, math.pi - 0.3, 50)
    np.testing.assert_allclose(rv.rev_eigenfunction_sq(m, s), 1 / (4 * math.pi), rtol=1e-6)


@pytest.mark.parametrize("profile,n,window", [(ROUND, 0, (9.0, 10.0)), (ROUND, 7, (20.0, 21.0)),
                                               (PERT, 3, (15.0, 16.5)), (PERT, 12, (30.0, 31.5))])
def test_surface_integral(profile, n, window):
    m = rv.radial_spectrum(profile, n, window, cells=4000)[0]
    s = np.linspace(0, profile.L, 400001)
    dens = rv.rev_eigenfunction_sq(m, s) * profile.a(s) * 2 * math.pi
    assert integrate.trapezoid(dens, s) == pytest.approx(1.0, abs=1e-6)


def test_round_sphere_parity():
    for n, window in [(0, (9.0, 10.0)), (4, (12.0, 13.0)), (9, (17.0, 18.0))]:
        m = rv.radial_spectrum(ROUND, n, window, cells=8000)[0]
        s = np.linspace(0.2, 1.4, 40)
        v1 = rv.rev_eigenfunction_sq(m, s)
        v2 = rv.rev_eigenfunction_sq(m, math.pi - s)
        assert np.max(np.abs(v1 - v2)) <= 1e-8 * max(1.0, np.max(v1))


def test_outside_domain_is_zero():
    m = rv.radial_spectrum(ROUND, 30, (40.0, 42.0))[0]
    assert m.s_lo > 0.05
    assert rv.rev_eigenfunction_sq(m, 0.01) == 0.0


def test_round_band_closed_form():
    lam = 100.3
    delta = default_delta(lam)
    modes = rv.rev_band_spectrum(ROUND, lam, delta, cells=8000)
    lo, hi = lam - 2 * delta, lam + 2 * delta
    ls = [l for l in range(1, 200) if lo < math.sqrt(l * (l + 1)) < hi]
    expected = {(n, l) for l in ls for n in range(0, min(l, int(0.95 * hi)) + 1)}
    got = set()
    for m in modes:
        l = round((-1 + math.sqrt(1 + 4 * m.nu.lam ** 2)) / 2)
        assert _legendre_error(m.nu.lam) <= 1e-6
        got.add((m.nu.n, l))
    assert got == expected


@pytest.mark.slow
@pytest.mark.parametrize("lam", [100.0, 200.0])
def test_perturbed_band_injective(lam):
    modes = rv.rev_band_spectrum(PERT, lam, default_delta(lam))
    ns = [m.nu.n for m in modes]
    assert ns and len(ns) == len(set(ns))


def test_validate_examples():
    assert rv.validate_profile(ROUND).ok
    rep = rv.validate_profile(PERT)
    assert rep.ok and rep.A == pytest.approx(1.0191, abs=1e-4)
    bad = rv.RevolutionProfile(lambda s: np.sin(2 * s), lambda s: 2 * np.cos(2 * s),
                               lambda s: -4 * np.sin(2 * s), math.pi, "sin2s")
    rep = rv.validate_profile(bad)
    assert not rep.ok
    assert any("posit" in clause for clause, _ in rep.failures)


def test_round_caustics():
    sm, sp = rv.rev_caustics(ROUND, 0.5)
    assert sm == pytest.approx(math.pi / 6, abs=1e-12)
    assert sp == pytest.approx(5 * math.pi / 6, abs=1e-12)
    with pytest.raises(DomainError):
        rv.rev_caustics(ROUND, 1.0)


def test_caustic_residual_and_spacing():
    mus = np.linspace(0.2 * PERT.A, 0.9 * PERT.A, 60)
    sm = []
    for mu in mus:
        a, b = rv.rev_caustics(PERT, mu)
        assert abs(PERT.a(a) - mu) <= 1e-12 and abs(PERT.a(b) - mu) <= 1e-12
        assert a < PERT.s_max < b
        sm.append(a)
    # |s(mu) - s(mu')| >= c |mu - mu'|: a' is bounded on [0, s_max] so 1/a' >= 1/max a'
    ratio = np.abs(np.diff(sm)) / np.diff(mus)
    assert ratio.min() >= 1 / np.max(np.abs(PERT.da(np.linspace(0, PERT.L, 1001)))) - 1e-9


def test_action_round_closed_form():
    mus = np.linspace(0.02, 0.98, 49)
    np.testing.assert_allclose(rv.action(ROUND, mus), 1 - mus, atol=1e-10)


@pytest.mark.parametrize("profile", [ROUND, PERT])
def test_action_decreasing(profile):
    curve = rv.action_curve(profile, count=201)
    assert np.all(np.diff(curve.I1) < 0)
    assert rv.action(profile, np.array([0.999 * profile.A]))[0] < 0.02


def test_genericity_verdicts():
    assert rv.genericity_check(ROUND).verdict == "degenerate-flat"
    rep = rv.genericity_check(PERT)
    assert rep.verdict == "generic"
    assert rep.max_curvature > 1e-3
    for inf in rep.inflections:
        assert inf["nondegenerate"]


def test_parse_profile():
    assert rv.parse_profile("round").name == ROUND.name
    p = rv.parse_profile("perturbed(0.05)")
    assert p.a(1.0) == pytest.approx(math.sin(1.0) + 0.05 * math.sin(2.0))
    with pytest.raises(ValueError):
        rv.parse_profile("ellipsoid")


def test_table_profile(tmp_path):
    s = np.linspace(0, math.pi, 801)
    path = tmp_path / "p.csv"
    np.savetxt(path, np.column_stack([s, np.sin(s), np.cos(s), -np.sin(s)]), delimiter=",", header="s,a,da,dda")
    p = rv.parse_profile(f"table:{path}")
    assert rv.validate_profile(p).ok
    x = np.linspace(0.1, 3.0, 30)
    np.testing.assert_allclose(p.a(x), np.sin(x), atol=1e-9)
