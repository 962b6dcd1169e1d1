import csv
import math
from dataclasses import dataclass

import numpy as np
import pytest

from caustica import bands, frozen
from caustica.cutoff import CutoffSpec
from caustica.disk import JointEigenvalue
from caustica.surfaces import DiskSurface, RevolutionSurface, log_grid
from caustica import revolution as rv

DISK = DiskSurface()


@dataclass(frozen=True)
class FakeMode:
    nu: JointEigenvalue
    multiplicity: int = 2


def _member(lam, n, k=1, weight=1.0):
    return bands.BandMember(FakeMode(JointEigenvalue.make(lam, n, k)), weight, 2)


def test_weights_and_support():
    lam = 700.0
    band = bands.assemble_band(DISK, lam)
    d = band.delta
    assert d == pytest.approx(lam ** (-1 / 3))
    off = np.abs(band.lams - lam)
    assert np.all((band.weights > 0) & (band.weights <= 1))
    assert np.all(off < 2 * d)
    assert np.all(band.weights[off <= d] == 1.0)
    assert np.all(np.diff(band.mus) > 0)
    assert band.mu_counts.sum() == band.cardinality


def test_weight_falls_off_toward_support_edge():
    band = bands.assemble_band(DISK, 900.0)
    off = np.abs(band.lams - band.lam) / band.delta
    outer = off > 1
    # on the transition the weight is a decreasing function of the offset
    order = np.argsort(off[outer])
    assert np.all(np.diff(band.weights[outer][order]) <= 0)
    assert CutoffSpec()(2.0 - 1e-3) ** 2 < 1e-100


def test_mu_conventions_agree():
    lam = 1000.0
    a = bands.assemble_band(DISK, lam, mu_convention="mode")
    b = bands.assemble_band(DISK, lam, mu_convention="level")
    diff = np.abs(a.member_mus() - b.member_mus())
    assert diff.max() <= 2 * lam ** (-4 / 3)
    with pytest.raises(ValueError):
        bands.assemble_band(DISK, lam, mu_convention="other")


def test_band_count_at_500():
    band = bands.assemble_band(DISK, 500.0)
    lo, hi = frozen.DISK_COUNT_RANGE
    assert lo / 2 <= band.cardinality / 500 ** (2 / 3) <= 2 * hi


@pytest.mark.parametrize("lam", [100.0, 200.0, 400.0, 800.0, 1600.0, 2000.0])
def test_disk_gap_injective(lam):
    rep = bands.check_gap(bands.assemble_band(DISK, lam))
    assert rep.injective and rep.min_n_gap >= 1 and not rep.violations


def test_gap_detects_duplicate():
    m = _member(100.05, 30, 5)
    band = bands.band_from_members(100.0, 0.2, [m, m, _member(100.1, 31, 5)])
    rep = bands.check_gap(band)
    assert not rep.injective
    assert rep.violations == [(30, 2)]
    assert rep.min_n_gap == 0


def test_gap_ignores_members_outside_cone():
    band = bands.band_from_members(100.0, 0.2, [_member(100.0, 97), _member(100.1, 97, 2), _member(100.0, 10)])
    assert bands.check_gap(band, cone_eps=0.05).injective


def test_spacing_synthetic_equispaced():
    lam, step = 400.0, 0.0125
    members = [_member(lam, round(mu * lam)) for mu in np.arange(0.3, 0.9, step)]
    band = bands.band_from_members(lam, 0.1, members, mu_convention="level")
    rep = bands.check_caustic_spacing(band, (0.3, 0.9))
    assert rep.min_gap == pytest.approx(step, abs=1e-12)
    assert rep.normalized_gap == pytest.approx(step * lam, abs=1e-9)
    edge = bands.check_caustic_spacing(band, (0.3, 0.9), "boundary", eps=0.04)
    assert edge.normalized_gap == pytest.approx(step * lam * 0.2, abs=1e-9)


def test_spacing_trivial_pass():
    band = bands.band_from_members(400.0, 0.1, [_member(400.0, 200)])
    rep = bands.check_caustic_spacing(band, (0.3, 0.9))
    assert rep.trivial and rep.count == 1 and rep.normalized_gap == math.inf
    with pytest.raises(ValueError):
        bands.check_caustic_spacing(band, (0.3, 0.9), "other")


def test_boundary_window():
    lo, hi = bands.boundary_window(1000.0)
    assert lo == pytest.approx(0.8) and hi == pytest.approx(0.95)


@pytest.mark.parametrize("lam", [200.0, 1000.0, 2000.0])
def test_disk_spacing_above_frozen(lam):
    band = bands.assemble_band(DISK, lam)
    inner = bands.check_caustic_spacing(band, (0.3, 0.9))
    edge = bands.check_caustic_spacing(band, bands.boundary_window(lam), "boundary")
    assert inner.normalized_gap >= frozen.lower(frozen.DISK_SPACING_INTERIOR)
    assert edge.trivial or edge.normalized_gap >= frozen.lower(frozen.DISK_SPACING_BOUNDARY)


@pytest.mark.parametrize("lam", [500.0, 1000.0])
def test_zero_asymptotics_disk(lam):
    rep = bands.check_zero_asymptotics(bands.assemble_band(DISK, lam),
                                       pair_constant=frozen.upper(frozen.DISK_PAIR_RATIO))
    assert rep.ok and rep.count > 10
    assert rep.max_residual <= rep.residual_bound
    assert rep.max_argument <= 20


def test_zero_asymptotics_unsupported_for_revolution():
    src = RevolutionSurface(rv.perturbed())
    band = bands.band_from_members(60.0, 0.25, [_member(60.0, 20)], kind="revolution")
    with pytest.raises(bands.UnsupportedError):
        bands.check_zero_asymptotics(band)
    assert src.kind == "revolution"


def test_count_scaling_slope():
    lams = log_grid(125, 2000, 16)
    counts = [bands.assemble_band(DISK, lam).cardinality for lam in lams]
    slope = np.polyfit(np.log(lams), np.log(counts), 1)[0]
    assert abs(slope - 2 / 3) <= 0.05


def test_band_csv(tmp_path):
    band = bands.assemble_band(DISK, 150.0)
    path = tmp_path / "band.csv"
    band.to_csv(path)
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(band)
    assert set(rows[0]) == {"lambda_nu", "n", "k", "mu", "weight", "multiplicity"}
    assert float(rows[0]["lambda_nu"]) == band.lams[0]
