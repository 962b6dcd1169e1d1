"""Lambda sweeps, exponent fits and the delta-sweep exploration mode."""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bands, norms
from .cutoff import DEFAULT_CUTOFF, CutoffSpec

log = logging.getLogger(__name__)

FAILURE_LIMIT = 0.2


class InsufficientDataError(ValueError):
    pass


class SweepAborted(RuntimeError):
    def __init__(self, message, table):
        super().__init__(message)
        self.table = table


@dataclass
class SweepOptions:
    delta_exponent: float = -1.0 / 3.0
    delta_scale: float = 1.0
    cutoff: CutoffSpec = DEFAULT_CUTOFF
    cone_eps: float = 0.05
    spacing_region: tuple | None = None
    spacing_normalization: str = "interior"
    mu_convention: str = "mode"
    workers: int = 1

    def delta(self, lam):
        return self.delta_scale * lam ** self.delta_exponent


@dataclass
class SweepRow:
    lam: float
    delta: float
    sup: float = math.nan
    sup_sqrt: float = math.nan
    argmax: float = math.nan
    argmax_on_boundary: bool = False
    band_size: int = 0
    band_count: int = 0
    min_caustic_gap: float = math.nan
    spacing_normalized: float = math.nan
    gap_ok: bool = False
    spacing_trivial: bool = False
    envelope_ratio: float = math.nan
    status: str = "ok"
    error: str = ""
    wall_time: float = field(default=0.0, compare=False)

    @property
    def ok(self):
        return self.status == "ok"


# wall_time is excluded from comparisons and fingerprints: everything else is deterministic
COLUMNS = [f for f in SweepRow.__dataclass_fields__]
DATA_COLUMNS = [c for c in COLUMNS if c != "wall_time"]


@dataclass
class SweepTable:
    rows: list
    surface: str = ""
    region: dict = field(default_factory=dict)

    def __post_init__(self):
        lams = [r.lam for r in self.rows]
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise ValueError("sweep levels must be strictly increasing")

    def __len__(self):
        return len(self.rows)

    @property
    def lambdas(self):
        return np.array([r.lam for r in self.rows])

    @property
    def sup_sqrt(self):
        return np.array([r.sup_sqrt for r in self.rows])

    def ok_rows(self):
        """Rows that produced data (check verdicts are carried separately)."""
        return [r for r in self.rows if r.ok]

    @property
    def failures(self):
        return sum(not r.ok for r in self.rows)

    def data(self):
        """Row tuples without timing, for bit-exact comparisons."""
        return [tuple(getattr(r, c) for c in DATA_COLUMNS) for r in self.rows]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(COLUMNS)
            for r in self.rows:
                out.writerow([repr(v) if isinstance(v, float) else v for v in (getattr(r, c) for c in COLUMNS)])

    def to_json(self, path=None):
        doc = {"surface": self.surface, "region": self.region, "columns": COLUMNS,
               "rows": [asdict(r) for r in self.rows]}
        if path is not None:
            with open(path, "w") as fh:
                json.dump(doc, fh, indent=2, allow_nan=True)
        return doc


def _default_spacing_region(source):
    if source.kind == "disk":
        return (0.3, 0.9)
    return (0.2 * source.A, 0.9 * source.A)


def sweep_row(source, lam: float, region: norms.Region, options: SweepOptions) -> SweepRow:
    t0 = time.perf_counter()
    delta = options.delta(lam)
    row = SweepRow(float(lam), float(delta))
    try:
        band = bands.assemble_band(source, lam, delta, options.cutoff, options.mu_convention)
        result = norms.sup_over_region(band, source, region)
        gap = bands.check_gap(band, options.cone_eps)
        spacing = bands.check_caustic_spacing(band, options.spacing_region or _default_spacing_region(source),
                                              options.spacing_normalization)
        env = norms.envelope_ratio(band, source, result.points)
        row.sup = result.sup_value
        row.sup_sqrt = math.sqrt(result.sup_value)
        row.argmax = result.argmax
        row.argmax_on_boundary = result.argmax_on_boundary
        row.band_size = len(band)
        row.band_count = band.cardinality
        row.min_caustic_gap = spacing.min_gap
        row.spacing_normalized = spacing.normalized_gap
        row.spacing_trivial = spacing.trivial
        row.gap_ok = gap.injective
        row.envelope_ratio = env.max_ratio
        if not gap.injective:
            row.error = f"gap violations {gap.violations}"
    except Exception as exc:  # recorded per row; the sweep carries on
        log.warning("sweep row lambda=%g failed: %s", lam, exc)
        row.status = "error"
        row.error = f"{type(exc).__name__}: {exc}"
    row.wall_time = time.perf_counter() - t0
    return row


def run_sweep(source, lambdas, region: norms.Region, options: SweepOptions | None = None) -> SweepTable:
    """One row per level, in level order, whatever the worker count.

    Failed rows are kept with their error; more than 20% failures raises
    :class:`SweepAborted` carrying the partial table.
    """
    options = options or SweepOptions()
    lambdas = [float(x) for x in np.sort(np.asarray(lambdas, dtype=float))]
    if options.workers > 1 and len(lambdas) > 1:
        with ThreadPoolExecutor(max_workers=options.workers) as pool:
            rows = list(pool.map(lambda lam: sweep_row(source, lam, region, options), lambdas))
    else:
        rows = [sweep_row(source, lam, region, options) for lam in lambdas]
    table = SweepTable(rows, source.surface_id, region.as_dict())
    errors = sum(r.status == "error" for r in rows)
    if rows and errors > FAILURE_LIMIT * len(rows):
        raise SweepAborted(f"{errors} of {len(rows)} rows failed", table)
    return table


# --- exponent fits -----------------------------------------------------------

@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    stderr: float     # residual standard error of the regression
    slope_stderr: float
    count: int

    def as_dict(self):
        return asdict(self)


def fit_exponent(table_or_lambdas, values=None, min_rows: int = 8) -> ExponentFit:
    """Ordinary least squares of log(sqrt sup) on log(lambda)."""
    if values is None:
        rows = table_or_lambdas.ok_rows()
        x = np.array([r.lam for r in rows])
        y = np.array([r.sup_sqrt for r in rows])
    else:
        x = np.asarray(table_or_lambdas, dtype=float)
        y = np.asarray(values, dtype=float)
    if x.size < min_rows:
        raise InsufficientDataError(f"exponent fit needs >= {min_rows} rows, got {x.size}")
    lx, ly = np.log(x), np.log(y)
    design = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - design @ coef
    dof = max(x.size - 2, 1)
    s = math.sqrt(float(resid @ resid) / dof)
    sxx = float(np.sum((lx - lx.mean()) ** 2))
    return ExponentFit(float(coef[0]), float(coef[1]), s, s / math.sqrt(sxx), int(x.size))


def leverage(table: SweepTable) -> float:
    """Largest change of the fitted slope when a single row is dropped."""
    rows = table.ok_rows()
    x = np.array([r.lam for r in rows])
    y = np.array([r.sup_sqrt for r in rows])
    base = fit_exponent(x, y).slope
    worst = 0.0
    for i in range(x.size):
        keep = np.arange(x.size) != i
        worst = max(worst, abs(fit_exponent(x[keep], y[keep], min_rows=2).slope - base))
    return worst


def delta_sweep(source, lam: float, deltas, region: norms.Region, cutoff: CutoffSpec = DEFAULT_CUTOFF) -> list:
    """Exploration only: (delta, band size, sup) at a fixed level for several widths."""
    out = []
    for d in deltas:
        band = bands.assemble_band(source, lam, float(d), cutoff)
        res = norms.sup_over_region(band, source, region)
        out.append({"delta": float(d), "band_size": len(band), "sup": res.sup_value,
                    "sup_over_lambda_delta": res.sup_value / (lam * float(d))})
    return out
