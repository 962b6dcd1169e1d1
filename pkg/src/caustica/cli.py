"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import checks, lemmas, norms, revolution, surfaces, sweep
from .cache import open_cache
from .config import ConfigError, load_config
from .cutoff import CutoffSpec

OK, CHECK_FAILED, CONFIG_ERROR = 0, 1, 2

log = logging.getLogger("caustica")


def _common(p):
    p.add_argument("--config", type=Path, help="flat JSON run configuration")
    p.add_argument("--out", type=Path, help="output directory (overrides the config)")
    p.add_argument("--workers", type=int, help="worker threads for sweeps")
    p.add_argument("--cache", help="cache file (CAUSTICA_CACHE overrides)")
    p.add_argument("--seedless", action="store_true", help="ignore the cache entirely")


def build_parser():
    parser = argparse.ArgumentParser(prog="caustica", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("specfun-check", help="run the special-function invariant suite")
    p = sub.add_parser("sweep", help="lambda sweep, exponent fit, CSV/JSON and a gnuplot script")
    _common(p)
    p = sub.add_parser("lemmas", help="lemma-level checks at one level")
    _common(p)
    p.add_argument("--lambda", dest="lam", type=float, help="level (defaults to lemma_lambda)")
    p = sub.add_parser("genericity", help="inflection points of the action curve")
    _common(p)
    p.add_argument("--profile", help="round, perturbed(eps) or table:PATH (instead of --config)")
    p.add_argument("--expect", choices=["generic", "degenerate", "degenerate-flat", "inconclusive"],
                   help="exit 1 unless the verdict matches")
    return parser


def _load(args, require=True, extra=None):
    if args.config is None:
        if require:
            raise ConfigError("--config is required")
        return None
    overrides = {"out": str(args.out) if args.out else None, "workers": args.workers, "cache": args.cache}
    overrides.update(extra or {})
    if getattr(args, "workers", None) is not None and args.workers < 1:
        raise ConfigError("--workers must be >= 1", field="workers")
    return load_config(args.config, overrides)


def _source(cfg, args):
    cache = open_cache(cfg.cache, seedless=args.seedless)
    if cfg.surface == "disk":
        return surfaces.DiskSurface(n_min_fraction=cfg.n_min_fraction, cache=cache)
    return surfaces.RevolutionSurface(cfg.profile_obj, cells=cfg.cells, cone_eps=cfg.cone_eps, cache=cache)


def _region(cfg):
    ivs = [tuple(iv) for iv in cfg.region]
    return norms.Region.annulus(*ivs[0]) if cfg.surface == "disk" else norms.Region.s_intervals(*ivs)


def _outdir(cfg):
    out = Path(cfg.out)
    if cfg.path is not None and not out.is_absolute():
        out = Path.cwd() / out
    out.mkdir(parents=True, exist_ok=True)
    return out


def _dump(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, default=norms._jsonable)


def cmd_specfun_check(args):
    results = checks.specfun_suite()
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print(f"specfun-check: {'all pass' if ok else 'FAILED'} ({sum(r.passed for r in results)}/{len(results)})")
    return OK if ok else CHECK_FAILED


def plot_script(table, fit, title):
    rows = table.ok_rows()
    lines = [f"# {title}", "$data << EOD", "# lambda sqrt_sup"]
    lines += [f"{r.lam!r} {r.sup_sqrt!r}" for r in rows]
    lines += ["EOD", "set logscale xy", "set xlabel 'lambda'", "set ylabel 'sqrt(sup S)'", "set key left top"]
    if fit is not None:
        lines.append(f"f(x) = exp({fit.intercept!r}) * x**({fit.slope!r})")
        lines.append(f"plot $data using 1:2 with points pt 7 title 'measured', f(x) title 'slope {fit.slope:.4f}'")
    else:
        lines.append("plot $data using 1:2 with linespoints title 'measured'")
    return "\n".join(lines) + "\n"


def cmd_sweep(args):
    cfg = _load(args)
    source = _source(cfg, args)
    region = _region(cfg)
    options = sweep.SweepOptions(
        delta_exponent=cfg.delta_exponent, delta_scale=cfg.delta_scale,
        cutoff=CutoffSpec(cfg.cutoff_plateau, cfg.cutoff_support), cone_eps=cfg.cone_eps,
        spacing_region=tuple(cfg.spacing_region) if cfg.spacing_region else None,
        spacing_normalization=cfg.spacing_normalization, mu_convention=cfg.mu_convention, workers=cfg.workers)
    lambdas = surfaces.log_grid(cfg.lambda_min, cfg.lambda_max, cfg.lambda_count)
    out = _outdir(cfg)
    try:
        table = sweep.run_sweep(source, lambdas, region, options)
        aborted = None
    except sweep.SweepAborted as exc:
        table, aborted = exc.table, str(exc)
    table.to_csv(out / "sweep.csv")
    table.to_json(out / "sweep.json")
    ok = aborted is None
    report = {"name": cfg.name, "surface": table.surface, "rows": len(table), "failed_rows": table.failures,
              "aborted": aborted}
    fit = None
    if len(table.ok_rows()) >= 8:
        fit = sweep.fit_exponent(table)
        lev = sweep.leverage(table)
        report.update(fit.as_dict())
        report["leverage"] = lev
        print(f"slope = {fit.slope:.4f} +- {fit.slope_stderr:.4f} over {fit.count} levels "
              f"[{cfg.lambda_min:g}, {cfg.lambda_max:g}]; leverage {lev:.4f}")
        if cfg.slope_bound is not None:
            limit = cfg.slope_bound + cfg.slope_tolerance
            report["slope_limit"] = limit
            passed = fit.slope <= limit
            print(f"{'PASS' if passed else 'FAIL'}  slope {fit.slope:.4f} <= {limit:.4f} "
                  f"(bound {cfg.slope_bound:.4f} + tolerance {cfg.slope_tolerance})")
            ok &= passed
        if cfg.assert_leverage:
            passed = lev < cfg.leverage_tolerance
            print(f"{'PASS' if passed else 'FAIL'}  leverage {lev:.4f} < {cfg.leverage_tolerance}")
            ok &= passed
    elif cfg.slope_bound is not None and cfg.lambda_count >= 8:
        print("FAIL  fewer than 8 usable rows; exponent not fitted")
        ok = False
    if cfg.assert_gap:
        bad = [r.lam for r in table.rows if r.ok and not r.gap_ok]
        print(f"{'PASS' if not bad else 'FAIL'}  gap lemma injective on {len(table.ok_rows())} bands")
        ok &= not bad
    if aborted:
        print(f"FAIL  sweep aborted: {aborted}")
    report["passed"] = bool(ok)
    _dump(out / "fit.json", report)
    (out / "plot.gp").write_text(plot_script(table, fit, cfg.name or table.surface))
    print(f"wrote {out}/sweep.csv, sweep.json, fit.json, plot.gp")
    return OK if ok else CHECK_FAILED


def cmd_lemmas(args):
    cfg = _load(args, extra={"lemma_lambda": args.lam})
    lam = cfg.lemma_lambda
    if cfg.surface == "disk" and lam < 10:
        raise ConfigError("disk bands need lambda >= 10", field="lambda")
    source = _source(cfg, args)
    delta = cfg.delta_scale * lam ** cfg.delta_exponent
    if cfg.surface == "disk":
        results = lemmas.disk_lemmas(source, lam, delta, cfg.cone_eps, cfg.alpha)
    else:
        results = lemmas.revolution_lemmas(source, lam, _region(cfg), delta, cfg.cone_eps)
    out = _outdir(cfg)
    doc = {"lambda": lam, "delta": delta, "surface": source.surface_id, "results": results,
           "passed": not lemmas.failed(results)}
    _dump(out / "lemmas.json", doc)
    for r in results:
        print(f"{r['status'].upper():<12s}{r['check']}")
    return CHECK_FAILED if lemmas.failed(results) else OK


def cmd_genericity(args):
    if args.profile:
        try:
            profile = revolution.parse_profile(args.profile)
        except (ValueError, OSError) as exc:
            raise ConfigError(str(exc), field="profile") from None
        out = args.out
    else:
        cfg = _load(args)
        if cfg.surface != "revolution":
            raise ConfigError("genericity needs a revolution surface", field="surface")
        profile, out = cfg.profile_obj, Path(cfg.out)
    report = revolution.validate_profile(profile)
    if not report.ok:
        raise ConfigError("profile fails validation: " + "; ".join(c for c, _ in report.failures), field="profile")
    result = revolution.genericity_check(profile)
    doc = {"profile": profile.name, **result.as_dict()}
    print(json.dumps(doc, default=norms._jsonable))
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        _dump(out / "genericity.json", doc)
    if args.expect and result.verdict != args.expect:
        return CHECK_FAILED
    return OK


COMMANDS = {"specfun-check": cmd_specfun_check, "sweep": cmd_sweep, "lemmas": cmd_lemmas,
            "genericity": cmd_genericity}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return CONFIG_ERROR if exc.code else OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
