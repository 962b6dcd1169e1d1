"""Run configuration: flat JSON validated against the shipped schema, then range-checked."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

from . import revolution

DEFAULTS = {
    "name": "",
    "profile": "perturbed(0.1)",
    "lambda_min": 125.0,
    "lambda_max": 2000.0,
    "lambda_count": 16,
    "delta_exponent": -1.0 / 3.0,
    "delta_scale": 1.0,
    "cutoff_plateau": 1.0,
    "cutoff_support": 2.0,
    "cone_eps": 0.05,
    "alpha": 0.1,
    "cells": None,
    "n_min_fraction": 0.0,
    "mu_convention": "mode",
    "spacing_region": None,
    "spacing_normalization": "interior",
    "slope_bound": None,
    "slope_tolerance": 0.03,
    "assert_gap": True,
    "assert_leverage": False,
    "leverage_tolerance": 0.02,
    "lemma_lambda": 500.0,
    "workers": 1,
    "cache": None,
    "out": "out",
}


class ConfigError(ValueError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


@dataclass
class RunConfig:
    values: dict
    path: Path | None = None
    profile_obj: object = field(default=None, repr=False)

    def __getattr__(self, name):
        if name == "values":
            raise AttributeError(name)
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None


def schema() -> dict:
    return json.loads(resources.files("caustica").joinpath("data/config.schema.json").read_text())


def _line_of(text, name):
    if not name:
        return None
    m = re.search(r'"%s"\s*:' % re.escape(name), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def parse_config(text: str, path: Path | None = None, overrides: dict | None = None) -> RunConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a JSON object", line=1)
    errors = sorted(jsonschema.Draft202012Validator(schema()).iter_errors(raw), key=lambda e: list(e.path))
    if errors:
        err = errors[0]
        name = str(err.path[0]) if err.path else None
        if name is None and err.validator == "additionalProperties":
            m = re.search(r"'([^']+)' was unexpected", err.message)
            name = m.group(1) if m else None
        raise ConfigError(err.message, field=name, line=_line_of(text, name))
    values = dict(DEFAULTS)
    values.update(raw)
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = v
    cfg = RunConfig(values, path)
    _check_ranges(cfg, text)
    return cfg


def load_config(path, overrides: dict | None = None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}") from None
    return parse_config(text, path, overrides)


def _check_ranges(cfg: RunConfig, text: str):
    v = cfg.values

    def fail(name, message):
        raise ConfigError(message, field=name, line=_line_of(text, name))

    if v["lambda_min"] > v["lambda_max"]:
        fail("lambda_min", "lambda_min exceeds lambda_max")
    if v["cutoff_plateau"] >= v["cutoff_support"]:
        fail("cutoff_plateau", "plateau must be smaller than support")
    if v["surface"] == "disk":
        if v["lambda_count"] and v["lambda_min"] < 10:
            fail("lambda_min", "disk bands need lambda >= 10")
        for lo, hi in v["region"]:
            if not (0 < lo < hi <= 1):
                fail("region", f"disk interval [{lo}, {hi}] must satisfy 0 < lo < hi <= 1")
    else:
        spec = v["profile"]
        if spec.startswith("table:") and cfg.path is not None:
            table = Path(spec[len("table:"):])
            if not table.is_absolute():
                table = cfg.path.parent / table
            if not table.exists():
                fail("profile", f"profile table {table} not found")
            spec = f"table:{table}"
        try:
            prof = revolution.parse_profile(spec)
        except (ValueError, OSError) as exc:
            fail("profile", str(exc))
        report = revolution.validate_profile(prof)
        if not report.ok:
            fail("profile", "profile fails validation: " + "; ".join(f"{c} ({m})" for c, m in report.failures))
        if v["cone_eps"] >= prof.A:
            fail("cone_eps", "cone_eps must be smaller than sup a")
        for lo, hi in v["region"]:
            if not (0 < lo < hi < prof.L):
                fail("region", f"interval [{lo}, {hi}] must lie inside (0, {prof.L:.6g})")
        cfg.profile_obj = prof
    sr = v["spacing_region"]
    if sr is not None and not sr[0] < sr[1]:
        fail("spacing_region", "spacing_region must be increasing")
    if cfg.values.get("lemma_lambda", 1) < 10 and v["surface"] == "disk":
        fail("lemma_lambda", "disk bands need lambda >= 10")
