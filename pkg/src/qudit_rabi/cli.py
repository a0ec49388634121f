"""Command-line experiment runner.

    qudit-rabi list
    qudit-rabi run CONFIG [--set section.key=value ...] [--out DIR] [--strict-truncation]

Configs are INI files with an ``[experiment]`` section (``name``, ``seed``),
a ``[model]`` section and a section named after the experiment. Model
energies may be given in any unit; they are divided by ``omega`` on
ingestion, so all outputs are in units of the resonator frequency.
Experiment-section couplings and times are already in those units.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import os
import sys
import tempfile
import time
import warnings
from importlib import metadata
from pathlib import Path

import numpy as np

from .core import ContractViolation, TruncationWarning
from .experiments import EXPERIMENT_FIELDS, EXPERIMENTS, MODEL_FIELDS, REQUIRED, Field, tail_mass
from .model import InvalidParams, ModelParams

logger = logging.getLogger("qudit_rabi")

EXIT_OK, EXIT_CONFIG, EXIT_CONTRACT = 0, 2, 3


class ConfigError(ValueError):
    pass


def version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

def _new_parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keys are case-sensitive (Omega1 vs omega)
    return cp


def _convert(section: str, key: str, raw: str, spec: Field):
    where = f"{section}.{key}"
    raw = raw.strip()
    try:
        if spec.kind == "int":
            if raw.lower() in ("", "none") and spec.default is None:
                return None
            value = int(raw)
        elif spec.kind == "float":
            value = float(raw)
        elif spec.kind == "floats":
            value = tuple(float(x) for x in raw.replace(",", " ").split())
            if not value:
                raise ValueError("empty list")
        else:
            value = raw
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r} as {spec.kind} ({exc})") from None
    if spec.choices and value not in spec.choices:
        raise ConfigError(f"{where}: {value!r} not one of {', '.join(map(str, spec.choices))}")
    return value


def _resolve_section(cp, section: str, schema: dict[str, Field]) -> dict:
    present = dict(cp[section]) if cp.has_section(section) else {}
    unknown = sorted(set(present) - set(schema))
    if unknown:
        raise ConfigError(f"[{section}]: unknown key(s) {', '.join(unknown)}")
    out = {}
    for key, spec in schema.items():
        if key in present:
            out[key] = _convert(section, key, present[key], spec)
        elif spec.default is REQUIRED:
            raise ConfigError(f"missing required field {section}.{key}")
        else:
            out[key] = spec.default
    return out


def apply_overrides(cp: configparser.ConfigParser, overrides) -> None:
    for item in overrides or ():
        key, sep, value = item.partition("=")
        section, dot, option = key.strip().partition(".")
        if not sep or not dot or not option:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        if not cp.has_section(section):
            cp.add_section(section)
        cp[section][option] = value.strip()


def parse_config(text: str, overrides=None, source: str = "<config>") -> dict:
    """Parse INI text into ``{"experiment": {...}, "model": {...}, <name>: {...}}``."""
    cp = _new_parser()
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    apply_overrides(cp, overrides)
    exp = _resolve_section(cp, "experiment", EXPERIMENT_FIELDS)
    name = exp["name"]
    if name not in EXPERIMENTS:
        raise ConfigError(f"experiment.name: unknown experiment {name!r} (see `list`)")
    allowed = {"experiment", "model", name}
    extra = sorted(set(cp.sections()) - allowed)
    if extra:
        raise ConfigError(f"unknown section(s) {', '.join(extra)} for experiment {name!r}")
    return {
        "experiment": exp,
        "model": _resolve_section(cp, "model", MODEL_FIELDS),
        name: _resolve_section(cp, name, EXPERIMENTS[name].fields),
    }


def _format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(cfg: dict) -> str:
    """Canonical INI text: fixed section and key order, every default spelled out."""
    buf = io.StringIO()
    for section, values in cfg.items():
        buf.write(f"[{section}]\n")
        for key, value in values.items():
            buf.write(f"{key} = {_format_value(value)}\n")
        buf.write("\n")
    return buf.getvalue()


def model_params(model: dict) -> ModelParams:
    """Build parameters in units of omega (energies divided by the given omega)."""
    w = model["omega"]
    if not w > 0:
        raise ConfigError("model.omega must be > 0")
    try:
        return ModelParams(
            d=model["d"],
            omega=1.0,
            Omega1=model["Omega1"] / w,
            Omega2=model["Omega2"] / w,
            g1=model["g1"] / w,
            g2=model["g2"] / w,
            n_max=model["n_max"],
        )
    except InvalidParams as exc:
        raise ConfigError(f"[model]: {exc}") from None


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return "nan" if np.isnan(x) else f"{x:.12g}"


def render_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in np.atleast_2d(rows):
        w.writerow([_fmt(float(x)) for x in row])
    return buf.getvalue()


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def list_experiments() -> str:
    rows = [(e.name, e.figure, e.description) for e in EXPERIMENTS.values()]
    w0 = max(len(r[0]) for r in rows)
    w1 = max(len(r[1]) for r in rows)
    lines = [f"{'experiment':<{w0}}  {'figure':<{w1}}  description"]
    lines += [f"{a:<{w0}}  {b:<{w1}}  {c}" for a, b, c in rows]
    return "\n".join(lines) + "\n"


def execute(cfg: dict, out_dir: Path) -> dict:
    """Run a parsed config and write its CSV tables and metadata; returns the metadata."""
    name = cfg["experiment"]["name"]
    exp = EXPERIMENTS[name]
    np.random.seed(cfg["experiment"]["seed"])
    p = model_params(cfg["model"])
    t0 = time.perf_counter()
    outcome = exp.runner(p, cfg[name])
    wall = time.perf_counter() - t0
    files = {}
    for label, table in outcome.tables.items():
        fname = f"{name}.csv" if label == "data" else f"{name}.{label}.csv"
        atomic_write(out_dir / fname, render_csv(table.columns, table.rows))
        files[label] = fname
    probe = outcome.probe or p
    meta = {
        "experiment": name,
        "figure": exp.figure,
        "version": version(),
        "config": cfg,
        "config_canonical": serialize_config(cfg),
        "units": "energies in omega, times in 1/omega",
        "wall_time_s": wall,
        "truncation": {
            "n_max": probe.cutoff,
            "required_n_max": probe.required_cutoff,
            "probe_params": {k: getattr(probe, k) for k in ("d", "Omega1", "Omega2", "g1", "g2")},
            "ground_tail_mass_top5": tail_mass(probe),
        },
        "files": files,
        "results": outcome.extra,
    }
    atomic_write(out_dir / f"{name}.meta.json", json.dumps(_jsonable(meta), indent=2, sort_keys=True) + "\n")
    return meta


def cmd_run(args) -> int:
    try:
        text = Path(args.config).read_text(encoding="utf-8")
        cfg = parse_config(text, args.set, source=str(args.config))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            model_params(cfg["model"])  # surface invalid model fields as config errors
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    with warnings.catch_warnings():
        if args.strict_truncation:
            warnings.simplefilter("error", TruncationWarning)
        try:
            meta = execute(cfg, Path(args.out))
        except TruncationWarning as exc:
            print(f"truncation inadequate (strict mode): {exc}", file=sys.stderr)
            return EXIT_CONTRACT
        except ContractViolation as exc:
            print(f"numerical contract violation: {exc}", file=sys.stderr)
            return EXIT_CONTRACT
    print(f"{meta['experiment']}: wrote {', '.join(meta['files'].values())} to {args.out} in {meta['wall_time_s']:.2f} s")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qudit-rabi", description="Qubit-qudit Rabi model experiments")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment from a config file")
    run.add_argument("config")
    run.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE")
    run.add_argument("--out", default=".", help="output directory (default: current)")
    run.add_argument("--strict-truncation", action="store_true", help="treat truncation warnings as failures")
    run.set_defaults(func=cmd_run)
    ls = sub.add_parser("list", help="list available experiments")
    ls.set_defaults(func=lambda args: (sys.stdout.write(list_experiments()), EXIT_OK)[1])
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
