"""Command-line entry point: ``stochbridge run|validate|list``.

Config files are flat UTF-8 ``key = value`` lines (``#`` starts a comment).
The keys ``experiment``, ``seed``, ``output_dir`` and ``formats`` are reserved;
every other key is a parameter of the chosen experiment. ``--set key=value``
overrides the file.

A run writes ``summary.json`` (with the ``json`` format), one CSV per table
(with ``csv``) and ``manifest.json``. Payload files depend only on
(config, seed): floats go to JSON with 17 significant digits and to CSV with
12, and nothing time-dependent enters them.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from . import __version__
from .experiments import EXPERIMENTS, Result, catalog

RESERVED = ("experiment", "seed", "output_dir", "formats")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class ScenarioConfig:
    experiment: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    output_dir: str = ""
    formats: tuple[str, ...] = FORMATS

    def out_path(self) -> Path:
        return Path(self.output_dir or f"results/{self.experiment}")


# -------------------------------------------------------------- parsing


def parse_config_text(text: str) -> dict[str, str]:
    """Raw ``key -> value`` strings; later duplicates win."""
    raw = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError([f"line {n}: expected 'key = value'"])
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError([f"line {n}: empty key"])
        raw[key] = value
    return raw


def _typed(raw: Mapping[str, Any]) -> tuple[dict, list[str]]:
    """Parse and range-check a raw mapping; returns (typed values, violations)."""
    problems: list[str] = []
    out: dict[str, Any] = {}
    name = raw.get("experiment")
    if name is None or str(name).strip() == "":
        problems.append("missing required key: experiment")
    if "seed" not in raw:
        problems.append("missing required key: seed")
    else:
        try:
            seed = int(str(raw["seed"]))
            if not 0 <= seed < 2**64:
                raise ValueError
            out["seed"] = seed
        except ValueError:
            problems.append(f"seed: must be an integer in [0, 2^64), got {raw['seed']!r}")
    if "formats" in raw:
        fm = raw["formats"]
        fm = tuple(s.strip() for s in fm.split(",") if s.strip()) if isinstance(fm, str) else tuple(fm)
        bad = [f for f in fm if f not in FORMATS]
        if bad or not fm:
            problems.append(f"formats: must be a non-empty subset of {list(FORMATS)}, got {list(fm)}")
        out["formats"] = tuple(sorted(set(fm)))
    if "output_dir" in raw:
        out["output_dir"] = str(raw["output_dir"])
    if name is None:
        return out, problems
    name = str(name).strip()
    exp = EXPERIMENTS.get(name)
    if exp is None:
        problems.append(f"unknown experiment: {name!r}")
        return out, problems
    out["experiment"] = name
    params = {}
    for key, value in raw.items():
        if key in RESERVED:
            continue
        spec = exp.params.get(key)
        if spec is None:
            problems.append(f"unknown key for {name}: {key!r}")
            continue
        try:
            params[key] = spec.parse(value)
        except (TypeError, ValueError):
            problems.append(f"{key}: cannot parse {value!r} as {spec.kind}")
            continue
        problems.extend(spec.problems(key, params[key]))
    for key in exp.required():
        if key not in raw:
            problems.append(f"missing required key: {key}")
    out["parameters"] = params
    return out, problems


def validate(config: ScenarioConfig | Mapping[str, Any]) -> list[str]:
    """Every violation found without running: keys, ranges and the experiment's
    stability or accuracy preconditions. An empty list means the config is valid."""
    raw = to_mapping(config) if isinstance(config, ScenarioConfig) else dict(config)
    typed, problems = _typed(raw)
    if problems:
        return problems
    exp = EXPERIMENTS[typed["experiment"]]
    try:
        problems.extend(exp.check(exp.with_defaults(typed["parameters"])))
    except (ValueError, ArithmeticError) as err:
        problems.append(f"precondition check failed: {err}")
    return problems


def build_config(raw: Mapping[str, Any]) -> ScenarioConfig:
    typed, problems = _typed(raw)
    if problems:
        raise ConfigError(problems)
    return ScenarioConfig(
        experiment=typed["experiment"],
        parameters=typed["parameters"],
        seed=typed["seed"],
        output_dir=typed.get("output_dir", ""),
        formats=typed.get("formats", FORMATS),
    )


def parse_config(text: str) -> ScenarioConfig:
    return build_config(parse_config_text(text))


def _format_value(v: Any) -> str:
    if isinstance(v, (tuple, list)):
        return ", ".join(_format_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_mapping(cfg: ScenarioConfig) -> dict[str, Any]:
    out = {"experiment": cfg.experiment, "seed": cfg.seed, "formats": ",".join(cfg.formats)}
    if cfg.output_dir:
        out["output_dir"] = cfg.output_dir
    out.update(cfg.parameters)
    return out


def serialize_config(cfg: ScenarioConfig) -> str:
    """Canonical text form: reserved keys first, then parameters sorted by name."""
    m = to_mapping(cfg)
    keys = [k for k in RESERVED if k in m] + sorted(k for k in m if k not in RESERVED)
    return "".join(f"{k} = {_format_value(m[k])}\n" for k in keys)


# ---------------------------------------------------------- serialization


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON with floats written as 17 significant digits; non-finite floats become null."""
    obj = _plain(obj) if _level == 0 else obj
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {dumps_json(v, indent, _level + 1)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if any(isinstance(v, (dict, list)) for v in obj):
            items = [inner + dumps_json(v, indent, _level + 1) for v in obj]
            return "[\n" + ",\n".join(items) + "\n" + pad + "]"
        return "[" + ", ".join(dumps_json(v, indent, _level + 1) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format(obj, ".17g") if math.isfinite(obj) else "null"
    return json.dumps(obj)


def table_csv(columns: list[str], rows: np.ndarray) -> str:
    lines = [",".join(columns)]
    lines += [",".join(format(float(v), ".12g") for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


# ------------------------------------------------------------------- run


def run(cfg: ScenarioConfig, workers: int | None = None) -> dict:
    """Run a validated config, write its outputs and return the manifest."""
    problems = validate(cfg)
    if problems:
        raise ConfigError(problems)
    exp = EXPERIMENTS[cfg.experiment]
    params = exp.with_defaults(cfg.parameters)
    start = time.perf_counter()
    result: Result = exp.run(params, cfg.seed, workers)
    duration = time.perf_counter() - start

    payload: dict[str, bytes] = {}
    if "json" in cfg.formats:
        body = {"experiment": cfg.experiment, "seed": cfg.seed, "parameters": params, "results": result.summary}
        payload["summary.json"] = (dumps_json(body) + "\n").encode()
    if "csv" in cfg.formats:
        for name, table in sorted(result.tables.items()):
            payload[f"{name}.csv"] = table_csv(table.columns, table.rows).encode()

    out = cfg.out_path()
    out.mkdir(parents=True, exist_ok=True)
    for name, data in payload.items():
        (out / name).write_bytes(data)
    manifest = {
        "config": to_mapping(cfg),
        "seed": cfg.seed,
        "version": __version__,
        "duration_s": duration,
        "artifacts": [{"file": n, "sha256": _sha256(d), "bytes": len(d)} for n, d in sorted(payload.items())],
        "payload_sha256": _sha256(b"".join(_sha256(d).encode() + n.encode() for n, d in sorted(payload.items()))),
    }
    (out / "manifest.json").write_text(dumps_json(manifest) + "\n")
    return manifest


def list_experiments() -> list[dict]:
    return catalog()


# ---------------------------------------------------------------- main


def _error(kind: str, message: str, violations: list[str] | None = None) -> None:
    record = {"error": kind, "message": message}
    if violations is not None:
        record["violations"] = violations
    print(dumps_json(record), file=sys.stderr)


def _load_raw(path: str, sets: list[str]) -> dict[str, str]:
    raw = parse_config_text(Path(path).read_text(encoding="utf-8")) if path else {}
    for item in sets or []:
        if "=" not in item:
            raise ConfigError([f"--set expects key=value, got {item!r}"])
        k, v = (s.strip() for s in item.split("=", 1))
        raw[k] = v
    return raw


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="stochbridge", description="Run stochastic-mechanics experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment from a config file")
    p_run.add_argument("config")
    p_run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--out")
    p_run.add_argument("--workers", type=int, help="worker threads (default: $STOCHBRIDGE_WORKERS or all cores)")
    p_val = sub.add_parser("validate", help="check a config without running it")
    p_val.add_argument("config")
    p_val.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    sub.add_parser("list", help="list the available experiments")
    args = parser.parse_args(argv)

    if args.command == "list":
        print(dumps_json(list_experiments()))
        return 0
    try:
        raw = _load_raw(args.config, args.set)
    except OSError as err:
        _error("io", str(err))
        return 2
    except ConfigError as err:
        _error("config", str(err), err.violations)
        return 2

    if args.command == "validate":
        problems = validate(raw)
        print(dumps_json({"valid": not problems, "violations": problems}))
        return 0 if not problems else 1

    if args.seed is not None:
        raw["seed"] = str(args.seed)
    if args.out:
        raw["output_dir"] = args.out
    try:
        cfg = build_config(raw)
        manifest = run(cfg, workers=args.workers)
    except ConfigError as err:
        _error("config", str(err), err.violations)
        return 2
    except (ValueError, ArithmeticError) as err:
        _error("experiment", f"{raw.get('experiment')}: {err}")
        return 3
    print(dumps_json({"output_dir": str(cfg.out_path()), "payload_sha256": manifest["payload_sha256"]}))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
