"""Command-line entry point: ``nbse {simulate,sweep,traversals,realdata,estimate}``.

Settings come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines, then command-line flags.  Exit status is 0 on success,
2 for configuration errors and 3 for data errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from nbse.cover import Cover, validate_cover
from nbse.experiments import (
    ConfigError,
    ExperimentConfig,
    load_graph,
    rows_to_csv,
    run_estimator,
    run_overlap_sweep,
    run_real_data,
    run_simulation,
    run_traversal_study,
    summarize,
)
from nbse.io import DataFormatError, load_cover, save_matrix_csv

log = logging.getLogger("nbse")

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 2, 3

_TUPLE_FIELDS = {"estimators": str, "overlaps": float}


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _coerce(name: str, value):
    """Convert a config/flag string to the type of ExperimentConfig.<name>."""
    if not isinstance(value, str):
        return value
    if name in _TUPLE_FIELDS:
        conv = _TUPLE_FIELDS[name]
        return tuple(conv(v) for v in value.replace(",", " ").split())
    default = ExperimentConfig.__dataclass_fields__[name].default
    try:
        if isinstance(default, bool):
            return _parse_bool(value)
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {value!r}") from None
    return value


def read_config_file(path) -> Dict[str, object]:
    known = {f.name for f in fields(ExperimentConfig)}
    out: Dict[str, object] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("experiment")
    g.add_argument("--config", help="key = value settings file; flags take precedence")
    g.add_argument("--graphon", help="graphon letter a-f or path to a CSV grid")
    g.add_argument("--n", type=int)
    g.add_argument("--scenario", choices=("two-block", "chain", "file", "full"))
    g.add_argument("--T", type=int, dest="T", help="number of blocks (chain scenario)")
    g.add_argument("--overlap", type=float, help="overlap size; values < 1 are fractions of n")
    g.add_argument("--cover-file", dest="cover_file")
    g.add_argument("--estimators", help="comma-separated subset of nbse,nbs,usvt")
    g.add_argument("--replications", type=int)
    g.add_argument("--seed", type=int, help="master seed")
    g.add_argument("--workers", type=int)
    g.add_argument("--output", "-o", help="result CSV path (default: stdout)")
    g.add_argument("--dump-dir", dest="dump_dir", help="write every estimate as CSV here")
    g.add_argument("--no-timing", dest="timing", action="store_const", const=False,
                   help="write 0 in the seconds column so output is byte-reproducible")
    e = p.add_argument_group("estimators")
    e.add_argument("--I", type=int, dest="I", help="spanning trees (random-trees strategy)")
    e.add_argument("--J", type=int, dest="J", help="traversals per tree")
    e.add_argument("--strategy", choices=("maximal-tree", "random-trees"))
    e.add_argument("--rule", choices=("harmonic", "arithmetic", "geometric"))
    e.add_argument("--C", type=float, dest="C", help="bandwidth constant")
    e.add_argument("--epsilon", type=float)
    e.add_argument("--max-iter", type=int, dest="max_iter")
    e.add_argument("--eta", type=float, help="USVT threshold slack")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nbse", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="graphon simulation with one cover setting")
    _add_common(p)

    p = sub.add_parser("sweep", help="two-block overlap sweep")
    _add_common(p)
    p.add_argument("--overlaps", help="comma-separated overlaps; values < 1 are fractions of n")

    p = sub.add_parser("traversals", help="single-traversal vs averaged NBSE on a chain cover")
    _add_common(p)

    p = sub.add_parser("realdata", help="overlap experiments on an observed network")
    _add_common(p)
    p.add_argument("--graph", help="edge list, or dense adjacency .csv")
    p.add_argument("--overlaps", help="comma-separated overlaps; values < 1 are fractions of n")
    p.add_argument("--full-estimator", dest="full_estimator", choices=("nbs", "usvt"))

    p = sub.add_parser("estimate", help="estimate P from one observed matrix")
    p.add_argument("graph", help="edge list, or dense adjacency .csv")
    p.add_argument("--cover-file", dest="cover_file", help="observed blocks; default is one full block")
    p.add_argument("--estimator", choices=("nbse", "nbs", "usvt"), default="nbse")
    p.add_argument("--output", "-o", required=True, help="CSV path for the estimate")
    p.add_argument("--seed", type=int, default=0)
    for flag, kw in (("--J", dict(type=int, dest="J")), ("--I", dict(type=int, dest="I")),
                     ("--strategy", dict(choices=("maximal-tree", "random-trees"))),
                     ("--rule", dict(choices=("harmonic", "arithmetic", "geometric"))),
                     ("--C", dict(type=float, dest="C")), ("--epsilon", dict(type=float)),
                     ("--max-iter", dict(type=int, dest="max_iter")), ("--eta", dict(type=float))):
        p.add_argument(flag, **kw)
    return parser


def make_config(args: argparse.Namespace) -> ExperimentConfig:
    values: Dict[str, object] = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    known = {f.name for f in fields(ExperimentConfig)}
    for key, value in vars(args).items():
        if key in known and value is not None:
            values[key] = _coerce(key, value)
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg


def _emit(rows, cfg: ExperimentConfig) -> None:
    text = rows_to_csv(rows, cfg.timing)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    for (dataset, est, ov), (mean, sd, k) in sorted(summarize(rows).items()):
        log.info("%s %-10s overlap=%-5d mean error %.4f (sd %.4f, %d reps)", dataset, est, ov, mean, sd, k)


def _estimate(args) -> None:
    A = load_graph(args.graph)
    n = A.shape[0]
    cover = load_cover(args.cover_file, n) if args.cover_file else Cover.trivial(n)
    problems = validate_cover(cover)
    if problems:
        raise DataFormatError("; ".join(p.message for p in problems))
    cfg = make_config(argparse.Namespace(**{k: v for k, v in vars(args).items() if k not in ("graph", "output")}))
    Phat, iters = run_estimator(args.estimator, A, cover, cfg, args.seed)
    save_matrix_csv(args.output, Phat)
    if iters is not None:
        log.info("NBSE stopped after %d corrections", iters)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "estimate":
            _estimate(args)
            return EXIT_OK
        cfg = make_config(args)
        if args.command == "simulate":
            rows = run_simulation(cfg)
        elif args.command == "sweep":
            rows = run_overlap_sweep(cfg, cfg.overlaps or (0.01, 0.05, 0.1, 0.3))
        elif args.command == "traversals":
            rows = run_traversal_study(cfg)
        else:
            rows = run_real_data(cfg)
        _emit(rows, cfg)
    except ConfigError as exc:
        print(f"nbse: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataFormatError as exc:
        print(f"nbse: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
