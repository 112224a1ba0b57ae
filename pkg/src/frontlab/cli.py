"""Command-line entry point ``front-lab``."""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .errors import InvalidConfig, NumericalFailure
from .harness import (
    ArxConfig,
    GeodesicConfig,
    load_config,
    run_arx_prediction,
    run_geodesic_tracking,
    write_arx_outputs,
    write_geodesic_outputs,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("frontlab")


def _with_overrides(cfg, args):
    changes = {}
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.seed is not None:
        changes["seed"] = args.seed
    try:
        return dataclasses.replace(cfg, **changes)
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(str(exc)) from exc


def _track_geodesic(args) -> int:
    cfg = _with_overrides(load_config(GeodesicConfig, args.config), args)
    log.info("geodesic tracking: %d trials, windows %s", cfg.trials, cfg.window_sizes)
    results = run_geodesic_tracking(cfg, workers=args.workers)
    for path in write_geodesic_outputs(cfg, results, args.out, raw=args.raw):
        log.info("wrote %s", path)
    return EXIT_OK


def _predict_arx(args) -> int:
    cfg = _with_overrides(load_config(ArxConfig, args.config), args)
    log.info("ARX prediction: %d trials, nsr %s", cfg.trials, cfg.nsr_levels)
    results = run_arx_prediction(cfg, workers=args.workers)
    for path in write_arx_outputs(cfg, results, args.out):
        log.info("wrote %s", path)
    return EXIT_OK


def _selftest(args) -> int:
    from .selftest import run_selftest

    return EXIT_OK if run_selftest() else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="front-lab", description="Flag-manifold subspace tracking experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, helptext in (
        ("track-geodesic", _track_geodesic, "time- and dimension-varying subspace tracking"),
        ("predict-arx", _predict_arx, "online prediction for the switched ARX system"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="JSON config; omitted fields take their defaults")
        p.add_argument("--out", required=True, help="output directory for CSV files")
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
        if name == "track-geodesic":
            p.add_argument("--raw", action="store_true", help="also write per-trial traces")
        p.set_defaults(func=fn)

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    p.set_defaults(func=_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except InvalidConfig as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
