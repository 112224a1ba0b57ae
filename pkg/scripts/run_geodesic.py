"""Geodesic tracking experiment: write CSVs and print the median distance at a few times.

    python scripts/run_geodesic.py --trials 20 --out results/geodesic
"""
import argparse
import dataclasses
from pathlib import Path

from frontlab.harness import (
    GeodesicConfig,
    geodesic_summary_rows,
    load_config,
    run_geodesic_tracking,
    write_geodesic_outputs,
)

CHECKPOINTS = (25, 99, 100, 105, 150, 200)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config")
    ap.add_argument("--out", default="results/geodesic")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    base = load_config(GeodesicConfig, args.config)
    cfg = dataclasses.replace(base, trials=args.trials, seed=args.seed)
    results = run_geodesic_tracking(cfg, workers=args.workers)
    for path in write_geodesic_outputs(cfg, results, Path(args.out), raw=True):
        print("wrote", path)

    med = {(T, t): m for T, t, m, *_ in geodesic_summary_rows(cfg, results)}
    print("window_T " + " ".join(f"t={t:>4}" for t in CHECKPOINTS))
    for T in cfg.window_sizes:
        cells = (f"{med[T, t]:6.3f}" if (T, t) in med else "     -" for t in CHECKPOINTS)
        print(f"{T:>8} " + " ".join(cells))


if __name__ == "__main__":
    main()
