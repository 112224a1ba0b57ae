"""Switched-ARX prediction experiment: write CSVs and print the median error table.

    python scripts/run_arx.py --trials 20 --out results/arx
"""
import argparse
import dataclasses
from pathlib import Path

from frontlab.harness import ArxConfig, arx_median_table, arx_model_names, load_config, run_arx_prediction, write_arx_outputs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config")
    ap.add_argument("--out", default="results/arx")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    base = load_config(ArxConfig, args.config)
    cfg = dataclasses.replace(base, trials=args.trials, seed=args.seed)
    results = run_arx_prediction(cfg, workers=args.workers)
    for path in write_arx_outputs(cfg, results, Path(args.out)):
        print("wrote", path)

    med = arx_median_table(cfg, results)
    width = max(map(len, arx_model_names(cfg)))
    print(" " * width + "".join(f"{s:>10}" for s in cfg.nsr_levels))
    for name in arx_model_names(cfg):
        print(name.ljust(width) + "".join(f"{med[name, s]:10.2f}" for s in cfg.nsr_levels))


if __name__ == "__main__":
    main()
