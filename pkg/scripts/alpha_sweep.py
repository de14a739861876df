"""Consensus gap and pooled error as alpha grows, on the committed consensus fixture.

    python scripts/alpha_sweep.py --out runs/alpha_sweep
"""

import argparse
import json
from pathlib import Path

from fedkmeans.config import load_config
from fedkmeans.runner import run_sweep

FIXTURE = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "consensus.yaml"


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="runs/alpha_sweep")
    parser.add_argument("--alphas", default="0,0.01,0.1,1,10,100")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    cfg = load_config(FIXTURE).replace(out=args.out, seed=args.seed)
    rows = run_sweep(cfg, alphas=[float(a) for a in args.alphas.split(",")])
    print(f"{'alpha':>8} {'objective':>12} {'gtv':>12} {'gap':>12} {'max ratio':>10}")
    for row in rows:
        report = json.loads((Path(args.out) / row["point"] / "report.json").read_text())
        ratio = max(report["comparison"]["per_device_objective_ratio"])
        print(f"{row['alpha']:8g} {row['objective']:12.5g} {row['gtv']:12.4g} "
              f"{row['consensus_gap']:12.4g} {ratio:10.5f}")


if __name__ == "__main__":
    main()
