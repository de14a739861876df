"""Command line: ``fedkmeans run|baseline|sweep``.

Exit status is 0 on success, 2 for an invalid configuration and 1 for
failures while running.
"""

from __future__ import annotations

import argparse
import logging
import sys

from fedkmeans.config import ConfigError, ExperimentConfig, from_mapping, load_config, parse_data_spec
from fedkmeans.runner import run_baseline, run_experiment, run_sweep

log = logging.getLogger("fedkmeans")

# flag -> config key
_FLAGS = {
    "k": "k",
    "alpha": "alpha",
    "graph": "graph",
    "partition": "partition",
    "n_devices": "n_devices",
    "seed": "seed",
    "rounds_max": "rounds_max",
    "round_tol": "round_tol",
    "inner_max_iter": "inner_max_iter",
    "inner_tol": "inner_tol",
    "mode": "mode",
    "init": "init",
    "baseline_restarts": "baseline_restarts",
    "out": "out",
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML key-value config; flags override its values")
    p.add_argument("--k", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--graph", help="ring | complete | random:P | file:PATH")
    p.add_argument("--data", help="blobs[:k=3,d=2,spread=0.5,points=100,sep=10] | csv:PATH")
    p.add_argument("--device-column", action="store_true", default=None,
                   help="first CSV column is a 1-based device id")
    p.add_argument("--skip-header", action="store_true", default=None)
    p.add_argument("--partition", help="iid | by-label | contiguous")
    p.add_argument("--n-devices", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--rounds-max", type=int)
    p.add_argument("--round-tol", type=float)
    p.add_argument("--inner-max-iter", type=int)
    p.add_argument("--inner-tol", type=float)
    p.add_argument("--mode", help="jacobi | gauss-seidel")
    p.add_argument("--init", help="kmeanspp | local_lloyd | shared | explicit")
    p.add_argument("--baseline-restarts", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fedkmeans", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("run", help="federated run with round log and comparison report"))
    _common(sub.add_parser("baseline", help="centralized Lloyd baseline on the pooled data"))
    sweep = sub.add_parser("sweep", help="run once per alpha value or topology")
    _common(sweep)
    sweep.add_argument("--alphas", help="comma-separated alpha values")
    sweep.add_argument("--graphs", help="comma-separated topologies")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {key: getattr(args, flag) for flag, key in _FLAGS.items() if getattr(args, flag) is not None}
    if args.data is not None:
        overrides.update(parse_data_spec(args.data))
    if args.device_column:
        overrides["csv_device_column"] = True
    if args.skip_header:
        overrides["csv_skip_header"] = True
    return from_mapping(overrides, cfg).validate()


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = config_from_args(args)
        alphas = graphs = None
        if args.command == "sweep":
            alphas = [float(a) for a in args.alphas.split(",")] if args.alphas else None
            graphs = args.graphs.split(",") if args.graphs else None
            if not alphas and not graphs:
                raise ConfigError("sweep", "pass --alphas and/or --graphs")
    except (ConfigError, OSError, ValueError) as exc:
        print(f"fedkmeans: invalid configuration: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "run":
            report = run_experiment(cfg)
            print(f"{cfg.out}: {report['rounds']} rounds, objective {report['final_objective']:.6g}, "
                  f"consensus gap {report['comparison']['consensus_gap']:.3g}")
        elif args.command == "baseline":
            report = run_baseline(cfg)
            print(f"{cfg.out}: objective {report['objective']:.6g}")
        else:
            rows = run_sweep(cfg, alphas, graphs)
            print(f"{cfg.out}: {len(rows)} sweep points, summary in summary.csv")
    except ConfigError as exc:
        print(f"fedkmeans: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("run failed", exc_info=True)
        print(f"fedkmeans: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
