"""Command line entry point: ``toeplitz-spectra run --preset Fig1Spacings --out runs/fig1``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from .config import EnsembleKind, ExperimentConfig, Preset, default_config
from .runner import RunAborted, run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toeplitz-spectra")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a preset or a config file")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help=f"one of {[p.value for p in Preset]}")
    src.add_argument("--config", help="JSON config file")
    run.add_argument("--n", type=int, dest="n_dim")
    run.add_argument("--realizations", type=int)
    run.add_argument("--seed", type=int, dest="master_seed")
    run.add_argument("--ensemble", choices=[k.value for k in EnsembleKind])
    run.add_argument("--workers", type=int, dest="worker_count")
    run.add_argument("--out", dest="output_path")
    run.add_argument("--paper-scale", action="store_true", default=None, dest="paper_scale")
    run.add_argument("-v", "--verbose", action="store_true")

    show = sub.add_parser("config", help="print the default config of a preset")
    show.add_argument("preset")
    return parser


def config_from_args(args) -> ExperimentConfig:
    config = ExperimentConfig.load(args.config) if args.config else default_config(args.preset)
    overrides = {k: getattr(args, k) for k in
                 ("n_dim", "realizations", "master_seed", "ensemble", "worker_count", "output_path", "paper_scale")
                 if getattr(args, k) is not None}
    return replace(config, **overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "config":
        sys.stdout.write(default_config(args.preset).dumps())
        return 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
        manifest = run_experiment(config)
    except (ValueError, OSError, RunAborted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ValueError) else 1
    print(json.dumps({"output": config.output_path, "files": len(manifest.files),
                      "failures": len(manifest.failures),
                      "elapsed_seconds": round(manifest.elapsed_seconds, 2)}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
