"""Run every preset at desk scale (or paper scale with --paper-scale) into one directory tree.

    python scripts/reproduce_figures.py --out runs/desk --workers 4
"""

import argparse
import json
import logging
from dataclasses import replace
from pathlib import Path

from toeplitz_spectra.experiments import Preset, default_config, run_experiment


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="runs/desk")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--seed", type=int, default=20240101)
    parser.add_argument("--paper-scale", action="store_true")
    parser.add_argument("--skip", nargs="*", default=[], help="preset names to skip")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    for preset in Preset:
        if preset is Preset.CUSTOM or preset.value in args.skip:
            continue
        cfg = default_config(preset, master_seed=args.seed, worker_count=args.workers,
                             paper_scale=args.paper_scale, output_path=str(Path(args.out) / preset.value))
        manifest = run_experiment(cfg)
        logging.info("%s: %d files in %.1fs", preset.value, len(manifest.files), manifest.elapsed_seconds)
        if preset is Preset.FIG1_SPACINGS and args.paper_scale:
            # the second sweep superposed in the spacing figures: N=1000, 1000 realizations
            big = replace(cfg, n_dim=1000, output_path=str(Path(args.out) / "Fig1Spacings_N1000"))
            run_experiment(big)
        summary = json.loads((Path(cfg.output_path) / "summary.json").read_text())
        print(preset.value, json.dumps(_headline(summary)))


def _headline(summary):
    out = {}
    if "max_abs_z" in summary:
        out["max_abs_z"] = round(summary["max_abs_z"], 3)
    for pool, stats in summary.items():
        if not isinstance(stats, dict):
            continue
        for key, val in stats.items():
            if isinstance(val, dict) and "sup_norm" in val:
                out[f"{pool}.{key}.sup_norm"] = round(val["sup_norm"], 4)
            elif key == "compressibility":
                out[f"{pool}.chi"] = round(val["estimate"], 4)
            elif key.startswith("momentum_D_"):
                out[key] = round(val["d_q"], 3)
    return out


if __name__ == "__main__":
    main()
