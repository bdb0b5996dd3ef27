"""Command-line entry point: per-stage subcommands plus the full pipeline."""
from __future__ import annotations

import argparse
import os
import sys

from . import pipeline as pl


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", required=True, help="path to config.json")
    sub.add_argument("--out", default=None,
                     help="output directory (overrides config output_dir)")
    sub.add_argument("--threads", type=int, default=None,
                     help="worker thread cap (default: all cores)")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bandgapopt",
        description="PCA-accelerated band-gap optimization pipeline")
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("sample", "grads", "pca", "optimize", "report", "pipeline"):
        _add_common(subs.add_parser(name))
    args = parser.parse_args(argv)

    try:
        config = pl.load_config(args.config)
    except Exception as exc:
        print(f"stage config failed: {exc}", file=sys.stderr)
        return 1
    out = args.out or config.output_dir
    threads = args.threads if args.threads is not None else config.threads
    os.makedirs(out, exist_ok=True)

    stages = {
        "sample": lambda: pl.stage_sample(config, out),
        "grads": lambda: pl.stage_grads(config, out),
        "pca": lambda: pl.stage_pca(config, out),
        "optimize": lambda: pl.stage_optimize(config, out, threads=threads),
        "report": lambda: pl.stage_report(config, out),
        "pipeline": lambda: pl.run_pipeline(config, out, threads=threads),
    }
    try:
        stages[args.command]()
    except Exception as exc:
        print(f"stage {args.command} failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
