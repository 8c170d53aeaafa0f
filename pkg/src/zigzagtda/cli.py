"""Command-line interface.

Subcommands: generate, bootstrap, threshold, witness, pairwise, render.
Exit codes: 0 on success, 2 for configuration errors, 3 for runtime errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import metric, pipelines
from .pipelines import ConfigError


def _add_common(sub):
    sub.add_argument("--config", help="INI config file")
    sub.add_argument("--input", help="point cloud file (overrides config input)")
    sub.add_argument("--seed", type=int, help="seed for all randomness")
    sub.add_argument("--epsilon", type=float, help="working scale")
    sub.add_argument("--max-dim", type=int, dest="max_dim",
                     help="complex dimension cap")
    sub.add_argument("--dim", type=int, help="restrict to one homology dimension")
    sub.add_argument("--out-json", help="report output path (default: stdout)")
    sub.add_argument("--out-svg", help="barcode/graph SVG output path")
    sub.add_argument("--keep-half-integral", action="store_true", default=None,
                     help="report intervals confined to bridge indices too")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zigzagtda",
        description="Zigzag persistence over Z/2: bootstrapping, thresholding, "
                    "and witness-complex comparison.")
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("generate", help="sample a synthetic point cloud")
    gen.add_argument("--shape", required=True, choices=metric.SHAPES)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output point cloud file")

    for kind in pipelines.PIPELINE_KINDS:
        sub = subs.add_parser(kind, help=f"run the {kind} pipeline")
        _add_common(sub)

    ren = subs.add_parser("render", help="render a report JSON to SVG")
    ren.add_argument("--input", required=True, help="report JSON file")
    ren.add_argument("--out-svg", required=True)
    return parser


def _configure(args) -> pipelines.ExperimentConfig:
    if args.config:
        cfg = pipelines.load_config(args.config, args.command)
    else:
        cfg = pipelines.ExperimentConfig(kind=args.command)
    if args.input is not None:
        cfg.input_path = args.input
        cfg.shape = None
        cfg.matrix_path = None
    for name in ("seed", "epsilon", "max_dim", "keep_half_integral"):
        value = getattr(args, name)
        if value is not None:
            setattr(cfg, name, value)
    if args.dim is not None:
        cfg.dims = (args.dim,)
    return cfg


def _run_pipeline(args) -> int:
    cfg = _configure(args)
    report = pipelines.run(cfg)
    payload = report.json_bytes()
    if args.out_json:
        with open(args.out_json, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload.decode())
    if args.out_svg:
        with open(args.out_svg, "w") as fh:
            fh.write(pipelines.render_report(report.to_json_obj()))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            cloud = metric.generate(args.shape, args.n, args.seed)
            metric.save_point_cloud(args.out, cloud)
            return 0
        if args.command == "render":
            with open(args.input) as fh:
                obj = json.load(fh)
            with open(args.out_svg, "w") as fh:
                fh.write(pipelines.render_report(obj))
            return 0
        return _run_pipeline(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, RuntimeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
