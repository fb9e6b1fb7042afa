"""Command-line front end for campaigns, landscapes and reports."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench import (
    CampaignConfig,
    build_instance,
    campaign_instances,
    instance_seed,
    load_records,
    report,
    run_campaign,
    sample_landscape,
    write_records,
)
from .errors import InvalidInputError

_LANDSCAPE_ALGS = ("benqo", "qaoa", "vqe")


def _cmd_gen(args) -> int:
    cfg = CampaignConfig(problem=args.problem, sizes=args.sizes, runs=args.runs, base_seed=args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "instances.json"
    path.write_text(json.dumps([inst.to_dict() for inst in campaign_instances(cfg)], indent=1) + "\n")
    print(path)
    return 0


def _cmd_run(args) -> int:
    cfg = CampaignConfig.from_json(args.config)
    if args.seed is not None:
        cfg.base_seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    records = run_campaign(cfg)
    write_records(records, args.out_dir)
    for p in report(records, args.out_dir):
        print(p)
    return 0


def _cmd_landscape(args) -> int:
    seed = instance_seed(args.seed, args.n, 0)
    inst = build_instance(args.problem, args.n, seed)
    grid = sample_landscape(args.algorithm, inst.model, args.seed, args.resolution, inst.instance_id)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"landscape_{args.algorithm}_{args.seed}.csv"
    path.write_text(grid.to_csv())
    print(f"{path} range={grid.value_range:.6g}")
    return 0


def _cmd_report(args) -> int:
    records = load_records(args.in_dir)
    for p in report(records, args.out_dir or args.in_dir):
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="benqo-bench", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write seeded instances as JSON")
    p.add_argument("--problem", choices=("maxcut", "tsp"), default="maxcut")
    p.add_argument("--sizes", type=int, nargs="+", default=[3])
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("run", help="run a campaign from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=None, help="override base_seed")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("landscape", help="sample a loss landscape on a random plane")
    p.add_argument("--algorithm", choices=_LANDSCAPE_ALGS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--problem", choices=("maxcut", "tsp"), default="maxcut")
    p.add_argument("--resolution", type=int, default=101)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_landscape)

    p = sub.add_parser("report", help="rebuild CSV tables from records.jsonl")
    p.add_argument("--in-dir", required=True)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (InvalidInputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
