"""Command-line entry point.

Subcommands: ``run`` (execute an experiment sweep from a JSON config),
``gen-reqs`` (calibrated requirement suite for a landscape), ``rank``
(re-rank a finished sweep), ``synth`` (write a synthetic landscape CSV).
"""

from __future__ import annotations

import argparse
import csv
import statistics
import sys
from pathlib import Path

from . import landscape as landscape_mod
from . import harness, reqgen


def _cmd_run(args) -> int:
    config = harness.ExperimentConfig.from_json(args.config)
    if args.jobs is not None:
        config.jobs = args.jobs
    if args.no_early_stop:
        config.early_stop = False
    result = harness.run_experiment(config)
    harness.emit_trajectory_plots_data(result["out_dir"])
    print(f"results written to {result['out_dir']}")
    for name, count in sorted(result["best_rank_counts"].items()):
        print(f"  {name}: rank-1 in {count} cells")
    if result["failures"]:
        print(f"{len(result['failures'])} run(s) failed; see manifest.json",
              file=sys.stderr)
        return 2
    return 0


def _cmd_gen_reqs(args) -> int:
    land = landscape_mod.load_csv(args.landscape)
    spec = reqgen.GenSpec(
        d_levels=tuple(float(x) for x in args.d.split(",")),
        types=args.types,
        seed=args.seed,
    )
    out_dir = args.out or (Path(args.landscape).stem + "_reqs")
    entries = reqgen.generate_suite(land, spec, out_dir=out_dir)
    print(f"{len(entries)} requirement(s) written to {out_dir}")
    return 0


def _cmd_rank(args) -> int:
    results = Path(args.results)
    summary = results / "summary.csv"
    if not summary.exists():
        print(f"no summary.csv under {results}", file=sys.stderr)
        return 1
    # rebuild per-cell samples from the stored trajectories and re-rank
    cells = {}
    for path in sorted(results.glob("*/*/*/seed*.csv")):
        tuner = path.parent.name
        cell = (path.parts[-4], path.parts[-3])
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        if rows:
            cells.setdefault(cell, {}).setdefault(tuner, []).append(
                float(rows[-1]["best_pt_score"]))
    for cell in sorted(cells):
        samples = {t: s for t, s in cells[cell].items() if len(s) >= 2}
        if len(samples) < 2:
            continue
        rank_of = harness.ranks(samples, test=args.test)
        print(f"{cell[0]} / {cell[1]}:")
        for tuner in sorted(samples, key=lambda t: rank_of[t]):
            mean = statistics.fmean(samples[tuner])
            std = statistics.pstdev(samples[tuner])
            print(f"  {tuner}: {mean:.4f} +/- {std:.4f} (rank {rank_of[tuner]})")
    return 0


def _cmd_synth(args) -> int:
    land = landscape_mod.synth(
        seed=args.seed,
        n_options=args.options,
        domain_sizes=args.domain_size,
        shape=args.shape,
    )
    landscape_mod.write_csv(land, args.out)
    print(f"{land.space_size} configurations written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cotune",
        description="Requirement-guided configuration tuning toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment sweep")
    p_run.add_argument("--config", required=True, help="experiment JSON file")
    p_run.add_argument("--jobs", type=int, default=None,
                       help="worker pool size")
    p_run.add_argument("--no-early-stop", action="store_true",
                       help="never stop a tuner on full satisfaction")
    p_run.set_defaults(func=_cmd_run)

    p_gen = sub.add_parser("gen-reqs", help="generate a requirement suite")
    p_gen.add_argument("--landscape", required=True, help="landscape CSV")
    p_gen.add_argument("--d", default="0.001,0.01,0.05,0.2,0.5,0.9",
                       help="comma-separated satisfiability levels")
    p_gen.add_argument("--types", type=int, default=3)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", default=None, help="output directory")
    p_gen.set_defaults(func=_cmd_gen_reqs)

    p_rank = sub.add_parser("rank", help="re-rank a finished sweep")
    p_rank.add_argument("--results", required=True, help="results directory")
    p_rank.add_argument("--test", choices=("welch", "kruskal"),
                        default="welch")
    p_rank.set_defaults(func=_cmd_rank)

    p_synth = sub.add_parser("synth", help="write a synthetic landscape CSV")
    p_synth.add_argument("--seed", type=int, required=True)
    p_synth.add_argument("--options", type=int, required=True)
    p_synth.add_argument("--domain-size", type=int, default=2)
    p_synth.add_argument("--shape", choices=landscape_mod.SHAPES,
                         default="rugged")
    p_synth.add_argument("--out", required=True)
    p_synth.set_defaults(func=_cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
