"""Command-line entry point: ``run``, ``sweep``, ``plot`` and ``inspect-policy``.

Exit codes: 0 when at least one run succeeded (or the command had no runs to
do), 2 for configuration, input or checkpoint errors, 3 when every run failed.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import checkpoint
from .config import EXPERIMENTS, SCALES, ConfigError, ExperimentConfig, build_grid, \
    load_config_file, make_config, parse_override
from .harness import MetricsRecord, aggregate, execute, run_sweep
from .reporting import read_results_csv, write_plan_csv, write_results_csv, \
    write_results_json, write_stage_log, write_summary_csv
from .sim import ARENA_IDS, PlacementError, SpawnError
from .svgplot import PlotSpec, emit_svg

log = logging.getLogger("swarmforage")

EXIT_OK, EXIT_CONFIG, EXIT_ALL_FAILED = 0, 2, 3

PLOT_TITLES = {
    "headtohead": "Modular vs full-state learners and fixed policies, {arena}",
    "robustness": "Reward robustness (diff vs self), {arena}",
    "action-space": "Vectorial vs algorithmic action spaces, {arena}",
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help="run seed (run) or first seed of the sweep (sweep); ignored elsewhere")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--out-dir", type=Path, default=Path("."), help="directory for output files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swarmforage",
                                     description="Swarm foraging with modular learners.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="train and evaluate one configuration")
    p.add_argument("config", type=Path, help="YAML config file")
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                   help="replace one config field (repeatable)")
    p.add_argument("--stage-log", action="store_true", help="write eval-phase stages.csv")
    p.add_argument("--trace", type=float, default=None, metavar="SECONDS",
                   help="write world snapshots every SECONDS of the eval phase to trace.txt")
    p.add_argument("--checkpoint", action="store_true",
                   help="write the trained learners to checkpoint.txt")
    _common(p)

    p = sub.add_parser("sweep", help="run a grid of configurations")
    p.add_argument("config", type=Path, nargs="?", help="optional YAML config (run + sweep)")
    p.add_argument("--preset", choices=sorted(SCALES), default=None)
    p.add_argument("--experiment", choices=sorted(EXPERIMENTS), default=None)
    p.add_argument("--arenas", nargs="+", choices=ARENA_IDS, default=None)
    p.add_argument("--robot-counts", nargs="+", type=int, default=None)
    p.add_argument("--seeds", type=int, default=None, help="number of seeds")
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--dry-run", action="store_true",
                   help="only write plan.csv with the enumerated grid")
    p.add_argument("--no-plot", action="store_true")
    _common(p)

    p = sub.add_parser("plot", help="summaries and SVG plots from a results CSV")
    p.add_argument("results", type=Path)
    p.add_argument("--title", default="Pucks collected, {arena}")
    _common(p)

    p = sub.add_parser("inspect-policy", help="print the tables stored in a checkpoint")
    p.add_argument("checkpoint", type=Path)
    _common(p)
    return parser


RECONSTRUCTED_NOTE = ("note: repel and aggression (fixed policies and algorithmic macro-actions) "
                      "are simplified reconstructions, not the original algorithms")


def _uses_reconstructed(configs) -> bool:
    return any(c.policy in ("repel", "aggression") or c.action_space == "algorithmic"
               for c in configs)


def _with_overrides(cfg: ExperimentConfig, overrides) -> ExperimentConfig:
    changes = dict(parse_override(o) for o in overrides)
    return make_config(cfg, **changes) if changes else cfg


def _summaries(records, out_dir: Path, title: str, plot: bool) -> None:
    rows = aggregate(records)
    for arena in sorted({r.arena for r in rows}):
        arena_rows = [r for r in rows if r.arena == arena]
        write_summary_csv(arena_rows, out_dir / f"summary_{arena}.csv")
        if plot:
            emit_svg(arena_rows, PlotSpec(title=title.format(arena=arena)),
                     out_dir / f"plot_{arena}.svg")


def cmd_run(args) -> int:
    cfg, _ = load_config_file(args.config)
    cfg = _with_overrides(cfg, args.override)
    if args.seed is not None:
        cfg = make_config(cfg, seed=args.seed)
    args.out_dir.mkdir(parents=True, exist_ok=True)

    snapshots = []
    every = max(1, round(args.trace / cfg.dt)) if args.trace else 0

    def on_tick(world):
        if world.tick % every == 0:
            snapshots.append(world.snapshot())

    try:
        result = execute(cfg, keep_stages=args.stage_log,
                         on_eval_tick=on_tick if every else None)
    except (PlacementError, SpawnError) as exc:
        log.error("run failed: %s", exc)
        record = MetricsRecord(config=cfg, error=f"{type(exc).__name__}: {exc}")
        write_results_csv([record], args.out_dir / "results.csv")
        write_results_json([record], args.out_dir / "results.json")
        return EXIT_ALL_FAILED
    m = result.metrics
    write_results_csv([m], args.out_dir / "results.csv")
    write_results_json([m], args.out_dir / "results.json")
    if args.stage_log:
        write_stage_log(result.stage_rows, args.out_dir / "stages.csv")
    if args.trace:
        (args.out_dir / "trace.txt").write_text("".join(snapshots))
    if args.checkpoint and cfg.learns:
        checkpoint.save(result.agents, args.out_dir / "checkpoint.txt")
    sys.stdout.write((args.out_dir / "results.csv").read_text())
    if _uses_reconstructed([cfg]):
        print(RECONSTRUCTED_NOTE)
    return EXIT_OK


def cmd_sweep(args) -> int:
    base, sweep = (load_config_file(args.config) if args.config else (ExperimentConfig(), {}))
    base = _with_overrides(base, args.override)
    experiment = args.experiment or sweep.get("experiment", "headtohead")
    preset = args.preset or sweep.get("preset", "desk")
    seeds = args.seeds if args.seeds is not None else sweep.get("seeds")
    if args.seed is not None:
        if seeds is None:
            count = SCALES[preset]["seeds"]
        elif isinstance(seeds, int):
            count = seeds
        else:
            count = len(seeds)
        seeds = list(range(args.seed, args.seed + count))
    grid = build_grid(experiment, preset, base,
                      arenas=args.arenas or sweep.get("arenas"),
                      robot_counts=args.robot_counts or sweep.get("robot_counts"),
                      seeds=seeds)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_plan_csv(grid, args.out_dir / "plan.csv")
    if args.dry_run:
        print(f"{len(grid)} runs planned -> {args.out_dir / 'plan.csv'}")
        return EXIT_OK
    records = run_sweep(grid, jobs=args.jobs)
    write_results_csv(records, args.out_dir / "results.csv")
    write_results_json(records, args.out_dir / "results.json")
    failed = [r for r in records if r.error]
    for r in failed:
        log.warning("run failed: %s seed=%s n=%s: %s", r.config.series, r.config.seed,
                    r.config.robot_count, r.error)
    if len(failed) == len(records):
        return EXIT_ALL_FAILED
    _summaries(records, args.out_dir, PLOT_TITLES[experiment], not args.no_plot)
    print(f"{len(records) - len(failed)}/{len(records)} runs succeeded -> {args.out_dir}")
    if _uses_reconstructed(grid):
        print(RECONSTRUCTED_NOTE)
    return EXIT_OK


def cmd_plot(args) -> int:
    try:
        records = read_results_csv(args.results)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read results {args.results}: {exc}") from None
    ok = [r for r in records if not r.error]
    if not ok:
        log.error("no successful runs in %s", args.results)
        return EXIT_ALL_FAILED
    args.out_dir.mkdir(parents=True, exist_ok=True)
    _summaries(ok, args.out_dir, args.title, True)
    return EXIT_OK


def cmd_inspect_policy(args) -> int:
    policy, agents = checkpoint.load(args.checkpoint)
    text = checkpoint.report(policy, agents)
    sys.stdout.write(text)
    if args.out_dir != Path("."):
        args.out_dir.mkdir(parents=True, exist_ok=True)
        (args.out_dir / "policy_report.txt").write_text(text)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "plot": cmd_plot,
            "inspect-policy": cmd_inspect_policy}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, checkpoint.CheckpointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
