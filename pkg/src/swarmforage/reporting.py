"""CSV/JSON emission for run results, summaries and stage logs."""
from __future__ import annotations

import csv
import json
from pathlib import Path

from .config import make_config
from .harness import CSV_COLUMNS, STAGE_COLUMNS, SUMMARY_COLUMNS, MetricsRecord, SummaryRow

PLAN_COLUMNS = ("arena", "label", "policy", "reward", "action_space", "robot_count", "seed",
                "train_duration", "eval_duration")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def write_results_csv(records, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            row = r.row()
            w.writerow([_cell(row[c]) for c in CSV_COLUMNS])
    return path


def write_results_json(records, path) -> Path:
    path = Path(path)
    payload = []
    for r in records:
        row = r.row()
        row["config"] = r.config.as_dict()
        payload.append(row)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def read_results_csv(path) -> list[MetricsRecord]:
    """Rebuild records (config echo plus metrics) from a results CSV."""
    out = []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path} does not have the results CSV header")
        for row in reader:
            cfg = make_config(
                arena=row["arena"], policy=row["policy"], label=row["label"],
                reward=row["reward"], action_space=row["action_space"],
                robot_count=int(row["robot_count"]), seed=int(row["seed"]),
                train_duration=float(row["train_duration"]),
                eval_duration=float(row["eval_duration"]), dt=float(row["dt"]),
                speed=float(row["speed"]))
            car = row["collective_avg_reward"]
            out.append(MetricsRecord(
                config=cfg, pucks_collected=int(row["pucks_collected"] or 0),
                collision_onsets=int(row["collision_onsets"] or 0),
                stages=int(row["stages"] or 0),
                total_avoid=float(row["total_avoid"] or 0.0),
                total_progress=float(row["total_progress"] or 0.0),
                collective_avg_reward=float(car) if car else None,
                trace_hash=row["trace_hash"], wall_time=float(row["wall_time"] or 0.0),
                error=row["error"]))
    return out


def write_summary_csv(rows: list[SummaryRow], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for r in rows:
            w.writerow([r.arena, r.series, r.robot_count, r.runs, repr(r.mean),
                        "" if r.stderr is None else repr(r.stderr)])
    return path


def write_stage_log(stage_rows, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(STAGE_COLUMNS)
        for row in stage_rows:
            w.writerow([_cell(v) for v in row])
    return path


def write_plan_csv(configs, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PLAN_COLUMNS)
        for c in configs:
            w.writerow([c.arena, c.series, c.policy, c.reward, c.action_space, c.robot_count,
                        c.seed, repr(c.train_duration), repr(c.eval_duration)])
    return path
