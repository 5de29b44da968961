import csv
import subprocess
import sys
from pathlib import Path

import pytest

from swarmforage.cli import build_parser, main
from swarmforage.harness import SummaryRow
from swarmforage.svgplot import PlotSpec, emit_svg, render_svg

GOLDEN = Path(__file__).parent / "data"

CONFIG = """\
version: 1
run:
  arena: Arena1
  policy: modular
  robot_count: 6
  train_duration: 20
  eval_duration: 10
"""


@pytest.fixture
def config_file(tmp_path):
    p = tmp_path / "run.yaml"
    p.write_text(CONFIG)
    return p


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_run_writes_one_row(config_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", str(config_file), "--out-dir", str(out)]) == 0
    rows = read_rows(out / "results.csv")
    assert len(rows) == 1 and rows[0]["error"] == ""
    assert (out / "results.csv").read_text().splitlines()[0] == \
        (GOLDEN / "results_header.csv").read_text().strip()
    assert "pucks_collected" in capsys.readouterr().out


def test_override_is_echoed(config_file, tmp_path):
    out = tmp_path / "out"
    assert main(["run", str(config_file), "--override", "robot_count=12",
                 "--seed", "9", "--out-dir", str(out)]) == 0
    row = read_rows(out / "results.csv")[0]
    assert row["robot_count"] == "12" and row["seed"] == "9"


def test_unknown_policy_exits_nonzero(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text("version: 1\nrun:\n  policy: teleport\n")
    assert main(["run", str(p), "--out-dir", str(tmp_path)]) == 2
    assert "teleport" in capsys.readouterr().err


def test_bad_config_files(tmp_path):
    for text in ("version: 2\n", "run: [1, 2]\n", "extra: 1\n", "run:\n  warp: 9\n", "{{{"):
        p = tmp_path / "c.yaml"
        p.write_text(text)
        assert main(["run", str(p), "--out-dir", str(tmp_path)]) == 2
    assert main(["run", str(tmp_path / "missing.yaml")]) == 2
    assert main(["run", str(tmp_path / "c.yaml"), "--override", "noequals"]) == 2


def test_impossible_placement_exit_code(config_file, tmp_path):
    out = tmp_path / "out"
    assert main(["run", str(config_file), "--override", "robot_count=10000",
                 "--out-dir", str(out)]) == 3
    assert read_rows(out / "results.csv")[0]["error"].startswith("PlacementError")


def test_run_side_outputs_and_inspect(config_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", str(config_file), "--out-dir", str(out), "--stage-log",
                 "--trace", "5", "--checkpoint"]) == 0
    stages = read_rows(out / "stages.csv")
    assert len(stages) == int(read_rows(out / "results.csv")[0]["stages"])
    trace = (out / "trace.txt").read_text()
    assert trace.count("# swarmforage-snapshot v1") == 2
    capsys.readouterr()
    assert main(["inspect-policy", str(out / "checkpoint.txt")]) == 0
    text = capsys.readouterr().out
    assert text.startswith("policy: modular  robots: 6")
    pulls = [int(ln.split()[-1]) for ln in text.splitlines() if " arm " in ln]
    assert len(pulls) == 6 * 64 and min(pulls) >= 0


def test_inspect_corrupted_checkpoint(tmp_path, capsys):
    p = tmp_path / "ck.txt"
    p.write_text("swarmforage-checkpoint 1\npolicy modular\nrobots two\n")
    assert main(["inspect-policy", str(p)]) == 2
    p.write_text("swarmforage-checkpoint 7\n")
    assert main(["inspect-policy", str(p)]) == 2
    assert "version" in capsys.readouterr().err


def test_sweep_dry_run_plan(tmp_path):
    assert main(["sweep", "--preset", "smoke", "--experiment", "action-space",
                 "--dry-run", "--out-dir", str(tmp_path)]) == 0
    plan = read_rows(tmp_path / "plan.csv")
    assert len(plan) == 3 * 2 * 2 * 1
    assert not (tmp_path / "results.csv").exists()


def test_sweep_and_plot(tmp_path):
    out = tmp_path / "sweep"
    assert main(["sweep", "--preset", "smoke", "--experiment", "headtohead",
                 "--arenas", "Arena2", "--seeds", "2", "--seed", "10",
                 "--out-dir", str(out)]) == 0
    rows = read_rows(out / "results.csv")
    assert {r["seed"] for r in rows} == {"10", "11"}
    assert {r["label"] for r in rows} == {"random", "dynwin", "modular", "rlearn", "ctq"}
    assert (out / "summary_Arena2.csv").read_text().splitlines()[0] == \
        (GOLDEN / "summary_header.csv").read_text().strip()
    svg = (out / "plot_Arena2.svg").read_text()
    assert svg.count('class="series"') == 5
    replot = tmp_path / "replot"
    assert main(["plot", str(out / "results.csv"), "--out-dir", str(replot)]) == 0
    assert (replot / "summary_Arena2.csv").read_text() == \
        (out / "summary_Arena2.csv").read_text()


def test_reconstructed_macros_are_flagged(tmp_path, capsys):
    assert main(["sweep", "--preset", "smoke", "--experiment", "action-space",
                 "--arenas", "Arena1", "--robot-counts", "4", "--out-dir", str(tmp_path)]) == 0
    assert "reconstructions" in capsys.readouterr().out


def test_plot_rejects_foreign_csv(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    assert main(["plot", str(p), "--out-dir", str(tmp_path)]) == 2


def test_help_lists_flags():
    sub = build_parser()._subparsers._group_actions[0].choices
    for name in ("run", "sweep", "plot", "inspect-policy"):
        text = sub[name].format_help()
        for flag in ("--seed", "--jobs", "--out-dir"):
            assert flag in text
    assert "--override" in sub["run"].format_help()
    assert "--preset" in sub["sweep"].format_help()


def test_console_module_help():
    res = subprocess.run([sys.executable, "-m", "swarmforage.cli", "--help"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "inspect-policy" in res.stdout


# --- SVG ---------------------------------------------------------------------

def rows(*spec):
    return [SummaryRow("Arena1", s, n, 2, m, e) for s, n, m, e in spec]


def test_svg_structure():
    svg = render_svg(rows(("modular", 4, 10.0, 1.0), ("modular", 8, 12.0, 0.5)))
    assert svg.count("<polyline") == 1
    assert svg.count('class="errbar"') == 2
    assert svg.count("<circle") == 2


def test_svg_is_deterministic(tmp_path):
    data = rows(("a", 4, 3.0, 0.2), ("b", 4, 5.0, None), ("b", 8, 6.0, 1.0))
    a = emit_svg(data, PlotSpec("t"), tmp_path / "a.svg")
    b = emit_svg(data, PlotSpec("t"), tmp_path / "b.svg")
    assert a.read_bytes() == b.read_bytes()


def test_svg_undefined_stderr_draws_point_only():
    svg = render_svg(rows(("solo", 4, 3.0, None)))
    assert svg.count("<circle") == 1
    assert 'class="errbar"' not in svg


def test_svg_missing_point_breaks_line():
    svg = render_svg(rows(("a", 4, 1.0, None), ("a", 12, 2.0, None), ("a", 16, 2.5, None),
                          ("b", 8, 1.0, None)))
    assert svg.count('data-series="a"') == 2
