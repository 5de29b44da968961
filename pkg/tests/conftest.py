import sys

import numpy as np
import pytest

from swarmforage.config import make_config
from swarmforage.sim import WorldState, make_arena


def place(positions, headings=None, arena="Arena1", seed=0, pucks=()):
    """World with robots at the given (x, y) positions and no random placement."""
    n = len(positions)
    world = WorldState(make_arena(arena), n, np.random.default_rng(seed))
    for i, (x, y) in enumerate(positions):
        world.x[i] = x
        world.y[i] = y
    if headings is not None:
        world.heading[:] = headings
    if pucks:
        world.puck_x = np.array([p[0] for p in pucks], dtype=float)
        world.puck_y = np.array([p[1] for p in pucks], dtype=float)
        world.puck_ids = np.arange(len(pucks), dtype=np.int64)
        world.next_puck_id = len(pucks)
    return world


@pytest.fixture
def short_cfg():
    return make_config(robot_count=6, train_duration=30.0, eval_duration=30.0, seed=3)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
