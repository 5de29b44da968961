"""Fixed collision responses and the macro-actions built from them.

Actions are body-relative sector indices: action ``k`` means "drive along
bearing ``45 * k`` degrees" at the robot's fixed speed. :data:`STOP` is the
only non-directional command and lasts a single tick.
"""
from __future__ import annotations

import math
from enum import Enum

from .sensing import N_SECTORS, SensorFrame

STOP = -1

FIXED_POLICIES = ("random", "dynwin", "repel", "aggression")

_UNIT = [(math.cos(k * math.pi / 4.0), math.sin(k * math.pi / 4.0)) for k in range(N_SECTORS)]


class MacroAction(Enum):
    REPEL = "repel"
    DYNAMIC_WINDOW = "dynwin"
    AGGRESSION = "aggression"


MACRO_ACTIONS = (MacroAction.REPEL, MacroAction.DYNAMIC_WINDOW, MacroAction.AGGRESSION)


def sector_distance(a: int, b: int) -> int:
    d = (a - b) % N_SECTORS
    return min(d, N_SECTORS - d)


def random_policy(rng) -> int:
    return int(rng.integers(N_SECTORS))


def dynamic_window(frame: SensorFrame, current: int = 0) -> int:
    """Free sector closest to ``current``; counter-clockwise wins ties."""
    for k in range(N_SECTORS // 2 + 1):
        for cand in ((current + k) % N_SECTORS, (current - k) % N_SECTORS):
            if not frame.occupied[cand]:
                return cand
    return STOP


def _free_sectors(frame: SensorFrame) -> list[int]:
    return [i for i, occ in enumerate(frame.occupied) if not occ]


def repel(frame: SensorFrame, rng=None) -> int:
    """Head opposite the vector sum of occupied sector directions.

    The negated sum is snapped to the nearest of the eight actions (halfway
    cases round up to the higher index). A zero sum falls back to a uniform
    random free sector, or :data:`STOP` when none is free.
    """
    occ = [i for i, o in enumerate(frame.occupied) if o]
    if not occ:
        raise ValueError("repel needs at least one occupied sector")
    sx = sum(_UNIT[i][0] for i in occ)
    sy = sum(_UNIT[i][1] for i in occ)
    if math.hypot(sx, sy) < 1e-9:
        free = _free_sectors(frame)
        if not free:
            return STOP
        if rng is None:
            raise ValueError("repel needs an rng to break a balanced frame")
        return free[int(rng.integers(len(free)))]
    away = math.degrees(math.atan2(-sy, -sx)) % 360.0
    return int(math.floor(away / 45.0 + 0.5 + 1e-9)) % N_SECTORS


def nearest_occupied(frame: SensorFrame) -> int:
    """Occupied sector angularly closest to straight ahead."""
    occ = [i for i, o in enumerate(frame.occupied) if o]
    if not occ:
        raise ValueError("frame has no occupied sector")
    # equal distance: the counter-clockwise side (lower index) wins
    return min(occ, key=lambda i: (sector_distance(i, 0), i))


def aggression(frame: SensorFrame, rng=None, level: float | None = None) -> int:
    """Push straight on if the drawn aggression level is at least 0.5,
    else back off directly away from the nearest occupied sector."""
    if not any(frame.occupied):
        raise ValueError("aggression needs at least one occupied sector")
    if level is None:
        level = float(rng.random())
    if level >= 0.5:
        return 0
    return (nearest_occupied(frame) + N_SECTORS // 2) % N_SECTORS


class MacroRun:
    """One execution of an atomic macro-action.

    The per-tick command is recomputed from the current frame; an aggression
    level is drawn once when the macro starts. Termination (all-Clear frame or
    timeout) is decided by the caller.
    """

    def __init__(self, kind: MacroAction, rng):
        self.kind = kind
        self.level = float(rng.random()) if kind is MacroAction.AGGRESSION else None

    def command(self, frame: SensorFrame, rng) -> int:
        if not any(frame.occupied):
            return 0
        if self.kind is MacroAction.REPEL:
            return repel(frame, rng)
        if self.kind is MacroAction.DYNAMIC_WINDOW:
            return dynamic_window(frame, 0)
        return aggression(frame, level=self.level)
