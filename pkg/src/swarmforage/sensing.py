"""Eight-sector neighbour sensing and its two encodings.

Sector ``i`` looks along body-relative bearing ``45 * i`` degrees (sector 0
is straight ahead, angles counter-clockwise). Walls are not sensed.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import kernels
from .sim import COLLISION_RADIUS, WorldState

N_SECTORS = 8


class ModularState(IntEnum):
    CLEAR = 0
    COLLISION = 1


@dataclass(frozen=True)
class SensorFrame:
    occupied: tuple[bool, ...]

    def __post_init__(self):
        if len(self.occupied) != N_SECTORS:
            raise ValueError(f"a frame has {N_SECTORS} sectors, got {len(self.occupied)}")

    @classmethod
    def from_code(cls, code: int) -> "SensorFrame":
        if not 0 <= code < 256:
            raise ValueError(f"full-state code out of range: {code}")
        return cls(tuple(bool(code >> i & 1) for i in range(N_SECTORS)))

    @classmethod
    def from_sectors(cls, *sectors: int) -> "SensorFrame":
        occ = [False] * N_SECTORS
        for s in sectors:
            occ[s % N_SECTORS] = True
        return cls(tuple(occ))


def sense_world(world: WorldState, radius: float = COLLISION_RADIUS):
    """Codes and contact adjacency for every robot at once (hot path)."""
    return kernels.sense_all(world.x, world.y, world.heading, world.robot_diameter, radius)


def sense(robot: int, world: WorldState, radius: float = COLLISION_RADIUS) -> SensorFrame:
    codes, _ = sense_world(world, radius)
    return SensorFrame.from_code(int(codes[robot]))


def encode_full(frame: SensorFrame) -> int:
    return sum(1 << i for i, occ in enumerate(frame.occupied) if occ)


def decompose(frame: SensorFrame) -> tuple[ModularState, ...]:
    return tuple(ModularState.COLLISION if occ else ModularState.CLEAR for occ in frame.occupied)


def recompose(states) -> SensorFrame:
    return SensorFrame(tuple(s == ModularState.COLLISION for s in states))


def collision_trigger(frame: SensorFrame) -> bool:
    return any(frame.occupied)


# lookup tables so per-tick code paths never build frame objects
CODE_STATES = np.array([[(c >> i) & 1 for i in range(N_SECTORS)] for c in range(256)],
                       dtype=np.int8)
