"""Deterministic tick-based foraging world.

Coordinates are meters with the origin at the arena's south-west corner;
headings are radians counter-clockwise from +x. Robot state is stored as
parallel numpy arrays so the per-tick kernels can work on it directly;
:attr:`WorldState.robots` and :attr:`WorldState.pucks` give object views.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import kernels

TWO_PI = 2.0 * math.pi

ROBOT_DIAMETER = 0.065
PUCK_DIAMETER = 0.1
BASE_DIAMETER = 0.3
COLLISION_RADIUS = 0.04
ARENA_SIDE = 1.5
MAX_ATTEMPTS = 10_000
# densest possible packing of equal discs in the plane
HEX_PACKING = math.pi / (2.0 * math.sqrt(3.0))

SNAPSHOT_HEADER = "# swarmforage-snapshot v1"


class PlacementError(RuntimeError):
    """Robots could not be placed without overlap."""


class SpawnError(RuntimeError):
    """No free position found for a new puck."""


class Mode(IntEnum):
    SEARCHING = 0
    RETURNING = 1
    AVOIDING = 2


_MODE_FLAG = {Mode.SEARCHING: "S", Mode.RETURNING: "R", Mode.AVOIDING: "A"}


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class Base:
    center: Vec2
    diameter: float = BASE_DIAMETER


@dataclass(frozen=True)
class ArenaSpec:
    id: str
    side: float
    bases: tuple[Base, ...]

    def __post_init__(self):
        if self.side <= 0:
            raise ValueError("arena side must be positive")
        if not self.bases:
            raise ValueError("arena needs at least one base")
        for b in self.bases:
            r = b.diameter / 2.0
            c = b.center
            if not (r <= c.x <= self.side - r and r <= c.y <= self.side - r):
                raise ValueError(f"base at ({c.x}, {c.y}) leaves the arena")


ARENA_IDS = ("Arena1", "Arena2", "Arena3")


def make_arena(arena_id: str, side: float = ARENA_SIDE,
               base_diameter: float = BASE_DIAMETER) -> ArenaSpec:
    """Build one of the three standard layouts.

    Arena1 has a centred base, Arena2 one base in the south-west corner and
    Arena3 two bases near opposite corners. Corner bases sit 5 cm off both
    walls.
    """
    inset = base_diameter / 2.0 + 0.05
    if arena_id == "Arena1":
        centers = [Vec2(side / 2.0, side / 2.0)]
    elif arena_id == "Arena2":
        centers = [Vec2(inset, inset)]
    elif arena_id == "Arena3":
        centers = [Vec2(inset, inset), Vec2(side - inset, side - inset)]
    else:
        raise ValueError(f"unknown arena {arena_id!r}; expected one of {ARENA_IDS}")
    return ArenaSpec(arena_id, side, tuple(Base(c, base_diameter) for c in centers))


@dataclass(frozen=True)
class RobotBody:
    id: int
    position: Vec2
    heading: float
    diameter: float
    speed: float
    mode: Mode
    carrying: bool


@dataclass(frozen=True)
class Puck:
    id: int
    position: Vec2
    diameter: float = PUCK_DIAMETER


class WorldState:
    """All mutable simulation state for one run."""

    def __init__(self, arena: ArenaSpec, n_robots: int, rng: np.random.Generator,
                 speed: float = 0.1, robot_diameter: float = ROBOT_DIAMETER,
                 puck_diameter: float = PUCK_DIAMETER):
        self.arena = arena
        self.rng = rng
        self.speed = float(speed)
        self.robot_diameter = float(robot_diameter)
        self.puck_diameter = float(puck_diameter)
        self.x = np.zeros(n_robots)
        self.y = np.zeros(n_robots)
        self.heading = np.zeros(n_robots)
        self.mode = np.zeros(n_robots, dtype=np.int8)
        self.carrying = np.zeros(n_robots, dtype=bool)
        self.target = np.full(n_robots, -1, dtype=np.int64)
        self.wall_turned = np.zeros(n_robots, dtype=bool)
        self.puck_x = np.zeros(0)
        self.puck_y = np.zeros(0)
        self.puck_ids = np.zeros(0, dtype=np.int64)
        self.next_puck_id = 0
        self.tick = 0
        self.dt = 0.1
        self.clock = 0.0
        self.score = 0
        self.pickups = 0
        self._base_xy = np.array([[b.center.x, b.center.y] for b in arena.bases])
        self._base_r = np.array([b.diameter / 2.0 for b in arena.bases])

    @property
    def n_robots(self) -> int:
        return len(self.x)

    @property
    def robots(self) -> list[RobotBody]:
        return [
            RobotBody(i, Vec2(float(self.x[i]), float(self.y[i])), float(self.heading[i]),
                      self.robot_diameter, self.speed, Mode(int(self.mode[i])),
                      bool(self.carrying[i]))
            for i in range(self.n_robots)
        ]

    @property
    def pucks(self) -> list[Puck]:
        return [
            Puck(int(pid), Vec2(float(px), float(py)), self.puck_diameter)
            for pid, px, py in zip(self.puck_ids, self.puck_x, self.puck_y)
        ]

    def carried_count(self) -> int:
        return int(self.carrying.sum())

    def digest_into(self, hasher) -> None:
        """Feed the exact binary state into a hashlib object."""
        for arr in (self.x, self.y, self.heading, self.mode, self.carrying,
                    self.puck_x, self.puck_y, self.puck_ids):
            hasher.update(arr.tobytes())
        hasher.update(np.array([self.tick, self.score], dtype=np.int64).tobytes())

    def snapshot(self) -> str:
        """Line-oriented dump: ``kind id x y heading flags`` per entity.

        Robot flags are the mode letter (S/R/A) followed by 1 if carrying
        else 0; puck flags are ``-``; base flags give the diameter. Floats are
        written with ``repr`` so the text round-trips exactly.
        """
        lines = [f"{SNAPSHOT_HEADER} tick={self.tick} clock={self.clock!r} score={self.score}"]
        for i in range(self.n_robots):
            flag = _MODE_FLAG[Mode(int(self.mode[i]))] + ("1" if self.carrying[i] else "0")
            lines.append(f"robot {i} {float(self.x[i])!r} {float(self.y[i])!r} "
                         f"{float(self.heading[i])!r} {flag}")
        for pid, px, py in zip(self.puck_ids, self.puck_x, self.puck_y):
            lines.append(f"puck {int(pid)} {float(px)!r} {float(py)!r} 0.0 -")
        for k, b in enumerate(self.arena.bases):
            lines.append(f"base {k} {b.center.x!r} {b.center.y!r} 0.0 d={b.diameter!r}")
        return "\n".join(lines) + "\n"


def nearest_base_index(position: Vec2, arena: ArenaSpec) -> int:
    best, best_d = 0, math.inf
    for k, b in enumerate(arena.bases):
        d = math.hypot(position.x - b.center.x, position.y - b.center.y)
        if d < best_d:
            best, best_d = k, d
    return best


def nearest_base(position: Vec2, arena: ArenaSpec) -> Vec2:
    """Centre of the closest base; ties go to the lowest base index."""
    return arena.bases[nearest_base_index(position, arena)].center


def init_world(config, seed) -> WorldState:
    """Place robots and the initial pucks uniformly at random.

    ``config`` needs ``arena``, ``robot_count``, ``puck_count``, ``arena_side``
    and ``speed`` attributes (an :class:`~swarmforage.harness.ExperimentConfig`).
    ``seed`` is anything ``numpy.random.default_rng`` accepts.
    """
    arena = make_arena(config.arena, config.arena_side)
    n = int(config.robot_count)
    if n < 1:
        raise ValueError("robot_count must be >= 1")
    world = WorldState(arena, n, np.random.default_rng(seed), speed=config.speed)
    world.dt = float(config.dt)
    d = world.robot_diameter
    r = d / 2.0
    side = arena.side
    if n * math.pi * r * r > HEX_PACKING * side * side:
        raise PlacementError(f"{n} robots of diameter {d} m cannot fit in a {side} m arena")
    rng = world.rng
    for i in range(n):
        for _ in range(MAX_ATTEMPTS):
            px, py = rng.uniform(r, side - r, size=2)
            if i == 0 or np.min(np.hypot(world.x[:i] - px, world.y[:i] - py)) >= d:
                break
        else:
            raise PlacementError(f"could not place robot {i} after {MAX_ATTEMPTS} attempts")
        world.x[i] = px
        world.y[i] = py
    world.heading[:] = rng.uniform(0.0, TWO_PI, size=n)
    for _ in range(int(config.puck_count)):
        spawn_puck(world)
    return world


def spawn_puck(world: WorldState, slot: int | None = None) -> Puck:
    """Drop a new puck uniformly at random, clear of bases and robots.

    With ``slot`` the puck replaces that entry of the free-puck arrays,
    otherwise it is appended.
    """
    pr = world.puck_diameter / 2.0
    side = world.arena.side
    base_clear = world._base_r + pr
    robot_clear = world.robot_diameter / 2.0 + pr
    rng = world.rng
    for _ in range(MAX_ATTEMPTS):
        px, py = rng.uniform(pr, side - pr, size=2)
        if np.any(np.hypot(world._base_xy[:, 0] - px, world._base_xy[:, 1] - py) < base_clear):
            continue
        if np.any(np.hypot(world.x - px, world.y - py) < robot_clear):
            continue
        break
    else:
        raise SpawnError(f"no free puck position after {MAX_ATTEMPTS} attempts")
    pid = world.next_puck_id
    world.next_puck_id += 1
    if slot is None:
        world.puck_x = np.append(world.puck_x, px)
        world.puck_y = np.append(world.puck_y, py)
        world.puck_ids = np.append(world.puck_ids, pid)
    else:
        world.puck_x[slot] = px
        world.puck_y[slot] = py
        world.puck_ids[slot] = pid
    return Puck(pid, Vec2(float(px), float(py)), world.puck_diameter)


def try_pickup(world: WorldState, i: int) -> bool:
    """Pick up the nearest overlapping puck if robot ``i`` is searching.

    On success the robot switches to Returning, remembers the base nearest
    to its current position and a replacement puck is spawned.
    """
    if world.carrying[i] or world.mode[i] != Mode.SEARCHING or len(world.puck_x) == 0:
        return False
    dist = np.hypot(world.puck_x - world.x[i], world.puck_y - world.y[i])
    k = int(np.argmin(dist))
    if dist[k] >= (world.robot_diameter + world.puck_diameter) / 2.0:
        return False
    world.carrying[i] = True
    world.mode[i] = Mode.RETURNING
    world.target[i] = nearest_base_index(Vec2(float(world.x[i]), float(world.y[i])), world.arena)
    world.pickups += 1
    spawn_puck(world, slot=k)
    return True


def try_deliver(world: WorldState, i: int) -> bool:
    """Drop the carried puck if robot ``i``'s centre is inside any base."""
    if not world.carrying[i]:
        return False
    d = np.hypot(world._base_xy[:, 0] - world.x[i], world._base_xy[:, 1] - world.y[i])
    if not np.any(d < world._base_r):
        return False
    world.carrying[i] = False
    world.mode[i] = Mode.SEARCHING
    world.target[i] = -1
    world.score += 1
    return True


def near_walls(x: float, y: float, side: float, diameter: float = ROBOT_DIAMETER,
               radius: float = COLLISION_RADIUS) -> list[float]:
    """Inward normals (radians) of every wall within ``radius`` of the body."""
    r = diameter / 2.0
    normals = []
    if x - r < radius:
        normals.append(0.0)
    if side - x - r < radius:
        normals.append(math.pi)
    if y - r < radius:
        normals.append(math.pi / 2.0)
    if side - y - r < radius:
        normals.append(1.5 * math.pi)
    return normals


def wall_rule(position: Vec2, arena: ArenaSpec, rng: np.random.Generator,
              diameter: float = ROBOT_DIAMETER) -> float:
    """Random heading pointing back into the arena.

    Uniform over the open half-plane of inward directions for one nearby
    wall, or over the inward quarter-plane in a corner.
    """
    normals = near_walls(position.x, position.y, arena.side, diameter)
    if not normals:
        raise ValueError("wall_rule called for a robot that is not near a wall")
    sx = sum(math.cos(a) for a in normals)
    sy = sum(math.sin(a) for a in normals)
    mid = math.atan2(sy, sx)
    spread = max(abs(math.remainder(a - mid, TWO_PI)) for a in normals)
    half = math.pi / 2.0 - spread
    return (mid + (2.0 * rng.random() - 1.0) * half) % TWO_PI


def _heads_outward(heading: float, normals: list[float]) -> bool:
    return any(math.cos(heading - a) <= 0.0 for a in normals)


def step_world(world: WorldState, commands, dt: float | None = None) -> WorldState:
    """Advance one tick.

    ``commands`` holds one world-frame heading per robot; NaN means Stop.
    Moving robots turn to their command and travel ``speed * dt``, sliding
    along any robot or wall they touch. Deliveries, pickups (with respawn)
    and the wall rule follow, in robot index order. Returning robots are
    exempt from the wall rule since they steer for a base;
    ``world.wall_turned`` flags the robots it turned this tick.
    """
    dt = world.dt if dt is None else float(dt)
    if dt <= 0:
        raise ValueError("dt must be positive")
    cmd = np.asarray(commands, dtype=float)
    if cmd.shape != (world.n_robots,):
        raise ValueError(f"expected {world.n_robots} commands, got shape {cmd.shape}")
    moving = ~np.isnan(cmd)
    world.heading[moving] = np.mod(cmd[moving], TWO_PI)
    step = world.speed * dt
    dx = np.where(moving, step * np.cos(world.heading), 0.0)
    dy = np.where(moving, step * np.sin(world.heading), 0.0)
    kernels.move_clamped(world.x, world.y, dx, dy, world.robot_diameter, world.arena.side)
    for i in range(world.n_robots):
        if world.carrying[i]:
            try_deliver(world, i)
        elif world.mode[i] == Mode.SEARCHING:
            try_pickup(world, i)
    side = world.arena.side
    world.wall_turned[:] = False
    for i in np.flatnonzero(world.mode != Mode.RETURNING):
        normals = near_walls(world.x[i], world.y[i], side, world.robot_diameter)
        if normals and _heads_outward(world.heading[i], normals):
            pos = Vec2(float(world.x[i]), float(world.y[i]))
            world.heading[i] = wall_rule(pos, world.arena, world.rng, world.robot_diameter)
            world.wall_turned[i] = True
    world.tick += 1
    world.clock += dt
    return world
