"""Collision stages and the rewards computed from them.

A stage starts when a robot first senses a neighbour inside the collision
radius. Its avoidance time ``A`` runs until the frame goes all-Clear (and
stays Clear for the hysteresis window); its progress time ``P`` runs from
there to the next onset. All reward kinds are maximise-better, so the stage
overhead is reported negated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

REWARD_KINDS = ("self", "ei", "diff")
HYSTERESIS = 0.5


@dataclass(frozen=True)
class StageRecord:
    onset: float
    avoid: float
    progress: float
    neighbors: int = 1
    robot: int = 0

    def __post_init__(self):
        if self.avoid < 0 or self.progress < 0:
            raise ValueError("stage intervals must be non-negative")
        if self.neighbors < 1:
            raise ValueError("neighbors counts the robot itself, so it is >= 1")

    @property
    def duration(self) -> float:
        return self.avoid + self.progress


class StageTracker:
    """Streaming stage segmentation for one robot.

    Feed one :meth:`observe` per tick (or per on/off event). ``max_hold``
    bounds a single decision: a robot still colliding that long after onset
    gets its stage closed with ``P = 0`` and a fresh stage opened.
    """

    def __init__(self, robot: int = 0, hysteresis: float = HYSTERESIS,
                 max_hold: float | None = None):
        self.robot = robot
        self.hysteresis = hysteresis
        self.max_hold = max_hold
        self.onset = None
        self.release = None
        self.neighbors: set = set()
        self.last_t = -math.inf

    @property
    def open(self) -> bool:
        return self.onset is not None

    def _close(self, avoid_end: float, t: float) -> StageRecord:
        rec = StageRecord(self.onset, avoid_end - self.onset, t - avoid_end,
                          len(self.neighbors) + 1, self.robot)
        self.onset = None
        self.release = None
        self.neighbors = set()
        return rec

    def _open(self, t, neighbors):
        self.onset = t
        self.release = None
        self.neighbors = set(neighbors)

    def observe(self, t: float, colliding: bool, neighbors=()):
        """Returns ``(closed_record_or_None, opened)``."""
        if t < self.last_t:
            raise ValueError(f"out-of-order time {t} after {self.last_t}")
        self.last_t = t
        if not colliding:
            if self.onset is not None and self.release is None:
                self.release = t
            return None, False
        if self.onset is None:
            self._open(t, neighbors)
            return None, True
        if self.release is not None:
            if t - self.release < self.hysteresis:
                self.release = None
                self.neighbors.update(neighbors)
                return None, False
            rec = self._close(self.release, t)
            self._open(t, neighbors)
            return rec, True
        self.neighbors.update(neighbors)
        if self.max_hold is not None and t - self.onset >= self.max_hold:
            rec = self._close(t, t)
            self._open(t, neighbors)
            return rec, True
        return None, False

    def finish(self, t_end: float) -> StageRecord | None:
        """Close the open stage at episode end; zero-length stages are dropped."""
        if self.onset is None:
            return None
        end = t_end if self.release is None else self.release
        rec = self._close(end, t_end)
        return rec if rec.duration > 0 else None


def segment_stages(events, end_time: float | None = None,
                   hysteresis: float = HYSTERESIS, robot: int = 0) -> list[StageRecord]:
    """Cut a time-ordered stream of collision on/off events into stages.

    Events are ``(t, on)`` or ``(t, on, neighbor_ids)``. With ``end_time``
    the trailing open stage is closed there.
    """
    tracker = StageTracker(robot, hysteresis)
    out = []
    for ev in events:
        t, on = ev[0], bool(ev[1])
        nbrs = ev[2] if len(ev) > 2 else ()
        rec, _ = tracker.observe(t, on, nbrs)
        if rec is not None:
            out.append(rec)
    if end_time is not None:
        rec = tracker.finish(end_time)
        if rec is not None:
            out.append(rec)
    return out


def self_reward(rec: StageRecord) -> float:
    return rec.progress - rec.avoid


def ei_reward(rec: StageRecord) -> float:
    total = rec.avoid + rec.progress
    if total <= 0:
        raise ValueError("stage overhead undefined for a zero-length stage")
    return -rec.avoid / total


def difference_reward(rec: StageRecord, others_avoid: float,
                      alpha: float = 1.0, beta: float = 1.0) -> float:
    return (beta * rec.progress - alpha * rec.avoid
            - (rec.neighbors - 1) * (alpha + beta) * others_avoid)


def estimate_others_avoid(rec: StageRecord, history=(), mode: str = "symmetric") -> float:
    """Stand-in for the avoidance time of the other robots in the collision.

    ``symmetric`` assumes they lost as much as this robot did; ``running_mean``
    uses the mean of this robot's earlier avoidance times, falling back to the
    current one on the first stage.
    """
    if mode == "symmetric":
        return rec.avoid
    if mode == "running_mean":
        history = list(history)
        return sum(history) / len(history) if history else rec.avoid
    raise ValueError(f"unknown estimate mode {mode!r}")


@dataclass
class RewardSpec:
    kind: str = "diff"
    alpha: float = 1.0
    beta: float = 1.0
    others: str = "symmetric"
    _history: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in REWARD_KINDS:
            raise ValueError(f"unknown reward kind {self.kind!r}; expected one of {REWARD_KINDS}")
        if self.kind == "diff" and not (self.alpha > 0 and self.beta > 0):
            raise ValueError("alpha and beta must be positive")

    def fresh(self) -> "RewardSpec":
        """Copy with empty running-mean history, one per robot."""
        return RewardSpec(self.kind, self.alpha, self.beta, self.others)

    def __call__(self, rec: StageRecord) -> float:
        if self.kind == "self":
            return self_reward(rec)
        if self.kind == "ei":
            return ei_reward(rec)
        est = estimate_others_avoid(rec, self._history, self.others)
        self._history.append(rec.avoid)
        return difference_reward(rec, est, self.alpha, self.beta)


def collective_average_reward(stage_rewards) -> float | None:
    """Mean stage reward over all robots and stages; ``None`` if there were none."""
    rewards = list(stage_rewards)
    if not rewards:
        return None
    return sum(rewards) / len(rewards)
