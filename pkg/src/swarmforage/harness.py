"""Run lifecycle: train, freeze, evaluate; seed sweeps and aggregation.

Seed derivation: each phase of a run draws from
``numpy.random.SeedSequence([seed, PHASE_TAGS[phase]])``, spawned into one
child stream for the world (placement, spawns, wall turns, wander) and one
for the controllers (policy and council draws).
"""
from __future__ import annotations

import hashlib
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import ExperimentConfig
from .learners import FullStateAgent, ModularAgent
from .policies import MACRO_ACTIONS, STOP, MacroAction, MacroRun, random_policy
from .rewards import RewardSpec, StageTracker, collective_average_reward
from .sensing import SensorFrame, sense_world
from .sim import TWO_PI, Mode, WorldState, init_world, step_world

PHASE_TAGS = {"train": 1, "eval": 2}
SECTOR = math.pi / 4.0
FRAMES = [SensorFrame.from_code(c) for c in range(256)]

CSV_COLUMNS = (
    "arena", "policy", "label", "reward", "action_space", "robot_count", "seed",
    "train_duration", "eval_duration", "dt", "speed",
    "pucks_collected", "collision_onsets", "stages", "total_avoid", "total_progress",
    "collective_avg_reward", "trace_hash", "wall_time", "error",
)
STAGE_COLUMNS = ("robot", "onset", "avoid", "progress", "neighbors", "reward_kind", "reward")


def phase_streams(seed: int, phase: str):
    ss = np.random.SeedSequence([int(seed), PHASE_TAGS[phase]])
    world_ss, ctrl_ss = ss.spawn(2)
    return world_ss, np.random.default_rng(ctrl_ss)


def make_agent(cfg: ExperimentConfig):
    if cfg.policy == "modular":
        return ModularAgent(sigma=cfg.sigma, sigma_units=cfg.sigma_units, ucb_c=cfg.ucb_c,
                            rate=cfg.learning_rate, credit=cfg.credit)
    if cfg.policy in ("rlearn", "ctq"):
        return FullStateAgent(cfg.policy, cfg.action_space, epsilon=cfg.epsilon,
                              alpha=cfg.learning_rate, lam=cfg.ctq_lambda, kappa=cfg.ctq_kappa)
    return None


@dataclass
class MetricsRecord:
    config: ExperimentConfig
    pucks_collected: int = 0
    collision_onsets: int = 0
    stages: int = 0
    total_avoid: float = 0.0
    total_progress: float = 0.0
    collective_avg_reward: float | None = None
    trace_hash: str = ""
    wall_time: float = field(default=0.0, compare=False)
    error: str = ""

    def row(self) -> dict:
        c = self.config
        return {
            "arena": c.arena, "policy": c.policy, "label": c.series, "reward": c.reward,
            "action_space": c.action_space, "robot_count": c.robot_count, "seed": c.seed,
            "train_duration": c.train_duration, "eval_duration": c.eval_duration,
            "dt": c.dt, "speed": c.speed,
            "pucks_collected": self.pucks_collected, "collision_onsets": self.collision_onsets,
            "stages": self.stages, "total_avoid": self.total_avoid,
            "total_progress": self.total_progress,
            "collective_avg_reward": self.collective_avg_reward,
            "trace_hash": self.trace_hash, "wall_time": self.wall_time, "error": self.error,
        }


@dataclass
class PhaseStats:
    duration: float = 0.0
    onsets: int = 0
    records: list = field(default_factory=list)
    rewards: list = field(default_factory=list)
    score_start: int = 0
    score_end: int = 0
    stage_time: np.ndarray | None = None


@dataclass
class RunResult:
    metrics: MetricsRecord
    agents: list
    train: PhaseStats | None
    eval: PhaseStats
    stage_rows: list = field(default_factory=list)


class _Decision:
    """What a colliding robot does until its stage's avoidance ends."""

    __slots__ = ("heading", "macro")

    def __init__(self, heading=None, macro=None):
        self.heading = heading
        self.macro = macro


class Swarm:
    """Per-robot controllers driving one world: forage, avoid, learn."""

    def __init__(self, cfg: ExperimentConfig, agents: list):
        self.cfg = cfg
        self.agents = agents

    def _decide(self, i: int, code: int, world: WorldState, rng, learning: bool) -> _Decision:
        cfg = self.cfg
        h = float(world.heading[i])
        agent = self.agents[i]
        if agent is not None:
            a = agent.select(code, rng, explore=learning)
            if cfg.action_space == "algorithmic":
                return _Decision(macro=MacroRun(MACRO_ACTIONS[a], rng))
            return _Decision(heading=h + a * SECTOR)
        if cfg.policy == "random":
            return _Decision(heading=h + random_policy(rng) * SECTOR)
        return _Decision(macro=MacroRun(MacroAction(cfg.policy), rng))

    def run_phase(self, world: WorldState, duration: float, rng, learning: bool,
                  hasher=None, stage_rows: list | None = None, on_tick=None) -> PhaseStats:
        cfg = self.cfg
        n = world.n_robots
        dt = cfg.dt
        ticks = int(round(duration / dt))
        t0 = world.clock
        stats = PhaseStats(duration=ticks * dt, score_start=world.score,
                           stage_time=np.zeros(n))
        trackers = [StageTracker(i, cfg.hysteresis, cfg.decision_timeout) for i in range(n)]
        base_reward = RewardSpec(cfg.reward, cfg.alpha, cfg.beta, cfg.others_estimate)
        reward_fns = [base_reward.fresh() for _ in range(n)]
        decisions: list = [None] * n
        next_turn = t0 + rng.exponential(cfg.wander_mean, size=n)
        base_xy = world._base_xy
        agents = self.agents
        cmds = np.empty(n)

        def close(i, rec, next_code):
            r = reward_fns[i](rec)
            stats.records.append(rec)
            stats.rewards.append(r)
            stats.stage_time[i] += rec.duration
            if stage_rows is not None:
                stage_rows.append((i, rec.onset, rec.avoid, rec.progress, rec.neighbors,
                                   cfg.reward, r))
            agent = agents[i]
            if agent is not None:
                if learning:
                    agent.learn(r, next_code, rec.duration)
                else:
                    agent.discard()

        for _ in range(ticks):
            codes, adj = sense_world(world)
            t = world.clock
            heading = world.heading
            for i in range(n):
                code = int(codes[i])
                if code:
                    nbrs = np.flatnonzero(adj[i]).tolist()
                    rec, opened = trackers[i].observe(t, True, nbrs)
                    if rec is not None:
                        close(i, rec, code)
                    if opened:
                        stats.onsets += 1
                        decisions[i] = self._decide(i, code, world, rng, learning)
                    world.mode[i] = Mode.AVOIDING
                    d = decisions[i]
                    if d.macro is None:
                        cmds[i] = d.heading
                    else:
                        a = d.macro.command(FRAMES[code], rng)
                        cmds[i] = math.nan if a == STOP else heading[i] + a * SECTOR
                    continue
                trackers[i].observe(t, False)
                if world.carrying[i]:
                    world.mode[i] = Mode.RETURNING
                    b = base_xy[world.target[i]]
                    cmds[i] = math.atan2(b[1] - world.y[i], b[0] - world.x[i])
                else:
                    world.mode[i] = Mode.SEARCHING
                    if t >= next_turn[i]:
                        heading[i] = rng.uniform(0.0, TWO_PI)
                        next_turn[i] = t + rng.exponential(cfg.wander_mean)
                    cmds[i] = heading[i]
            step_world(world, cmds, dt)
            for i in np.flatnonzero(world.wall_turned):
                d = decisions[i]
                if d is not None and d.heading is not None:
                    d.heading = float(world.heading[i])
            if hasher is not None:
                world.digest_into(hasher)
            if on_tick is not None:
                on_tick(world)
        t_end = world.clock
        for i in range(n):
            rec = trackers[i].finish(t_end)
            if rec is not None:
                close(i, rec, None)
            elif agents[i] is not None:
                agents[i].discard()
        stats.score_end = world.score
        return stats


def execute(cfg: ExperimentConfig, keep_stages: bool = False, agents=None,
            on_eval_tick=None) -> RunResult:
    """Full lifecycle for one config: optional training, then frozen evaluation.

    Training is skipped for fixed policies. The evaluation world is rebuilt
    from the eval sub-seed unless ``cfg.eval_mode == "continue"``.
    ``agents`` lets a caller evaluate pre-trained (e.g. checkpointed) learners.
    """
    cfg.validate()
    start = time.perf_counter()
    if agents is None:
        agents = [make_agent(cfg) for _ in range(cfg.robot_count)]
    swarm = Swarm(cfg, agents)
    hasher = hashlib.sha256()
    stage_rows = [] if keep_stages else None
    train = None
    world = None
    if cfg.learns and cfg.train_duration > 0:
        world_ss, rng = phase_streams(cfg.seed, "train")
        world = init_world(cfg, world_ss)
        train = swarm.run_phase(world, cfg.train_duration, rng, True, hasher)
    world_ss, rng = phase_streams(cfg.seed, "eval")
    if world is None or cfg.eval_mode == "reset":
        world = init_world(cfg, world_ss)
    else:
        world.rng = np.random.default_rng(world_ss)
    ev = swarm.run_phase(world, cfg.eval_duration, rng, False, hasher, stage_rows, on_eval_tick)
    m = MetricsRecord(
        config=cfg,
        pucks_collected=ev.score_end - ev.score_start,
        collision_onsets=ev.onsets,
        stages=len(ev.records),
        total_avoid=sum(r.avoid for r in ev.records),
        total_progress=sum(r.progress for r in ev.records),
        collective_avg_reward=collective_average_reward(ev.rewards),
        trace_hash=hasher.hexdigest(),
        wall_time=time.perf_counter() - start,
    )
    return RunResult(m, agents, train, ev, stage_rows or [])


def run_one(cfg: ExperimentConfig) -> MetricsRecord:
    return execute(cfg).metrics


def _safe_run(cfg: ExperimentConfig) -> MetricsRecord:
    try:
        return run_one(cfg)
    except Exception as exc:  # errors are data in a sweep
        return MetricsRecord(config=cfg, error=f"{type(exc).__name__}: {exc}")


def sweep_key(cfg: ExperimentConfig):
    return (cfg.arena, cfg.policy, cfg.series, cfg.robot_count, cfg.seed)


def run_sweep(configs, jobs: int = 1) -> list[MetricsRecord]:
    """Run every config; rows come back sorted by arena, policy, series,
    robot count and seed whatever the completion order. A failing config
    yields a row with ``error`` set instead of aborting the sweep."""
    configs = list(configs)
    if not configs:
        raise ValueError("empty sweep")
    if jobs <= 1:
        records = [_safe_run(c) for c in configs]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_safe_run, configs))
    return sorted(records, key=lambda r: sweep_key(r.config))


@dataclass(frozen=True)
class SummaryRow:
    arena: str
    series: str
    robot_count: int
    runs: int
    mean: float
    stderr: float | None


SUMMARY_COLUMNS = ("arena", "series", "robot_count", "runs", "mean", "stderr")


def mean_stderr(values) -> tuple[float, float | None]:
    """Mean and sample standard deviation over sqrt(k); stderr is None for k = 1."""
    values = list(values)
    if not values:
        raise ValueError("no values")
    m = statistics.fmean(values)
    if len(values) < 2:
        return m, None
    return m, statistics.stdev(values) / math.sqrt(len(values))


def aggregate(records) -> list[SummaryRow]:
    """Mean and standard error of pucks collected per (arena, series, robot count)."""
    groups: dict = {}
    for r in records:
        if r.error:
            continue
        c = r.config
        groups.setdefault((c.arena, c.series, c.robot_count), []).append(r.pucks_collected)
    rows = []
    for (arena, series, n), vals in sorted(groups.items()):
        m, se = mean_stderr(vals)
        rows.append(SummaryRow(arena, series, n, len(vals), m, se))
    return rows
