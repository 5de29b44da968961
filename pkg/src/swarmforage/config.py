"""Experiment configuration, config files and sweep presets.

Config files are YAML with this layout (schema version 1)::

    version: 1
    run:                 # any ExperimentConfig field
      arena: Arena1
      robot_count: 12
      policy: modular
      reward: diff
    sweep:               # optional, used by ``swarmforage sweep``
      experiment: headtohead   # headtohead | robustness | action-space
      preset: desk             # paper | desk | smoke
      arenas: [Arena1, Arena2, Arena3]
      robot_counts: [4, 8, 12]
      seeds: 5                 # a count, or an explicit list

Unknown keys are rejected.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import yaml

from .policies import FIXED_POLICIES
from .rewards import REWARD_KINDS
from .sim import ARENA_IDS

SCHEMA_VERSION = 1
LEARNING_POLICIES = ("modular", "rlearn", "ctq")
POLICIES = FIXED_POLICIES + LEARNING_POLICIES
ACTION_SPACES = ("vectorial", "algorithmic")


class ConfigError(ValueError):
    """Invalid configuration file, field or override."""


@dataclass(frozen=True)
class ExperimentConfig:
    arena: str = "Arena1"
    robot_count: int = 12
    seed: int = 0
    policy: str = "modular"
    label: str = ""
    reward: str = "diff"
    alpha: float = 1.0
    beta: float = 1.0
    others_estimate: str = "symmetric"
    action_space: str = "vectorial"
    train_duration: float = 3600.0
    eval_duration: float = 1200.0
    eval_mode: str = "reset"
    dt: float = 0.1
    speed: float = 0.1
    arena_side: float = 1.5
    puck_count: int = 20
    wander_mean: float = 2.0
    hysteresis: float = 0.5
    decision_timeout: float = 5.0
    sigma: float = 2.0
    sigma_units: str = "degrees"
    ucb_c: float = math.sqrt(2.0)
    credit: str = "recommended"
    learning_rate: float = 0.1
    epsilon: float = 0.1
    ctq_lambda: float = 0.1
    ctq_kappa: float = 0.05

    @property
    def series(self) -> str:
        return self.label or self.policy

    @property
    def learns(self) -> bool:
        return self.policy in LEARNING_POLICIES

    def validate(self) -> "ExperimentConfig":
        checks = [
            (self.arena in ARENA_IDS, f"arena must be one of {ARENA_IDS}"),
            (self.policy in POLICIES, f"unknown policy {self.policy!r}; expected one of {POLICIES}"),
            (self.reward in REWARD_KINDS, f"reward must be one of {REWARD_KINDS}"),
            (self.action_space in ACTION_SPACES, f"action_space must be one of {ACTION_SPACES}"),
            (not (self.policy == "modular" and self.action_space != "vectorial"),
             "the modular learner only supports the vectorial action space"),
            (self.robot_count >= 1, "robot_count must be >= 1"),
            (self.train_duration >= 0 and self.eval_duration >= 0, "durations must be >= 0"),
            (self.dt > 0 and self.speed > 0 and self.arena_side > 0, "dt, speed, arena_side must be > 0"),
            (self.puck_count >= 0, "puck_count must be >= 0"),
            (self.eval_mode in ("reset", "continue"), "eval_mode must be reset or continue"),
            (self.sigma_units in ("degrees", "sectors"), "sigma_units must be degrees or sectors"),
            (self.credit in ("recommended", "executed"), "credit must be recommended or executed"),
            (self.others_estimate in ("symmetric", "running_mean"),
             "others_estimate must be symmetric or running_mean"),
            (self.alpha > 0 and self.beta > 0, "alpha and beta must be > 0"),
            (self.decision_timeout > 0 and self.hysteresis >= 0 and self.wander_mean > 0,
             "decision_timeout and wander_mean must be > 0, hysteresis >= 0"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        return self

    def as_dict(self) -> dict:
        return asdict(self)


FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
_CASTS = {"int": int, "float": float, "str": str}


def _coerce(key: str, value):
    if key not in FIELD_TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    cast = _CASTS[FIELD_TYPES[key]]
    try:
        if cast is int and isinstance(value, float) and not value.is_integer():
            raise ValueError
        return cast(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {key}: {value!r}") from None


def make_config(base: ExperimentConfig | None = None, **changes) -> ExperimentConfig:
    base = base or ExperimentConfig()
    return replace(base, **{k: _coerce(k, v) for k, v in changes.items()}).validate()


def parse_override(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise ConfigError(f"override must look like key=value, got {text!r}")
    key, raw = text.split("=", 1)
    key = key.strip()
    return key, _coerce(key, yaml.safe_load(raw))


def load_config_file(path) -> tuple[ExperimentConfig, dict]:
    """Read a YAML config; returns the run config and the raw sweep table."""
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from None
    doc = doc or {}
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a mapping")
    extra = set(doc) - {"version", "run", "sweep"}
    if extra:
        raise ConfigError(f"unknown top-level keys: {sorted(extra)}")
    if doc.get("version", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise ConfigError(f"unsupported config version {doc.get('version')!r}")
    run = doc.get("run") or {}
    sweep = doc.get("sweep") or {}
    if not isinstance(run, dict) or not isinstance(sweep, dict):
        raise ConfigError("'run' and 'sweep' must be mappings")
    bad = set(sweep) - {"experiment", "preset", "arenas", "robot_counts", "seeds"}
    if bad:
        raise ConfigError(f"unknown sweep keys: {sorted(bad)}")
    return make_config(**run), sweep


# --- presets --------------------------------------------------------------

SCALES = {
    "paper": {"train_duration": 43_200.0, "eval_duration": 1_200.0, "seeds": 20,
              "robot_counts": tuple(range(4, 37, 4))},
    "desk": {"train_duration": 3_600.0, "eval_duration": 1_200.0, "seeds": 5,
             "robot_counts": tuple(range(4, 37, 4))},
    "smoke": {"train_duration": 20.0, "eval_duration": 20.0, "seeds": 1,
              "robot_counts": (4, 8)},
}

# experiment -> list of (label, field changes)
EXPERIMENTS = {
    "headtohead": [
        ("random", {"policy": "random"}),
        ("dynwin", {"policy": "dynwin"}),
        ("modular", {"policy": "modular", "reward": "diff"}),
        ("rlearn", {"policy": "rlearn", "reward": "diff"}),
        ("ctq", {"policy": "ctq", "reward": "diff"}),
    ],
    "robustness": [
        ("modular/diff", {"policy": "modular", "reward": "diff"}),
        ("modular/self", {"policy": "modular", "reward": "self"}),
        ("rlearn/diff", {"policy": "rlearn", "reward": "diff"}),
        ("rlearn/self", {"policy": "rlearn", "reward": "self"}),
    ],
    "action-space": [
        ("vectorial", {"policy": "rlearn", "reward": "diff", "action_space": "vectorial"}),
        ("algorithmic", {"policy": "rlearn", "reward": "diff", "action_space": "algorithmic"}),
    ],
}


def build_grid(experiment: str = "headtohead", preset: str = "desk",
               base: ExperimentConfig | None = None, arenas=None,
               robot_counts=None, seeds=None) -> list[ExperimentConfig]:
    """Cartesian product arenas x series x robot counts x seeds.

    Fixed policies get ``train_duration = 0``: they have nothing to learn.
    """
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; expected one of {sorted(EXPERIMENTS)}")
    if preset not in SCALES:
        raise ConfigError(f"unknown preset {preset!r}; expected one of {sorted(SCALES)}")
    scale = SCALES[preset]
    base = base or ExperimentConfig()
    arenas = list(arenas or ARENA_IDS)
    counts = list(robot_counts or scale["robot_counts"])
    if seeds is None:
        seeds = scale["seeds"]
    seed_list = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
    grid = []
    for arena in arenas:
        for label, changes in EXPERIMENTS[experiment]:
            for n in counts:
                for s in seed_list:
                    cfg = make_config(base, arena=arena, robot_count=n, seed=s, label=label,
                                      eval_duration=scale["eval_duration"],
                                      train_duration=scale["train_duration"], **changes)
                    if not cfg.learns:
                        cfg = replace(cfg, train_duration=0.0)
                    grid.append(cfg)
    if not grid:
        raise ConfigError("empty sweep grid")
    return grid
