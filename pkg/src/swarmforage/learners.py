"""Tabular learners: per-sector UCB1 bandits fused by the council, plus the
full-state baselines (myopic R-learning and continuous-time Q-learning).

Every robot owns its learner outright; nothing here is shared between robots.
"""
from __future__ import annotations

import math

import numpy as np

from .policies import MACRO_ACTIONS
from .sensing import N_SECTORS

N_STATES = 256
ACTION_ANGLES = tuple(45.0 * i for i in range(N_SECTORS))
UCB_C = math.sqrt(2.0)
EMA_RATE = 0.1


def _check_reward(reward) -> float:
    r = float(reward)
    if not math.isfinite(r):
        raise ValueError(f"reward must be finite, got {reward!r}")
    return r


class ArmStats:
    """Value estimates and pull counts for one 8-armed bandit."""

    def __init__(self, n_arms: int = N_SECTORS):
        self.values = np.zeros(n_arms)
        self.pulls = np.zeros(n_arms, dtype=np.int64)

    @property
    def total(self) -> int:
        return int(self.pulls.sum())

    def __len__(self):
        return len(self.values)


def ucb1_select(stats: ArmStats, c: float = UCB_C) -> int:
    """Lowest unpulled arm first, then the highest upper confidence index."""
    unpulled = np.flatnonzero(stats.pulls == 0)
    if len(unpulled):
        return int(unpulled[0])
    index = stats.values + c * np.sqrt(math.log(stats.total) / stats.pulls)
    return int(np.argmax(index))


def ucb1_update(stats: ArmStats, arm: int, reward: float, rate: float = EMA_RATE) -> None:
    r = _check_reward(reward)
    if stats.pulls[arm] == 0:
        stats.values[arm] = r
    else:
        stats.values[arm] = (1.0 - rate) * stats.values[arm] + rate * r
    stats.pulls[arm] += 1


def council_distribution(recommendations, sigma: float = 2.0,
                         sigma_units: str = "degrees") -> np.ndarray:
    """Fuse direction votes (degrees) into a distribution over the 8 actions.

    Each vote adds a Gaussian bump ``exp(-0.5 * (diff / sigma) ** 2)`` at every
    action, ``diff`` being the wrapped angular distance in degrees. With
    ``sigma_units="sectors"`` the distance is first divided by 45.
    """
    recs = list(recommendations)
    if not recs:
        raise ValueError("council needs at least one recommendation")
    if sigma_units not in ("degrees", "sectors"):
        raise ValueError(f"unknown sigma_units {sigma_units!r}")
    scale = 45.0 if sigma_units == "sectors" else 1.0
    p = np.zeros(N_SECTORS)
    for d in recs:
        for i, a in enumerate(ACTION_ANGLES):
            diff = abs(d - a) % 360.0
            if diff > 180.0:
                diff = 360.0 - diff
            p[i] += math.exp(-0.5 * (diff / scale / sigma) ** 2)
    return p / p.sum()


def council_sample(p, rng) -> int:
    u = rng.random()
    acc = 0.0
    for i, pi in enumerate(p):
        acc += pi
        if u < acc:
            return i
    # u landed in the rounding slack above the cumulative sum
    return int(np.flatnonzero(np.asarray(p) > 0)[-1])


class ModularLearnerBank:
    """Eight per-sector bandits whose votes are fused by the council.

    A Clear sector always votes for its own direction and has nothing to
    learn; a sector in Collision votes with its UCB1 bandit. ``credit``
    picks which arm a Collision sector updates: the one it recommended
    (default) or the action the robot actually executed.
    """

    def __init__(self, sigma: float = 2.0, sigma_units: str = "degrees",
                 ucb_c: float = UCB_C, rate: float = EMA_RATE,
                 credit: str = "recommended"):
        if credit not in ("recommended", "executed"):
            raise ValueError(f"unknown credit mode {credit!r}")
        self.arms = [ArmStats() for _ in range(N_SECTORS)]
        self.sigma = sigma
        self.sigma_units = sigma_units
        self.ucb_c = ucb_c
        self.rate = rate
        self.credit = credit
        self.pending = None

    def n_learnable(self) -> int:
        return sum(len(a) for a in self.arms)


def modular_select(states, bank: ModularLearnerBank, rng) -> int:
    """Collect the eight votes, fuse them and sample the robot's action."""
    states = [int(s) for s in states]
    if not any(states):
        raise ValueError("modular_select called with an all-Clear frame")
    choices = [ucb1_select(bank.arms[i], bank.ucb_c) if s else None
               for i, s in enumerate(states)]
    votes = [ACTION_ANGLES[i if c is None else c] for i, c in enumerate(choices)]
    p = council_distribution(votes, bank.sigma, bank.sigma_units)
    action = council_sample(p, rng)
    bank.pending = (tuple(choices), action)
    return action


def modular_update(bank: ModularLearnerBank, reward: float) -> None:
    """Give the same reward to every sector that was in Collision."""
    if bank.pending is None:
        raise ValueError("modular_update without a recorded selection")
    r = _check_reward(reward)
    choices, action = bank.pending
    for sector, arm in enumerate(choices):
        if arm is None:
            continue
        if bank.credit == "executed":
            arm = action
        ucb1_update(bank.arms[sector], arm, r, bank.rate)
    bank.pending = None


class FullStateTable:
    """One value per (256-state code, action) plus the average-reward estimate."""

    def __init__(self, n_actions: int = N_SECTORS, epsilon: float = 0.1, alpha: float = 0.1,
                 lam: float = 0.1, kappa: float = 0.05):
        self.Q = np.zeros((N_STATES, n_actions))
        self.rho = 0.0
        self.epsilon = epsilon
        self.alpha = alpha
        self.lam = lam
        self.kappa = kappa

    @property
    def n_actions(self) -> int:
        return self.Q.shape[1]


def rlearn_select(table: FullStateTable, state: int, rng, explore: bool = True):
    """Epsilon-greedy pick; returns ``(action, greedy)``.

    ``greedy`` tells whether the chosen action attains the row maximum, which
    is what gates the average-reward update.
    """
    row = table.Q[state]
    if explore and rng.random() < table.epsilon:
        a = int(rng.integers(table.n_actions))
    else:
        a = int(np.argmax(row))
    return a, bool(row[a] == row.max())


def rlearn_update(table: FullStateTable, s: int, a: int, reward: float,
                  s_next: int | None = None, greedy: bool = True) -> None:
    """Myopic R-learning: the successor's value is dropped from the target."""
    r = _check_reward(reward)
    table.Q[s, a] += table.alpha * (r - table.rho - table.Q[s, a])
    if greedy:
        table.rho += table.alpha * (r - table.rho)


def ctq_alpha(lam: float, tau: float) -> float:
    return -math.expm1(-lam * tau)


def ctq_update(table: FullStateTable, s: int, a: int, reward: float,
               s_next: int | None, tau: float) -> None:
    """Duration-aware Q-learning step for a stage lasting ``tau`` seconds."""
    if not tau > 0:
        raise ValueError(f"stage duration must be positive, got {tau!r}")
    r = _check_reward(reward)
    step = ctq_alpha(table.lam, tau)
    future = 0.0 if s_next is None else math.exp(-table.kappa * tau) * float(table.Q[s_next].max())
    table.Q[s, a] += step * (r + future - table.Q[s, a])


# --- per-robot agents used by the harness -------------------------------

class ModularAgent:
    kind = "modular"
    action_space = "vectorial"

    def __init__(self, **bank_kwargs):
        self.bank = ModularLearnerBank(**bank_kwargs)

    def select(self, code: int, rng, explore: bool = True) -> int:
        states = [(code >> i) & 1 for i in range(N_SECTORS)]
        return modular_select(states, self.bank, rng)

    def learn(self, reward: float, next_code: int | None, tau: float) -> None:
        modular_update(self.bank, reward)

    def discard(self) -> None:
        self.bank.pending = None


class FullStateAgent:
    """R-learning or CT-Q over the full 256-state code.

    With the algorithmic action space the actions index :data:`MACRO_ACTIONS`.
    """

    def __init__(self, kind: str = "rlearn", action_space: str = "vectorial", **table_kwargs):
        if kind not in ("rlearn", "ctq"):
            raise ValueError(f"unknown full-state learner {kind!r}")
        if action_space not in ("vectorial", "algorithmic"):
            raise ValueError(f"unknown action space {action_space!r}")
        self.kind = kind
        self.action_space = action_space
        n = N_SECTORS if action_space == "vectorial" else len(MACRO_ACTIONS)
        self.table = FullStateTable(n_actions=n, **table_kwargs)
        self.pending = None

    def select(self, code: int, rng, explore: bool = True) -> int:
        a, greedy = rlearn_select(self.table, code, rng, explore)
        self.pending = (code, a, greedy)
        return a

    def learn(self, reward: float, next_code: int | None, tau: float) -> None:
        if self.pending is None:
            raise ValueError("update without a recorded selection")
        s, a, greedy = self.pending
        if self.kind == "rlearn":
            rlearn_update(self.table, s, a, reward, next_code, greedy)
        else:
            ctq_update(self.table, s, a, reward, next_code, tau)
        self.pending = None

    def discard(self) -> None:
        self.pending = None
