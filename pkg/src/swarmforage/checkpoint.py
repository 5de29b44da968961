"""Versioned plain-text checkpoints of per-robot learner tables.

Layout (version 1), one record per line::

    swarmforage-checkpoint 1
    policy modular|rlearn|ctq
    action_space vectorial|algorithmic
    robots <count>
    param <name> <value>          # learner hyper-parameters
    robot <id>
    arm <sector> <arm> <value> <pulls>        # modular: all 64 entries
    rho <value>                               # full-state
    q <state> <action> <value>                # full-state: non-zero entries only

Floats are written with ``repr`` so a load reproduces the tables bit for bit.
"""
from __future__ import annotations

import io
from pathlib import Path

from .learners import N_SECTORS, FullStateAgent, ModularAgent

MAGIC = "swarmforage-checkpoint"
VERSION = 1

_MODULAR_PARAMS = (("sigma", float), ("sigma_units", str), ("ucb_c", float),
                   ("rate", float), ("credit", str))
_FULL_PARAMS = (("epsilon", float), ("alpha", float), ("lam", float), ("kappa", float))


class CheckpointError(ValueError):
    """Unreadable, corrupted or wrong-version checkpoint."""


def dumps(agents) -> str:
    agents = list(agents)
    if not agents or any(a is None for a in agents):
        raise ValueError("only learning agents can be checkpointed")
    first = agents[0]
    out = io.StringIO()
    out.write(f"{MAGIC} {VERSION}\n")
    out.write(f"policy {first.kind}\naction_space {first.action_space}\nrobots {len(agents)}\n")
    if isinstance(first, ModularAgent):
        for name, _ in _MODULAR_PARAMS:
            out.write(f"param {name} {getattr(first.bank, name)!r}\n")
    else:
        for name, _ in _FULL_PARAMS:
            out.write(f"param {name} {getattr(first.table, name)!r}\n")
        out.write(f"actions {first.table.n_actions}\n")
    for rid, agent in enumerate(agents):
        out.write(f"robot {rid}\n")
        if isinstance(agent, ModularAgent):
            for s, stats in enumerate(agent.bank.arms):
                for a in range(len(stats)):
                    out.write(f"arm {s} {a} {float(stats.values[a])!r} {int(stats.pulls[a])}\n")
        else:
            t = agent.table
            out.write(f"rho {float(t.rho)!r}\n")
            for s, a in zip(*t.Q.nonzero()):
                out.write(f"q {s} {a} {float(t.Q[s, a])!r}\n")
    return out.getvalue()


def save(agents, path) -> None:
    Path(path).write_text(dumps(agents))


def loads(text: str) -> tuple[str, list]:
    """Parse a checkpoint; returns ``(policy, agents)``."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0][0] != MAGIC:
        raise CheckpointError("not a swarmforage checkpoint")
    try:
        version = int(lines[0][1])
    except (IndexError, ValueError):
        raise CheckpointError("missing checkpoint version") from None
    if version != VERSION:
        raise CheckpointError(f"checkpoint version {version} unsupported (expected {VERSION})")
    try:
        return _parse_body(lines[1:])
    except (IndexError, ValueError, KeyError) as exc:
        if isinstance(exc, CheckpointError):
            raise
        raise CheckpointError(f"corrupted checkpoint: {exc}") from None


def _parse_body(lines):
    head = {}
    params = {}
    body_start = 0
    for k, parts in enumerate(lines):
        if parts[0] == "robot":
            body_start = k
            break
        if parts[0] == "param":
            params[parts[1]] = parts[2]
        else:
            head[parts[0]] = parts[1]
    else:
        body_start = len(lines)
    policy = head["policy"]
    n = int(head["robots"])
    if policy == "modular":
        kw = {name: cast(params[name]) if cast is float else params[name].strip("'\"")
              for name, cast in _MODULAR_PARAMS}
        agents = [ModularAgent(**kw) for _ in range(n)]
    elif policy in ("rlearn", "ctq"):
        kw = {name: float(params[name]) for name, _ in _FULL_PARAMS}
        agents = [FullStateAgent(policy, head["action_space"], **kw) for _ in range(n)]
        if agents and agents[0].table.n_actions != int(head["actions"]):
            raise CheckpointError("action count does not match the action space")
    else:
        raise CheckpointError(f"unknown policy {policy!r}")
    current = None
    seen = 0
    for parts in lines[body_start:]:
        tag = parts[0]
        if tag == "robot":
            rid = int(parts[1])
            if rid != seen:
                raise CheckpointError(f"robot ids out of order at {rid}")
            current = agents[rid]
            seen += 1
        elif tag == "arm" and policy == "modular":
            s, a = int(parts[1]), int(parts[2])
            if not (0 <= s < N_SECTORS and 0 <= a < N_SECTORS):
                raise CheckpointError(f"arm index out of range: {s} {a}")
            pulls = int(parts[4])
            if pulls < 0:
                raise CheckpointError("negative pull count")
            current.bank.arms[s].values[a] = float(parts[3])
            current.bank.arms[s].pulls[a] = pulls
        elif tag == "rho" and policy != "modular":
            current.table.rho = float(parts[1])
        elif tag == "q" and policy != "modular":
            current.table.Q[int(parts[1]), int(parts[2])] = float(parts[3])
        else:
            raise CheckpointError(f"unexpected line {' '.join(parts)!r}")
    if seen != n:
        raise CheckpointError(f"expected {n} robots, found {seen}")
    return policy, agents


def load(path) -> tuple[str, list]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from None
    return loads(text)


def report(policy: str, agents) -> str:
    """Human-readable dump: every arm for modular banks, non-zero Q rows and
    the average-reward estimate for full-state tables."""
    out = [f"policy: {policy}  robots: {len(agents)}"]
    for rid, agent in enumerate(agents):
        out.append(f"robot {rid}")
        if policy == "modular":
            for s, stats in enumerate(agent.bank.arms):
                for a in range(len(stats)):
                    out.append(f"  sector {s} arm {a} value {stats.values[a]:.6g} "
                               f"pulls {int(stats.pulls[a])}")
        else:
            t = agent.table
            out.append(f"  rho {t.rho:.6g}")
            for s in sorted(set(t.Q.nonzero()[0])):
                vals = " ".join(f"{v:.4g}" for v in t.Q[s])
                out.append(f"  state {s:3d} [{vals}]")
    return "\n".join(out) + "\n"
