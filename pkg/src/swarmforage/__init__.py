"""Swarm foraging simulator with modular per-sensor bandit learners."""

__version__ = "0.1.0"
