"""Discrete particle swarm optimization laboratory.

Swarm optimization over bitstrings and permutations, exact birth-death
chain analysis of the attractor-return process, exact transposition-walk
solvers on the symmetric group collapsed to cycle types, and a seeded
Monte-Carlo harness that checks the two against each other.
"""

from . import chain, cli, exactperm, experiments, pso, rng, spaces

__all__ = ["chain", "cli", "exactperm", "experiments", "pso", "rng", "spaces"]

__version__ = "0.1.0"
