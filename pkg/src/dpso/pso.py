"""Discrete particle swarm optimization and its one-particle special case.

Each move draws one uniform q in [0, 1): with the position x, local
attractor l, and global attractor g of the moving particle,

    q <= c_loc  and x != l and l != g  -> uniform improving neighbor toward l
    q > 1 - c_glob and x != g          -> uniform improving neighbor toward g
    otherwise                          -> uniform neighbor

With one particle l and g coincide, so the local branch never fires and a
single parameter c = c_glob drives the walk. Attractors update on strict
improvement by default; the non-strict (<=) variant is selectable.

Every objective evaluation is counted: initialization costs one evaluation
per particle and each move costs one. The frozen-attractor mode pins the
attractor and counts steps back to it, sampling the per-level return times
that the chain module computes analytically.
"""

from dataclasses import dataclass, field, replace

from . import exactperm, spaces
from .rng import Stream, substream_seed

STRICT = "strict"
NON_STRICT = "non-strict"


@dataclass(frozen=True)
class SwarmConfig:
    particles: int = 1
    c_loc: float = 0.0
    c_glob: float = 0.0
    attractor_update: str = STRICT
    budget: int = 0  # max evaluations; 0 = unlimited

    def __post_init__(self):
        if self.particles < 1:
            raise ValueError(f"need at least one particle, got {self.particles}")
        if not 0 <= float(self.c_loc) <= 1:
            raise ValueError(f"c_loc must be in [0, 1], got {self.c_loc!r}")
        if not 0 <= float(self.c_glob) <= 1 - float(self.c_loc):
            raise ValueError(
                f"c_glob must be in [0, 1 - c_loc], got {self.c_glob!r}"
            )
        if self.attractor_update not in (STRICT, NON_STRICT):
            raise ValueError(
                f"attractor_update must be {STRICT!r} or {NON_STRICT!r}"
            )
        if self.budget < 0:
            raise ValueError(f"budget must be >= 0, got {self.budget}")


def onepso_config(c, budget=0, attractor_update=STRICT):
    """One-particle swarm: a single parameter c plays c_glob."""
    return SwarmConfig(
        particles=1,
        c_loc=0.0,
        c_glob=float(c),
        attractor_update=attractor_update,
        budget=budget,
    )


@dataclass
class SwarmState:
    space: object
    config: SwarmConfig
    stream: Stream
    positions: list
    values: list
    local_attractors: list
    local_values: list
    global_attractor: tuple
    global_value: int
    evaluations: int = 0
    iterations: int = 0
    attractor_updates: int = 0
    found_at: int = None  # evaluation count when the optimum was first seen


def init_state(space, config, seed):
    """Draw all particles uniformly and evaluate them in particle order;
    attractors start at the particles themselves, g at the first particle
    attaining the minimum."""
    stream = seed if isinstance(seed, Stream) else Stream(seed)
    state = SwarmState(
        space=space,
        config=config,
        stream=stream,
        positions=[],
        values=[],
        local_attractors=[],
        local_values=[],
        global_attractor=None,
        global_value=None,
        iterations=1,
    )
    for _ in range(config.particles):
        if config.budget and state.evaluations >= config.budget:
            break
        x = spaces.sample_uniform_point(space, stream)
        fx = spaces.objective_value(space, x)
        state.evaluations += 1
        state.positions.append(x)
        state.values.append(fx)
        state.local_attractors.append(x)
        state.local_values.append(fx)
        if state.global_value is None:
            state.global_attractor = x
            state.global_value = fx
        elif fx < state.global_value:
            state.global_attractor = x
            state.global_value = fx
            state.attractor_updates += 1
        if fx == 0 and state.found_at is None:
            state.found_at = state.evaluations
    return state


def particle_move(state, i):
    """One move of particle i; returns the particle's new objective value."""
    config = state.config
    stream = state.stream
    space = state.space
    x = state.positions[i]
    l = state.local_attractors[i]
    g = state.global_attractor
    q = stream.next_float()
    if x != l and l != g and q <= config.c_loc:
        x = spaces.sample_improving_neighbor(space, x, l, stream)
    elif x != g and q > 1 - config.c_glob:
        x = spaces.sample_improving_neighbor(space, x, g, stream)
    else:
        x = spaces.sample_uniform_neighbor(space, x, stream)
    fx = spaces.objective_value(space, x)
    state.evaluations += 1
    state.positions[i] = x
    state.values[i] = fx
    strict = config.attractor_update == STRICT
    if fx < state.local_values[i] or (not strict and fx == state.local_values[i]):
        state.local_attractors[i] = x
        state.local_values[i] = fx
    if fx < state.global_value or (not strict and fx == state.global_value):
        state.global_attractor = x
        state.global_value = fx
        state.attractor_updates += 1
    if fx == 0 and state.found_at is None:
        state.found_at = state.evaluations
    return fx


@dataclass(frozen=True)
class RunResult:
    """Outcome of one optimization run.

    evaluations is the count at which the optimum was first evaluated, or
    the total spent when the budget ran out (found tells them apart).
    attractor_updates counts global-attractor improvements; the initial
    assignment is not an update.
    """

    found: bool
    evaluations: int
    iterations: int
    attractor_updates: int
    best_value: int
    seed: int


def run(space, config, seed):
    """Optimize until the objective hits 0 or the budget is exhausted.

    Fully deterministic given (space, config, seed). Initialization is
    iteration 1; each subsequent sweep moves every particle once.
    """
    state = init_state(space, config, seed)
    while state.found_at is None:
        if config.budget and state.evaluations >= config.budget:
            break
        state.iterations += 1
        for i in range(config.particles):
            if config.budget and state.evaluations >= config.budget:
                break
            particle_move(state, i)
            if state.found_at is not None:
                break
    found = state.found_at is not None
    return RunResult(
        found=found,
        evaluations=state.found_at if found else state.evaluations,
        iterations=state.iterations,
        attractor_updates=state.attractor_updates,
        best_value=state.global_value,
        seed=seed if isinstance(seed, int) else 0,
    )


def sample_point_at_distance(space, anchor, d, stream):
    """Uniform point at the given distance from the anchor."""
    if not 0 <= d <= spaces.diameter(space):
        raise ValueError(
            f"distance must be in [0, {spaces.diameter(space)}], got {d}"
        )
    if space.kind == spaces.HYPERCUBE:
        return spaces.sample_bitstring_at_distance(space, anchor, d, stream)
    sigma = exactperm.sample_permutation_with_cycles(space.n, space.n - d, stream)
    return spaces.compose(sigma, anchor)


def frozen_attractor_return_time(space, anchor, c, start_distance, seed, budget=0):
    """Steps of the one-particle walk with the attractor pinned at `anchor`
    until it returns there, starting from a uniform point at
    start_distance (distance 1: a uniform neighbor of the anchor).

    Each step improves toward the anchor with probability c and is a
    uniform neighbor move otherwise, so the step count samples the
    birth-death descent time W_{start_distance}. With budget > 0 the walk
    is cut off after that many steps and None is returned (a censored
    sample); the default walks to completion.
    """
    cf = float(c)
    if not 0 <= cf <= 1:
        raise ValueError(f"c must be in [0, 1], got {c!r}")
    if not 1 <= start_distance <= spaces.diameter(space):
        raise ValueError(
            f"start distance must be in [1, {spaces.diameter(space)}], "
            f"got {start_distance}"
        )
    stream = seed if isinstance(seed, Stream) else Stream(seed)
    x = sample_point_at_distance(space, anchor, start_distance, stream)
    steps = 0
    threshold = 1 - cf
    while x != anchor:
        if budget and steps >= budget:
            return None
        if stream.next_float() > threshold:
            x = spaces.sample_improving_neighbor(space, x, anchor, stream)
        else:
            x = spaces.sample_uniform_neighbor(space, x, stream)
        steps += 1
    return steps


def restart_runner(space, config, budget_per_run, max_runs, seed):
    """Independent restarts with substream seeds until a run finds the
    optimum or max_runs is exhausted; evaluation, iteration, and update
    counts accumulate across restarts."""
    if budget_per_run < 1:
        raise ValueError(f"budget_per_run must be >= 1, got {budget_per_run}")
    if max_runs < 1:
        raise ValueError(f"max_runs must be >= 1, got {max_runs}")
    bounded = replace(config, budget=budget_per_run)
    evaluations = iterations = updates = 0
    best = None
    for r in range(max_runs):
        result = run(space, bounded, substream_seed(seed, r))
        evaluations += result.evaluations
        iterations += result.iterations
        updates += result.attractor_updates
        best = result.best_value if best is None else min(best, result.best_value)
        if result.found:
            return RunResult(
                found=True,
                evaluations=evaluations,
                iterations=iterations,
                attractor_updates=updates,
                best_value=0,
                seed=seed,
            )
    return RunResult(
        found=False,
        evaluations=evaluations,
        iterations=iterations,
        attractor_updates=updates,
        best_value=best,
        seed=seed,
    )
