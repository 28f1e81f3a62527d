"""Seeded Monte-Carlo harness with analytic comparison and scaling reports.

Every repetition runs on its own substream derived from (seed, cell index,
repetition index), and per-chunk results are merged as plain integer sums
(count, sum, sum of squares, min, max, censored), so aggregation is exact
and independent of chunk arrival order: parallel and sequential execution
produce byte-identical reports. Worker count is capped by the DPSO_THREADS
environment variable, defaulting to the available parallelism.

Samples that exhaust their step/evaluation budget are counted as censored
and excluded from the moments, never silently dropped.
"""

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import chain, exactperm, pso, spaces
from .rng import substream_seed
from .scalars import EXACT, FLOAT, render

RETURN_TIME = "return-time"
OPTIMIZATION_TIME = "optimization-time"

ONEMAX = "onemax"
SORT = "sort"

_CHUNK = 2048


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: a problem/n/c grid, a measurement, and budgets.

    n and c may be scalars or sequences; the grid is swept row-major
    (n outer, c inner). budget bounds each sample (walk steps for
    return-time, objective evaluations for optimization-time); 0 means
    unlimited.
    """

    problem: str
    n: object
    c: object
    measurement: str
    repeats: int
    seed: int
    particles: int = 1
    c_loc: object = 0
    budget: int = 1_000_000

    def __post_init__(self):
        if self.problem not in (ONEMAX, SORT):
            raise ValueError(f"unknown problem {self.problem!r}")
        if self.measurement not in (RETURN_TIME, OPTIMIZATION_TIME):
            raise ValueError(f"unknown measurement {self.measurement!r}")
        if self.repeats < 1:
            raise ValueError(f"repeats must be >= 1, got {self.repeats}")
        if not self.n_values() or not self.c_values():
            raise ValueError("n and c grids must be non-empty")
        if self.budget < 0:
            raise ValueError(f"budget must be >= 0, got {self.budget}")

    def n_values(self):
        return tuple(self.n) if isinstance(self.n, (tuple, list)) else (self.n,)

    def c_values(self):
        return tuple(self.c) if isinstance(self.c, (tuple, list)) else (self.c,)


@dataclass(frozen=True)
class SummaryStats:
    count: int
    censored: int
    mean: float
    variance: float
    stderr: float
    minimum: object
    maximum: object


@dataclass(frozen=True)
class ComparisonReport:
    analytic: object
    stats: SummaryStats
    z: float
    verdict: bool
    relative_error: float
    reference: float  # the 1/sqrt(T) precision line


def _space_for(problem, n):
    return spaces.hypercube(n) if problem == ONEMAX else spaces.permutation_space(n)


def _merge(acc, part):
    count, total, total_sq, mn, mx, censored = acc
    c2, t2, s2, mn2, mx2, cen2 = part
    return (
        count + c2,
        total + t2,
        total_sq + s2,
        mn if mn2 is None else (mn2 if mn is None else min(mn, mn2)),
        mx if mx2 is None else (mx2 if mx is None else max(mx, mx2)),
        censored + cen2,
    )


def _finalize(acc):
    count, total, total_sq, mn, mx, censored = acc
    if count == 0:
        nan = float("nan")
        return SummaryStats(0, censored, nan, nan, nan, None, None)
    mean = total / count
    if count == 1:
        variance = 0.0
    else:
        # exact over the integer sums, so merge order cannot perturb it
        variance = float(
            Fraction(count * total_sq - total * total, count * (count - 1))
        )
    stderr = math.sqrt(variance / count)
    return SummaryStats(count, censored, mean, variance, stderr, mn, mx)


def _return_time_chunk(args):
    problem, n, c, budget, cell_seed, start, stop = args
    space = _space_for(problem, n)
    anchor = space.target
    cf = float(Fraction(c))
    count = total = total_sq = censored = 0
    mn = mx = None
    for rep in range(start, stop):
        steps = pso.frozen_attractor_return_time(
            space, anchor, cf, 1, substream_seed(cell_seed, rep), budget
        )
        if steps is None:
            censored += 1
            continue
        count += 1
        total += steps
        total_sq += steps * steps
        mn = steps if mn is None else min(mn, steps)
        mx = steps if mx is None else max(mx, steps)
    return count, total, total_sq, mn, mx, censored


def _optimization_chunk(args):
    problem, n, c, particles, c_loc, budget, cell_seed, start, stop = args
    space = _space_for(problem, n)
    config = pso.SwarmConfig(
        particles=particles,
        c_loc=float(Fraction(c_loc)),
        c_glob=float(Fraction(c)),
        budget=budget,
    )
    count = total = total_sq = censored = 0
    mn = mx = None
    for rep in range(start, stop):
        result = pso.run(space, config, substream_seed(cell_seed, rep))
        if not result.found:
            censored += 1
            continue
        v = result.evaluations
        count += 1
        total += v
        total_sq += v * v
        mn = v if mn is None else min(mn, v)
        mx = v if mx is None else max(mx, v)
    return count, total, total_sq, mn, mx, censored


def worker_count():
    raw = os.environ.get("DPSO_THREADS", "").strip()
    if raw:
        value = int(raw)
        if value < 1:
            raise ValueError(f"DPSO_THREADS must be >= 1, got {raw!r}")
        return value
    return os.cpu_count() or 1


def _run_chunks(worker, arg_list):
    acc = (0, 0, 0, None, None, 0)
    workers = worker_count()
    if workers > 1 and len(arg_list) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(arg_list))) as pool:
            for part in pool.map(worker, arg_list):
                acc = _merge(acc, part)
    else:
        for args in arg_list:
            acc = _merge(acc, worker(args))
    return _finalize(acc)


def _single_cell(spec):
    ns, cs = spec.n_values(), spec.c_values()
    if len(ns) != 1 or len(cs) != 1:
        raise ValueError("estimate functions take a single-cell spec; "
                         "use run_experiment for grids")
    return ns[0], cs[0]


def _chunk_ranges(repeats):
    return [(start, min(start + _CHUNK, repeats)) for start in range(0, repeats, _CHUNK)]


def estimate_return_time(spec, cell_index=0):
    """Mean/variance of the frozen-attractor return time from distance 1."""
    if spec.measurement != RETURN_TIME:
        raise ValueError("spec.measurement must be return-time")
    if spec.particles != 1:
        raise ValueError("return-time experiments are one-particle")
    n, c = _single_cell(spec)
    cell_seed = substream_seed(spec.seed, cell_index)
    args = [
        (spec.problem, n, c, spec.budget, cell_seed, start, stop)
        for start, stop in _chunk_ranges(spec.repeats)
    ]
    return _run_chunks(_return_time_chunk, args)


def estimate_optimization_time(spec, cell_index=0):
    """Mean/variance of evaluations-to-optimum over full runs."""
    if spec.measurement != OPTIMIZATION_TIME:
        raise ValueError("spec.measurement must be optimization-time")
    n, c = _single_cell(spec)
    cell_seed = substream_seed(spec.seed, cell_index)
    args = [
        (spec.problem, n, c, spec.particles, spec.c_loc, spec.budget,
         cell_seed, start, stop)
        for start, stop in _chunk_ranges(spec.repeats)
    ]
    return _run_chunks(_optimization_chunk, args)


def analytic_return_time(problem, n, c):
    """Exact H_1 for the cell, when the analysis modules provide one:
    the birth-death value on the onemax profile, or the collapsed exact
    sorting solve (float beyond the exact-mode size limit). None when out
    of range."""
    cv = Fraction(c)
    if problem == ONEMAX:
        return chain.return_times(chain.standard_profiles(chain.ONEMAX, n, cv))[0]
    if n <= exactperm.EXACT_SOLVE_LIMIT:
        return exactperm.exact_return_time_sorting(n, cv, EXACT)
    if n <= exactperm.FLOAT_SOLVE_LIMIT:
        return exactperm.exact_return_time_sorting(n, cv, FLOAT)
    return None


def compare(analytic, empirical):
    """z-score the empirical mean against the analytic value; verdict
    passes within 3 sigma. Zero spread is compared by equality, with an
    infinite z flagging a mismatch the sampler cannot explain."""
    a = float(analytic)
    if empirical.count == 0:
        return ComparisonReport(analytic, empirical, float("nan"), False,
                                float("nan"), float("nan"))
    reference = 1.0 / math.sqrt(empirical.count)
    if empirical.stderr > 0:
        z = (empirical.mean - a) / empirical.stderr
    elif empirical.mean == a:
        z = 0.0
    else:
        z = math.copysign(math.inf, empirical.mean - a)
    if a != 0:
        relative = abs(empirical.mean - a) / abs(a)
    else:
        relative = 0.0 if empirical.mean == 0 else math.inf
    return ComparisonReport(analytic, empirical, z, abs(z) <= 3.0, relative,
                            reference)


@dataclass(frozen=True)
class ScalingStep:
    n: int
    value: float
    ratio: float
    base_estimate: float
    degree_estimate: float


def scaling_diagnostic(values):
    """Consecutive-n growth readings: for each step the raw ratio
    v(n)/v(n-1) (which estimates the base when growth is exponential) and
    the polynomial-degree estimate log ratio / log(n/(n-1))."""
    points = list(values)
    if len(points) < 2:
        raise ValueError("need at least two (n, value) points")
    out = []
    for (n0, v0), (n1, v1) in zip(points, points[1:]):
        if n1 != n0 + 1:
            raise ValueError(f"n values must be consecutive, got {n0} then {n1}")
        if v0 <= 0 or v1 <= 0:
            raise ValueError("values must be positive")
        ratio = float(v1) / float(v0)
        degree = math.log(ratio) / math.log(n1 / n0)
        out.append(ScalingStep(n=n1, value=float(v1), ratio=ratio,
                               base_estimate=ratio, degree_estimate=degree))
    return tuple(out)


@dataclass(frozen=True)
class CellResult:
    problem: str
    n: int
    c: object
    particles: int
    measurement: str
    repeats: int
    stats: SummaryStats
    analytic: object  # None when no analytic value applies
    report: object


def run_experiment(spec):
    """Sweep the spec's (n, c) grid; returns one CellResult per cell.

    Return-time cells get an analytic H_1 comparison wherever the exact
    modules cover the cell; optimization-time cells report statistics only
    (their analytic column stays empty).
    """
    results = []
    cell_index = 0
    for n in spec.n_values():
        for c in spec.c_values():
            cell = ExperimentSpec(
                problem=spec.problem, n=n, c=c,
                measurement=spec.measurement, repeats=spec.repeats,
                seed=spec.seed, particles=spec.particles,
                c_loc=spec.c_loc, budget=spec.budget,
            )
            if spec.measurement == RETURN_TIME:
                stats = estimate_return_time(cell, cell_index)
                analytic = analytic_return_time(spec.problem, n, c)
            else:
                stats = estimate_optimization_time(cell, cell_index)
                analytic = None
            report = compare(analytic, stats) if analytic is not None else None
            results.append(CellResult(
                problem=spec.problem, n=n, c=c, particles=spec.particles,
                measurement=spec.measurement, repeats=spec.repeats,
                stats=stats, analytic=analytic, report=report,
            ))
            cell_index += 1
    return results


EXPERIMENT_COLUMNS = (
    "problem", "n", "c", "P", "measurement", "repeats", "censored",
    "mean", "variance", "stderr", "analytic", "z", "verdict",
)


def _cell_fields(cell):
    stats = cell.stats
    return {
        "problem": cell.problem,
        "n": cell.n,
        "c": render(Fraction(cell.c)),
        "P": cell.particles,
        "measurement": cell.measurement,
        "repeats": cell.repeats,
        "censored": stats.censored,
        "mean": stats.mean,
        "variance": stats.variance,
        "stderr": stats.stderr,
        "analytic": None if cell.analytic is None else render(cell.analytic),
        "z": None if cell.report is None else cell.report.z,
        "verdict": None if cell.report is None
        else ("pass" if cell.report.verdict else "fail"),
    }


def write_experiment_csv(results, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(EXPERIMENT_COLUMNS)
    for cell in results:
        fields = _cell_fields(cell)
        writer.writerow(
            ["" if fields[col] is None else
             (repr(fields[col]) if isinstance(fields[col], float) else fields[col])
             for col in EXPERIMENT_COLUMNS]
        )


def write_experiment_json(results, stream):
    rows = []
    for cell in results:
        fields = _cell_fields(cell)
        for key in ("mean", "variance", "stderr", "z"):
            if fields[key] is not None and not math.isfinite(fields[key]):
                fields[key] = repr(fields[key])
        rows.append(fields)
    json.dump(rows, stream, indent=2)
    stream.write("\n")


def load_experiment_spec(path):
    """Read an ExperimentSpec from a JSON file. c entries given as strings
    parse as exact rationals ("1/3", "0.5")."""
    with open(path) as fh:
        raw = json.load(fh)
    known = {"problem", "n", "c", "measurement", "repeats", "seed",
             "particles", "cloc", "budget"}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown experiment spec fields: {sorted(unknown)}")
    missing = {"problem", "n", "c", "measurement", "repeats", "seed"} - set(raw)
    if missing:
        raise ValueError(f"experiment spec is missing fields: {sorted(missing)}")

    c = raw["c"]
    c = [Fraction(v) for v in c] if isinstance(c, list) else Fraction(c)
    return ExperimentSpec(
        problem=raw["problem"],
        n=raw["n"],
        c=c,
        measurement=raw["measurement"],
        repeats=raw["repeats"],
        seed=raw["seed"],
        particles=raw.get("particles", 1),
        c_loc=Fraction(raw.get("cloc", 0)),
        budget=raw.get("budget", 1_000_000),
    )
