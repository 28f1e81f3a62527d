"""Exact combinatorics of the transposition walk on the symmetric group.

The walk that swaps two uniformly chosen positions per step only sees a
permutation through its cycle type, so the n!-state chain collapses to one
state per integer partition of n (5 states for n = 4, 37338 for n = 40).
This module builds the collapsed transition kernels, solves the resulting
hitting-time systems exactly over rationals or in floats, and computes the
average-improvement-probability chain and its diagnostics.

Cycle types are tuples of parts in non-increasing order; level i = n minus
the number of parts equals the transposition distance to the identity of
every permutation of that type.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import chain
from .scalars import EXACT, FLOAT, check_mode, convert

_stirling_rows = [[1]]


def stirling_first_unsigned(n, m):
    """Number of permutations of n elements with exactly m cycles.

    Recursion c(n, m) = c(n-1, m-1) + (n-1) c(n-1, m) with c(0, 0) = 1;
    rows are cached, arbitrary precision. m outside [0, n] gives 0.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if m < 0 or m > n:
        return 0
    while len(_stirling_rows) <= n:
        k = len(_stirling_rows)
        prev = _stirling_rows[k - 1]
        row = [0] * (k + 1)
        for j in range(1, k + 1):
            row[j] = prev[j - 1] + (k - 1) * (prev[j] if j < k else 0)
        _stirling_rows.append(row)
    return _stirling_rows[n][m]


@lru_cache(maxsize=None)
def _partitions_desc(total, largest):
    """All partitions of `total` with parts <= largest, non-increasing."""
    if total == 0:
        return ((),)
    out = []
    for first in range(min(total, largest), 0, -1):
        for rest in _partitions_desc(total - first, first):
            out.append((first,) + rest)
    return tuple(out)


@dataclass(frozen=True)
class PartitionTable:
    """All cycle types of n, grouped by level (distance to identity)."""

    n: int
    levels: tuple  # levels[i] = cycle types at distance i, i = 0..n-1
    order: tuple  # flat, level by level
    index: dict  # cycle type -> ordinal in `order`


@lru_cache(maxsize=None)
def enumerate_partitions(n):
    if n < 1:
        raise ValueError(f"partition table needs n >= 1, got {n}")
    levels = [[] for _ in range(n)]
    for lam in _partitions_desc(n, n):
        levels[n - len(lam)].append(lam)
    # within a level: descending lexicographic, a stable documented order
    levels = tuple(tuple(sorted(lvl, reverse=True)) for lvl in levels)
    order = tuple(lam for lvl in levels for lam in lvl)
    index = {lam: k for k, lam in enumerate(order)}
    return PartitionTable(n=n, levels=levels, order=order, index=index)


def permutation_count_of_type(lam):
    """Permutations with cycle type lam: n! / prod(k^m_k m_k!) over the
    distinct part sizes k with multiplicities m_k."""
    n = sum(lam)
    if n < 1 or any(part < 1 for part in lam):
        raise ValueError(f"not a partition of a positive integer: {lam!r}")
    denom = 1
    for k in set(lam):
        m = lam.count(k)
        denom *= k ** m * math.factorial(m)
    return math.factorial(n) // denom


def _multiplicities(lam):
    out = {}
    for part in lam:
        out[part] = out.get(part, 0) + 1
    return out


def _without(lam, *parts):
    pool = list(lam)
    for part in parts:
        pool.remove(part)
    return pool


def _retype(pool, *parts):
    return tuple(sorted(pool + list(parts), reverse=True))


def _split_moves(lam):
    """Unnormalized split weights: transposing two positions inside a
    k-cycle cuts it at cyclic distance d into parts (d, k-d); a k-cycle has
    k such position pairs per split, k/2 when d = k-d, C(k, 2) in total."""
    mult = _multiplicities(lam)
    for k, m in mult.items():
        if k < 2:
            continue
        base = _without(lam, k)
        for d in range(1, k // 2 + 1):
            ways = (k // 2 if 2 * d == k else k) * m
            yield _retype(base, d, k - d), ways


def _merge_moves(lam):
    """Unnormalized merge weights: one position from an a-cycle and one
    from a distinct b-cycle join them into an (a+b)-cycle, a*b ways per
    ordered cycle pair."""
    mult = _multiplicities(lam)
    parts = sorted(mult)
    for ai, a in enumerate(parts):
        for b in parts[ai:]:
            if a == b:
                pairs = math.comb(mult[a], 2)
            else:
                pairs = mult[a] * mult[b]
            if pairs == 0:
                continue
            yield _retype(_without(lam, a, b), a + b), pairs * a * b


@dataclass(frozen=True)
class TransitionKernel:
    """Collapsed one-step distribution per cycle type, exact rationals."""

    n: int
    rows: dict  # cycle type -> tuple of (target type, Fraction)

    def row(self, lam):
        try:
            return self.rows[lam]
        except KeyError:
            raise ValueError(f"kernel has no row for {lam!r}") from None


def _accumulate(moves):
    out = {}
    for target, ways in moves:
        out[target] = out.get(target, 0) + ways
    return out


@lru_cache(maxsize=None)
def random_move_kernel(n):
    """Cycle-type distribution after one uniform transposition (all
    C(n, 2) position pairs equally likely)."""
    if n < 2:
        raise ValueError(f"kernel needs n >= 2, got {n}")
    pairs = math.comb(n, 2)
    rows = {}
    for lam in enumerate_partitions(n).order:
        weights = _accumulate(list(_split_moves(lam)) + list(_merge_moves(lam)))
        rows[lam] = tuple(
            (target, Fraction(w, pairs)) for target, w in sorted(weights.items())
        )
    return TransitionKernel(n=n, rows=rows)


@lru_cache(maxsize=None)
def improving_move_kernel(n):
    """Cycle-type distribution after a uniform choice among the
    distance-decreasing transpositions (the within-cycle pairs). The sorted
    type (1, ..., 1) has no such move, hence no row."""
    if n < 2:
        raise ValueError(f"kernel needs n >= 2, got {n}")
    rows = {}
    for lam in enumerate_partitions(n).order:
        total = sum(math.comb(k, 2) for k in lam)
        if total == 0:
            continue
        weights = _accumulate(_split_moves(lam))
        rows[lam] = tuple(
            (target, Fraction(w, total)) for target, w in sorted(weights.items())
        )
    return TransitionKernel(n=n, rows=rows)


EXACT_SOLVE_LIMIT = 14
FLOAT_SOLVE_LIMIT = 60


def _check_solver_size(n, mode):
    check_mode(mode)
    if n < 2:
        raise ValueError(f"solver needs n >= 2, got {n}")
    if mode == EXACT and n > EXACT_SOLVE_LIMIT:
        raise ValueError(
            f"exact solves are limited to n <= {EXACT_SOLVE_LIMIT}; "
            "use float mode"
        )
    if mode == FLOAT and n > FLOAT_SOLVE_LIMIT:
        raise ValueError(f"float solves are limited to n <= {FLOAT_SOLVE_LIMIT}")


def hitting_time_table(n, c, mode=EXACT):
    """Expected steps to reach the sorted type from every cycle type, under
    the mix of c times the improving kernel and (1-c) times the random one.

    Returns (PartitionTable, dict cycle type -> scalar). The mixed kernel
    moves one level per step and never within a level, so the linear system
    is block tridiagonal in the level grouping; it is solved by levelwise
    forward elimination expressing each level's h as an affine function of
    the next level's, then back-substituting from the top level, which has
    no upward transitions.
    """
    _check_solver_size(n, mode)
    cv = convert(c, EXACT)
    if not 0 <= cv <= 1:
        raise ValueError(f"c must be in [0, 1], got {c!r}")
    table = enumerate_partitions(n)
    random_rows = random_move_kernel(n).rows
    improving_rows = improving_move_kernel(n).rows

    def mixed_row(lam):
        weights = {}
        for target, prob in random_rows[lam]:
            weights[target] = weights.get(target, 0) + (1 - cv) * prob
        if cv:
            for target, prob in improving_rows[lam]:
                weights[target] = weights.get(target, 0) + cv * prob
        return weights

    # per level i >= 1: sparse (row, col, prob) with cols in level i -/+ 1
    m = n - 1
    down, up = [None] * (m + 1), [None] * (m + 1)
    for i in range(1, m + 1):
        rows_here = table.levels[i]
        below = {lam: s for s, lam in enumerate(table.levels[i - 1])}
        above = (
            {lam: s for s, lam in enumerate(table.levels[i + 1])} if i < m else {}
        )
        D, U = [], []
        for r, lam in enumerate(rows_here):
            for target, prob in mixed_row(lam).items():
                if target in below:
                    D.append((r, below[target], prob))
                else:
                    U.append((r, above[target], prob))
        down[i], up[i] = D, U

    sizes = [len(lvl) for lvl in table.levels]
    if mode == EXACT:
        h_levels = _eliminate_exact(sizes, down, up)
    else:
        h_levels = _eliminate_float(sizes, down, up)
    values = {table.levels[0][0]: (Fraction(0) if mode == EXACT else 0.0)}
    for i in range(1, m + 1):
        for lam, value in zip(table.levels[i], h_levels[i]):
            values[lam] = value
    return table, values


def _eliminate_exact(sizes, down, up):
    m = len(sizes) - 1
    coeff = [None] * (m + 1)  # B_i: h_i = a_i + B_i h_{i+1}
    offset = [None] * (m + 1)
    for i in range(1, m + 1):
        size = sizes[i]
        above = sizes[i + 1] if i < m else 0
        rhs_vec = [Fraction(1)] * size
        M = [[Fraction(1) if r == s else Fraction(0) for s in range(size)] for r in range(size)]
        if i > 1:
            B_prev, a_prev = coeff[i - 1], offset[i - 1]
            for r, t, v in down[i]:
                rhs_vec[r] += v * a_prev[t]
                row = M[r]
                for s in range(size):
                    if B_prev[t][s]:
                        row[s] -= v * B_prev[t][s]
        U = [[Fraction(0)] * above for _ in range(size)]
        for r, s, v in up[i]:
            U[r][s] = v
        aug = [U[r] + [rhs_vec[r]] for r in range(size)]
        solved = _gauss_exact(M, aug)
        coeff[i] = [row[:-1] for row in solved]
        offset[i] = [row[-1] for row in solved]
    h = [None] * (m + 1)
    h[m] = offset[m]
    for i in range(m - 1, 0, -1):
        nxt = h[i + 1]
        h[i] = [
            offset[i][r]
            + sum(coeff[i][r][s] * nxt[s] for s in range(sizes[i + 1]) if coeff[i][r][s])
            for r in range(sizes[i])
        ]
    return h


def _eliminate_float(sizes, down, up):
    m = len(sizes) - 1
    coeff = [None] * (m + 1)
    offset = [None] * (m + 1)
    for i in range(1, m + 1):
        size = sizes[i]
        above = sizes[i + 1] if i < m else 0
        D = np.zeros((size, sizes[i - 1]))
        for r, s, v in down[i]:
            D[r, s] = float(v)
        U = np.zeros((size, above))
        for r, s, v in up[i]:
            U[r, s] = float(v)
        rhs = np.ones(size)
        if i == 1:
            M = np.eye(size)
        else:
            M = np.eye(size) - D @ coeff[i - 1]
            rhs = rhs + D @ offset[i - 1]
        if above:
            stacked = np.linalg.solve(M, np.column_stack([U, rhs]))
            coeff[i], offset[i] = stacked[:, :-1], stacked[:, -1]
        else:
            coeff[i] = np.zeros((size, 0))
            offset[i] = np.linalg.solve(M, rhs)
    h = [None] * (m + 1)
    h[m] = offset[m]
    for i in range(m - 1, 0, -1):
        h[i] = offset[i] + coeff[i] @ h[i + 1]
    return [None] + [list(map(float, h[i])) for i in range(1, m + 1)]


def _gauss_exact(M, aug):
    """Solve M X = aug over Fractions; aug rows carry multiple right-hand
    sides. Pivoting takes the first nonzero entry in the column, which a
    nonsingular M always provides; there is no rounding to motivate
    magnitude pivoting in exact arithmetic."""
    size = len(M)
    work = [list(M[r]) + list(aug[r]) for r in range(size)]
    width = len(work[0]) if size else 0
    for col in range(size):
        pivot = next(r for r in range(col, size) if work[r][col] != 0)
        work[col], work[pivot] = work[pivot], work[col]
        inv = 1 / Fraction(work[col][col])
        work[col] = [v * inv for v in work[col]]
        for r in range(size):
            if r != col and work[r][col]:
                factor = work[r][col]
                row = work[r]
                prow = work[col]
                for s in range(col, width):
                    if prow[s]:
                        row[s] -= factor * prow[s]
    return [row[size:] for row in work]


def random_walk_sort_time(n, mode=EXACT):
    """Expected transpositions for the pure random walk to first sort a
    uniform permutation: the count-weighted average of the per-type
    hitting times, which excludes any evaluation accounting."""
    table, values = hitting_time_table(n, 0, mode)
    total = sum(
        permutation_count_of_type(lam) * values[lam] for lam in table.order
    )
    nfact = math.factorial(n)
    return total / nfact if mode == EXACT else float(total) / nfact


def exact_return_time_sorting(n, c, mode=EXACT):
    """Expected steps back to the sorted state from transposition distance
    1 when each step improves with probability c and is a uniform
    transposition otherwise. Equals n! - 1 at c = 0."""
    _, values = hitting_time_table(n, c, mode)
    start = (2,) + (1,) * (n - 2)
    return values[start]


def average_improvement_probability(n, i, c, mode=EXACT):
    """Improvement probability at distance i averaged uniformly over the
    cycle types there, lifted to the c-mix: c + (1-c) * average."""
    if n < 2:
        raise ValueError(f"needs n >= 2, got {n}")
    if not 1 <= i <= n - 1:
        raise ValueError(f"distance must be in [1, {n - 1}], got {i}")
    cv = convert(c, EXACT)
    if not 0 <= cv <= 1:
        raise ValueError(f"c must be in [0, 1], got {c!r}")
    inner = 0
    for k in range(1, i + 2):
        inner += (
            Fraction(k - 1, n - 1)
            * Fraction(math.factorial(n - 1), math.factorial(n - k))
            * stirling_first_unsigned(n - k, n - i - 1)
        )
    value = cv + (1 - cv) * inner / stirling_first_unsigned(n, n - i)
    return value if mode == EXACT else float(value)


def average_profile(n, c):
    """Birth-death spec on the sorting distance levels 1..n-1 with the
    averaged improvement probabilities as down-step probabilities."""
    return chain.BirthDeathSpec(
        tuple(average_improvement_probability(n, i, c) for i in range(1, n))
    )


def average_return_time(n, c, mode=EXACT):
    """H_1 of the averaged-probability chain."""
    return chain.return_times(average_profile(n, c), mode)[0]


@dataclass(frozen=True)
class QRatioDiagnostics:
    """Consecutive-n growth ratios of the sorting return time.

    q_ex uses the exact collapsed chain, q_av the averaged-probability
    birth-death model; the degree fields read each ratio as n^d growth,
    d = log ratio / log(n/(n-1)).
    """

    n: int
    q_ex: object
    q_av: object
    degree_ex: float
    degree_av: float


def q_ratios(n, c, mode=EXACT):
    if n < 3:
        raise ValueError(f"ratios need n >= 3, got {n}")
    q_ex = _ratio(
        exact_return_time_sorting(n, c, mode),
        exact_return_time_sorting(n - 1, c, mode),
        mode,
    )
    q_av = _ratio(
        average_return_time(n, c, mode),
        average_return_time(n - 1, c, mode),
        mode,
    )
    scale = math.log(n / (n - 1))
    return QRatioDiagnostics(
        n=n,
        q_ex=q_ex,
        q_av=q_av,
        degree_ex=math.log(float(q_ex)) / scale,
        degree_av=math.log(float(q_av)) / scale,
    )


def _ratio(num, den, mode):
    return num / den if mode == EXACT else float(num) / float(den)


def sample_permutation_with_cycles(n, m, stream):
    """Uniform permutation of {0..n-1} with exactly m cycles.

    Walks the Stirling recursion top-down to decide which elements open a
    new cycle, then inserts the others after a uniformly chosen earlier
    element; both stages together weight every m-cycle permutation
    equally.
    """
    if not 1 <= m <= n:
        raise ValueError(f"cycle count must be in [1, {n}], got {m}")
    opens = [False] * n
    r = m
    for k in range(n, 0, -1):
        e = k - 1
        if r == k:
            opens[e] = True
            r -= 1
            continue
        total = stirling_first_unsigned(k, r)
        if stream.next_below(total) < stirling_first_unsigned(k - 1, r - 1):
            opens[e] = True
            r -= 1
    sigma = []
    for e in range(n):
        if opens[e]:
            sigma.append(e)
        else:
            t = stream.next_below(e)
            sigma.append(sigma[t])
            sigma[t] = e
    return tuple(sigma)
