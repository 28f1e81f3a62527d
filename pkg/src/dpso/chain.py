"""Birth-death chain analysis for attractor-return processes.

The chain has states S_0..S_n for a length-n probability vector p_1..p_n.
From S_i with i < n the walk steps down (toward S_0) with probability
min(1, p_i) and otherwise up; from S_n it always steps down. H_i is the
expected number of steps to get from S_i to S_{i-1}, so H_1 is the expected
return time to S_0 from an adjacent state; V_i is the variance of that step
count. Everything is computable either exactly over rationals or in floats:
exact mode is the reference (products like ((1-p)/p)^n overflow floats long
before rationals become slow), float mode serves asymptotic sweeps.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .scalars import EXACT, convert, check_mode


@dataclass(frozen=True)
class BirthDeathSpec:
    """Probability vector of the chain; entries may exceed 1 (they are
    clamped where the chain is evaluated, never at construction)."""

    p: tuple

    def __post_init__(self):
        if len(self.p) < 1:
            raise ValueError("a birth-death spec needs at least one level")

    @property
    def n(self):
        return len(self.p)


@dataclass(frozen=True)
class ReturnProfile:
    """Return times H_1..H_n and variances V_1..V_n of one spec.

    Sequences are 0-indexed: H[i] is the level-(i+1) value.
    """

    H: tuple
    V: tuple
    mode: str


def clamped_probabilities(spec, mode=EXACT):
    """Per-level down-step probabilities: min(1, p_i) below the top level,
    and exactly 1 at the top (the walk cannot go above S_n)."""
    p = [convert(v, mode) for v in spec.p]
    one = Fraction(1) if mode == EXACT else 1.0
    out = [v if v < 1 else one for v in p[:-1]]
    out.append(one)
    return tuple(out)


def return_times(spec, mode=EXACT):
    """Expected per-level descent times H_1..H_n (element i is H_{i+1}).

    Backward recurrence from H_n = 1: each level pays one step plus, on an
    up-move, the cost of coming back down through level i+1 again.
    """
    pbar = clamped_probabilities(spec, mode)
    n = spec.n
    for i, v in enumerate(pbar):
        if v <= 0:
            raise ValueError(
                f"clamped probability at level {i + 1} is {v}; "
                "return times are undefined"
            )
    H = [None] * n
    H[n - 1] = Fraction(1) if mode == EXACT else 1.0
    for i in range(n - 2, -1, -1):
        H[i] = (1 + (1 - pbar[i]) * H[i + 1]) / pbar[i]
    return tuple(H)


def return_time_variances(spec, H=None, mode=EXACT):
    """Variances V_1..V_n of the per-level descent times.

    V_n = 0 (the top level descends surely in one step); below it the law of
    total variance gives V_i from V_{i+1} and (H_{i+1}+1)^2.
    """
    pbar = clamped_probabilities(spec, mode)
    if H is None:
        H = return_times(spec, mode)
    n = spec.n
    V = [None] * n
    V[n - 1] = Fraction(0) if mode == EXACT else 0.0
    for i in range(n - 2, -1, -1):
        q = 1 - pbar[i]
        V[i] = (q / pbar[i]) * V[i + 1] + (q / pbar[i] ** 2) * (H[i + 1] + 1) ** 2
    return tuple(V)


def return_profile(spec, mode=EXACT):
    H = return_times(spec, mode)
    V = return_time_variances(spec, H, mode)
    return ReturnProfile(H=H, V=V, mode=mode)


def h1_constant(p, n, mode=EXACT):
    """H_1 for the constant-probability chain of length n.

    (1 - 2p((1-p)/p)^n)/(2p - 1), with the removable cases p = 1/2 (value
    2n - 1) and p = 1 (value 1) handled explicitly.
    """
    check_mode(mode)
    if n < 1:
        raise ValueError(f"chain length must be >= 1, got {n}")
    pv = convert(p, EXACT)
    if not 0 < pv <= 1:
        raise ValueError(f"constant probability must be in (0, 1], got {p!r}")
    if pv == 1:
        return Fraction(1) if mode == EXACT else 1.0
    if pv == Fraction(1, 2):
        val = Fraction(2 * n - 1)
        return val if mode == EXACT else float(val)
    pv = convert(p, mode)
    return (1 - 2 * pv * ((1 - pv) / pv) ** n) / (2 * pv - 1)


def h_closed_form(spec, k, mode=EXACT):
    """H_k by direct summation instead of recurrence:
    sum_{i=k}^n (1/p_i * prod_{j=k}^{i-1} r_j) - prod_{j=k}^n r_j with
    r_j = (1-p_j)/p_j, all on the clamped view. Agrees exactly with
    return_times in exact mode; kept as an independent cross-check and for
    single-level queries.
    """
    pbar = clamped_probabilities(spec, mode)
    n = spec.n
    if not 1 <= k <= n:
        raise ValueError(f"level must be in [1, {n}], got {k}")
    for i, v in enumerate(pbar):
        if v <= 0:
            raise ValueError(
                f"clamped probability at level {i + 1} is {v}; "
                "return times are undefined"
            )
    total = 0
    prefix = Fraction(1) if mode == EXACT else 1.0
    for i in range(k - 1, n):
        total += prefix / pbar[i]
        prefix *= (1 - pbar[i]) / pbar[i]
    return total - prefix


def fitness_level_time(h1, s):
    """Optimization-time upper bound from escape probabilities s_i:
    sum_i ((H_1 + 1)(1/s_i - 1) + 1). Exact when the inputs are exact."""
    levels = list(s)
    if not levels:
        raise ValueError("need at least one fitness level")
    total = 0
    for v in levels:
        if not 0 < v <= 1:
            raise ValueError(f"level probabilities must be in (0, 1], got {v!r}")
        total += (h1 + 1) * (1 / v - 1) + 1
    return total


ONEMAX = "onemax"
SORT_MIN = "sort-min"
SORT_MAX = "sort-max"


def standard_profiles(problem, n, c):
    """Reference chain specs. onemax: p_i = c + (1-c) i/n over i = 1..n.
    The sorting chains live on distance levels 1..n-1 (transposition
    distance diameter): sort-min uses the pessimistic per-level improvement
    count i, sort-max the optimistic C(i+1, 2), both over C(n, 2) pairs.
    """
    if n < 2:
        raise ValueError(f"profiles need n >= 2, got {n}")
    cv = Fraction(c)
    if not 0 <= cv <= 1:
        raise ValueError(f"c must be in [0, 1], got {c!r}")
    if problem == ONEMAX:
        p = tuple(cv + (1 - cv) * Fraction(i, n) for i in range(1, n + 1))
    elif problem == SORT_MIN:
        pairs = math.comb(n, 2)
        p = tuple(cv + (1 - cv) * Fraction(i, pairs) for i in range(1, n))
    elif problem == SORT_MAX:
        pairs = math.comb(n, 2)
        p = tuple(
            cv + (1 - cv) * Fraction(math.comb(i + 1, 2), pairs)
            for i in range(1, n)
        )
    else:
        raise ValueError(f"unknown profile {problem!r}")
    return BirthDeathSpec(p)


def beta_base(c):
    """Exponential base 2^(1/(1-c)) (1-c) c^(c/(1-c)) of the return time
    under the linear probability profile; equals 1 at c = 1/2 and tends to
    2 as c -> 0."""
    cf = float(c)
    if not 0 < cf <= 0.5:
        raise ValueError(f"c must be in (0, 1/2], got {c!r}")
    return 2.0 ** (1.0 / (1.0 - cf)) * (1.0 - cf) * cf ** (cf / (1.0 - cf))


def alpha_base(c):
    """Exponential base of the return time under the quadratic probability
    profile: ((1+s)/(1-s)) exp(-2 sqrt(c/(1-c)) arctan(sqrt((1-2c)/(2c))))
    with s = sqrt((1-2c)/(2(1-c))). Equals 1 at c = 1/2; tends to
    3 + 2 sqrt(2) as c -> 0."""
    cf = float(c)
    if not 0 < cf <= 0.5:
        raise ValueError(f"c must be in (0, 1/2], got {c!r}")
    s = math.sqrt((1.0 - 2.0 * cf) / (2.0 * (1.0 - cf)))
    arc = math.atan(math.sqrt((1.0 - 2.0 * cf) / (2.0 * cf)))
    return (1.0 + s) / (1.0 - s) * math.exp(-2.0 * math.sqrt(cf / (1.0 - cf)) * arc)


def base_by_integration(p, n, tol=1e-10):
    """Exponential base of H_1 for a non-decreasing probability profile p
    on [0, n]: exp of the integral of ln((1-p)/p) over the region where
    p < 1/2, in normalized coordinates.

    The crossing point k* = inf{x : p(x) >= 1/2} is located by bisection
    (absolute tolerance 1e-12 on x); the integral runs over [0, k*/n] with
    adaptive Simpson quadrature at absolute tolerance tol. The integrand
    vanishes at the upper endpoint, so no singularity handling is needed.
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    grid = 256
    values = [p(n * k / grid) for k in range(grid + 1)]
    for k, v in enumerate(values):
        if not 0 < v <= 1:
            raise ValueError(
                f"profile must map into (0, 1]; p({n * k / grid}) = {v}"
            )
        if k and v < values[k - 1] - 1e-12:
            raise ValueError("profile is not non-decreasing on the sample grid")
    if values[0] >= 0.5:
        return 1.0
    if values[-1] < 0.5:
        kstar = float(n)
    else:
        lo, hi = 0.0, float(n)
        while hi - lo > 1e-12:
            mid = (lo + hi) / 2
            if p(mid) >= 0.5:
                hi = mid
            else:
                lo = mid
        kstar = hi

    def integrand(t):
        v = p(n * t)
        return math.log((1.0 - v) / v)

    upper = kstar / n
    integral = _adaptive_simpson(integrand, 0.0, upper, tol)
    return math.exp(integral)


def _adaptive_simpson(f, a, b, tol):
    if b <= a:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_split(f, a, fa, b, fb, m, fm, whole, tol, 60)


def _simpson_split(f, a, fa, b, fb, m, fm, whole, tol, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    half = 0.5 * tol
    return (
        _simpson_split(f, a, fa, m, fm, lm, flm, left, half, depth - 1)
        + _simpson_split(f, m, fm, b, fb, rm, frm, right, half, depth - 1)
    )
