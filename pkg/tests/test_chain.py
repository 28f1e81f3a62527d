"""Birth-death chain checks: exact values, identities, and simulation.

The variance test simulates the chain directly with numpy and compares the
sample law of the return time against the analytic H/V values, so the
recurrences are validated against the process itself, not against each other.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpso import chain
from dpso.chain import (
    BirthDeathSpec,
    alpha_base,
    base_by_integration,
    beta_base,
    clamped_probabilities,
    fitness_level_time,
    h1_constant,
    h_closed_form,
    return_profile,
    return_time_variances,
    return_times,
    standard_profiles,
)
from dpso.scalars import EXACT, FLOAT

F = Fraction


def const_spec(p, n):
    return BirthDeathSpec((F(p),) * n)


# ------------------------------------------------------------- exact values


def test_all_ones_chain_descends_in_single_steps():
    profile = return_profile(const_spec(1, 3))
    assert profile.H == (1, 1, 1)
    assert profile.V == (0, 0, 0)


def test_constant_half_chain():
    assert return_times(const_spec(F(1, 2), 7))[0] == 13
    assert h1_constant(F(1, 2), 7) == 13
    assert h1_constant(F(1, 2), 100) == 199


def test_h1_constant_agrees_with_recurrence():
    for p in (F(1, 3), F(2, 3), F(1, 7), F(9, 10)):
        for n in (1, 2, 3, 8, 20):
            assert h1_constant(p, n) == return_times(const_spec(p, n))[0]


def test_h1_constant_edge_cases():
    assert h1_constant(1, 5) == 1
    assert h1_constant(F(1, 2), 1) == 1
    assert isinstance(h1_constant(0.5, 4, mode=FLOAT), float)
    with pytest.raises(ValueError):
        h1_constant(0, 3)
    with pytest.raises(ValueError):
        h1_constant(F(3, 2), 3)
    with pytest.raises(ValueError):
        h1_constant(F(1, 2), 0)


def test_binomial_identity_chain():
    # p_i = 1/2 + i/(2n) gives H_1 = 4^n / C(2n, n) - 1 exactly
    for n in range(1, 21):
        spec = BirthDeathSpec(
            tuple(F(1, 2) + F(i, 2 * n) for i in range(1, n + 1))
        )
        expected = F(4**n, math.comb(2 * n, n)) - 1
        assert return_times(spec)[0] == expected
    assert F(4**2, math.comb(4, 2)) - 1 == F(5, 3)


def test_variance_recurrence_values():
    profile = return_profile(BirthDeathSpec((F(1, 2), F(1))))
    assert profile.H == (3, 1)
    assert profile.V == (8, 0)


def test_onemax_profile_level_two():
    spec = standard_profiles(chain.ONEMAX, 4, 0)
    assert spec.p == (F(1, 4), F(1, 2), F(3, 4), F(1))
    assert return_times(spec)[1] == F(11, 3)


def test_closed_form_examples():
    spec = BirthDeathSpec((F(1, 4), F(1, 2), F(1)))
    assert h_closed_form(spec, 1) == 13
    assert h_closed_form(spec, 2) == 3
    assert h_closed_form(spec, 3) == 1
    with pytest.raises(ValueError):
        h_closed_form(spec, 0)
    with pytest.raises(ValueError):
        h_closed_form(spec, 4)


# ----------------------------------------------------------------- clamping


def test_probabilities_above_one_are_clamped():
    assert clamped_probabilities(BirthDeathSpec((F(3), F(1, 2)))) == (1, 1)
    a = return_times(BirthDeathSpec((F(3), F(1, 2))))
    b = return_times(BirthDeathSpec((F(1), F(1, 2))))
    assert a == b


def test_top_level_probability_is_ignored():
    a = return_times(BirthDeathSpec((F(1, 2), F(1, 4))))
    b = return_times(BirthDeathSpec((F(1, 2), F(7))))
    assert a == b


def test_nonpositive_probability_rejected():
    with pytest.raises(ValueError):
        return_times(BirthDeathSpec((F(0), F(1, 2))))
    with pytest.raises(ValueError):
        h_closed_form(BirthDeathSpec((F(-1, 2), F(1))), 1)


# --------------------------------------------------------------- properties


rational_specs = st.lists(
    st.fractions(min_value=F(1, 50), max_value=F(3, 2)),
    min_size=1,
    max_size=12,
)


@settings(max_examples=200, deadline=None)
@given(rational_specs)
def test_closed_form_matches_recurrence_everywhere(p):
    spec = BirthDeathSpec(tuple(p))
    H = return_times(spec)
    for k in range(1, spec.n + 1):
        assert h_closed_form(spec, k) == H[k - 1]


@settings(max_examples=100, deadline=None)
@given(rational_specs, st.data())
def test_raising_a_probability_never_slows_the_chain(p, data):
    spec = BirthDeathSpec(tuple(p))
    i = data.draw(st.integers(min_value=0, max_value=len(p) - 1))
    bumped = list(p)
    bumped[i] = bumped[i] + F(1, 10)
    faster = BirthDeathSpec(tuple(bumped))
    assert return_times(faster)[0] <= return_times(spec)[0]


@settings(max_examples=50, deadline=None)
@given(rational_specs)
def test_float_mode_tracks_exact_mode(p):
    spec = BirthDeathSpec(tuple(p))
    exact = return_times(spec, mode=EXACT)
    approx = return_times(spec, mode=FLOAT)
    for e, a in zip(exact, approx):
        assert math.isclose(float(e), a, rel_tol=1e-9)


# ------------------------------------------------------- growth-rate checks


def test_linear_interpolation_profile_growth_is_subquadratic():
    # p_i = 1/2 + i/(2A(n)): with A(n) = n the doubling ratio sits strictly
    # between linear and quadratic growth; with A(n) = n^2 it is quadratic
    def h1(a_of_n, n):
        spec = BirthDeathSpec(
            tuple(0.5 + i / (2 * a_of_n(n)) for i in range(1, n + 1))
        )
        return return_times(spec, mode=FLOAT)[0]

    for n in (64, 128, 256):
        ratio = h1(lambda m: m, 2 * n) / h1(lambda m: m, n)
        assert 1.2 <= ratio <= 1.7
    for n in (64, 128, 256):
        ratio = h1(lambda m: m * m, 2 * n) / h1(lambda m: m * m, n)
        assert 1.9 <= ratio <= 2.1


def test_pair_count_profile_growth_exponent():
    # p_i = (1 + A(i)/A(n))/2 with A(m) = C(m, 2): doubling n multiplies the
    # return time by about 2^(2/3)
    def h1(n):
        a_n = math.comb(n, 2)
        spec = BirthDeathSpec(
            tuple((1 + math.comb(i, 2) / a_n) / 2 for i in range(1, n + 1))
        )
        return return_times(spec, mode=FLOAT)[0]

    target = 2 ** (2 / 3)
    for n in (128, 256, 512):
        ratio = h1(2 * n) / h1(n)
        assert abs(ratio - target) < 0.1


# --------------------------------------------------------- exponential bases


def test_beta_base_values_and_limits():
    assert beta_base(0.5) == pytest.approx(1.0, abs=1e-12)
    assert beta_base(0.25) == pytest.approx(1.1905507889761495, abs=1e-12)
    assert beta_base(1e-9) == pytest.approx(2.0, abs=1e-6)
    grid = [beta_base(c / 100) for c in range(1, 51)]
    assert all(1.0 <= v < 2.0 for v in grid)
    assert all(a > b for a, b in zip(grid, grid[1:]))


def test_alpha_base_values_and_limits():
    assert alpha_base(0.5) == pytest.approx(1.0, abs=1e-12)
    assert alpha_base(1e-9) == pytest.approx(3 + 2 * math.sqrt(2), abs=1e-3)
    for c in (0.05, 0.1, 0.2, 0.3, 0.4, 0.45):
        assert beta_base(c) < alpha_base(c) < (1 - c) / c


def test_base_domains():
    for bad in (0, -0.1, 0.6, 1):
        with pytest.raises(ValueError):
            beta_base(bad)
        with pytest.raises(ValueError):
            alpha_base(bad)


def test_base_by_integration_constant_profiles():
    # p = 1/4 everywhere: the crossing never happens, the integrand is the
    # constant ln 3, and the base is exactly 3
    assert base_by_integration(lambda x: 0.25, 1000) == pytest.approx(3.0, abs=1e-9)
    assert base_by_integration(lambda x: 0.75, 1000) == 1.0
    assert base_by_integration(lambda x: 0.5, 1000) == 1.0


def test_base_by_integration_matches_closed_forms():
    n = 1000
    c = 0.25
    linear = base_by_integration(lambda x: c + (1 - c) * x / n, n)
    assert linear == pytest.approx(beta_base(c), abs=1e-6)
    quad = base_by_integration(lambda x: c + (1 - c) * (x / n) ** 2, n)
    assert quad == pytest.approx(alpha_base(c), abs=1e-6)


def test_base_by_integration_validates_profile():
    with pytest.raises(ValueError):
        base_by_integration(lambda x: 1.5, 10)
    with pytest.raises(ValueError):
        base_by_integration(lambda x: -0.25, 10)
    with pytest.raises(ValueError):
        base_by_integration(lambda x: 0.6 - 0.2 * x / 10, 10)
    with pytest.raises(ValueError):
        base_by_integration(lambda x: 0.25, 10, tol=0)


# ------------------------------------------------------------ fitness levels


def test_fitness_level_time_certain_levels():
    assert fitness_level_time(F(10), [1, 1, 1, 1]) == 4


def test_fitness_level_time_exact_sums():
    n = 6
    s = [F(i, n) for i in range(1, n + 1)]
    harmonic = sum(F(1, i) for i in range(1, n + 1))
    assert fitness_level_time(F(0), s) == n * harmonic

    h1 = F(23)
    s = [F(i, 6) for i in range(1, 4)]
    expected = sum((h1 + 1) * (F(6, i) - 1) + 1 for i in range(1, 4))
    assert fitness_level_time(h1, s) == expected


def test_fitness_level_time_validates():
    with pytest.raises(ValueError):
        fitness_level_time(F(1), [])
    with pytest.raises(ValueError):
        fitness_level_time(F(1), [F(1, 2), F(0)])
    with pytest.raises(ValueError):
        fitness_level_time(F(1), [F(3, 2)])


# --------------------------------------------------------- standard profiles


def test_standard_profiles_shapes_and_values():
    sort_min = standard_profiles(chain.SORT_MIN, 4, F(1, 2))
    assert sort_min.n == 3
    assert sort_min.p[0] == F(7, 12)
    assert sort_min.p == (F(7, 12), F(2, 3), F(3, 4))

    sort_max = standard_profiles(chain.SORT_MAX, 4, 0)
    assert sort_max.p == (F(1, 6), F(1, 2), F(1))

    onemax = standard_profiles(chain.ONEMAX, 4, F(1, 2))
    assert onemax.p == (F(5, 8), F(3, 4), F(7, 8), F(1))


def test_standard_profiles_validate():
    with pytest.raises(ValueError):
        standard_profiles("maxsat", 4, 0)
    with pytest.raises(ValueError):
        standard_profiles(chain.ONEMAX, 1, 0)
    with pytest.raises(ValueError):
        standard_profiles(chain.ONEMAX, 4, F(3, 2))


# ----------------------------------------------------- simulation invariant


def simulate_return_times(pbar, reps, seed):
    """Vectorized walk of the chain from S_1 until absorption at S_0."""
    rng = np.random.default_rng(seed)
    n = len(pbar)
    parr = np.asarray([float(v) for v in pbar])
    pos = np.ones(reps, dtype=np.int64)
    steps = np.zeros(reps, dtype=np.int64)
    alive = np.arange(reps)
    while alive.size:
        cur = pos[alive]
        down = rng.random(alive.size) < parr[cur - 1]
        pos[alive] = np.where(down, cur - 1, cur + 1)
        steps[alive] += 1
        alive = alive[pos[alive] != 0]
    return steps


@pytest.mark.parametrize(
    "n,p", [(2, F(2, 3)), (3, F(1, 2)), (4, F(3, 4))]
)
def test_simulated_law_matches_analytic_profile(n, p):
    spec = const_spec(p, n)
    profile = return_profile(spec)
    h1 = float(profile.H[0])
    v1 = float(profile.V[0])
    reps = 1_000_000
    sample = simulate_return_times(clamped_probabilities(spec), reps, seed=n)
    mean = sample.mean()
    assert abs(mean - h1) < 5 * math.sqrt(v1 / reps)
    assert abs(sample.var(ddof=1) - v1) <= 0.05 * v1
