import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ehlink.allocation import (
    allocate_bruteforce,
    allocate_optimal,
    check_smoothing_improvement,
    cumulative,
    lower_bound,
    throughput,
    throughput_report,
    upper_bound,
)
from ehlink.arrivals import ArrivalSpec, generate_slot_profile
from ehlink.errors import InputDataError, ParameterError, ResourceLimitError

profiles = st.lists(
    st.floats(0.0, 1e4, allow_nan=False, allow_infinity=False), min_size=1, max_size=12
)


def _random_profile(rng, l_slots, mean=10.0):
    return rng.exponential(mean, l_slots)


def test_cumulative_examples():
    assert cumulative([3.0, 1.0, 2.0]).points.tolist() == [0.0, 3.0, 4.0, 6.0]
    assert cumulative([5.0]).points.tolist() == [0.0, 5.0]
    assert cumulative([0.0, 0.0]).points.tolist() == [0.0, 0.0, 0.0]


def test_throughput_examples():
    assert throughput([3.0, 3.0]) == 1.0
    assert throughput([0.0, 0.0, 0.0]) == 0.0
    assert throughput([1.0, 3.0]) == pytest.approx(0.75)
    with pytest.raises(ParameterError):
        throughput([-0.5])
    with pytest.raises(InputDataError):
        throughput([])


def test_bound_examples():
    assert lower_bound([3.0, 3.0]) == 1.0
    assert lower_bound([0.0, 15.0]) == 1.0
    assert upper_bound([3.0, 3.0]) == 1.0
    assert upper_bound([0.0, 6.0]) == 1.0
    assert upper_bound([3.0, 1.0, 2.0]) == pytest.approx(0.5 * math.log2(3.0))


def test_allocate_optimal_merges_into_constant():
    allocation = allocate_optimal([3.0, 1.0, 2.0])
    assert allocation.powers.tolist() == [2.0, 2.0, 2.0]
    assert allocation.breakpoints == (0, 3)
    assert allocation.throughput == pytest.approx(0.5 * math.log2(3.0))


def test_allocate_optimal_keeps_increasing_profile():
    allocation = allocate_optimal([1.0, 3.0])
    assert allocation.powers.tolist() == [1.0, 3.0]
    assert allocation.breakpoints == (0, 1, 2)


def test_allocate_optimal_constant_profile():
    allocation = allocate_optimal([4.0, 4.0, 4.0, 4.0])
    assert allocation.powers.tolist() == [4.0] * 4
    assert allocation.breakpoints == (0, 4)


def test_allocate_optimal_zero_prefix():
    allocation = allocate_optimal([0.0, 0.0, 5.0])
    assert allocation.powers.tolist() == [0.0, 0.0, 5.0]
    assert allocation.throughput == pytest.approx(0.5 * math.log2(6.0) / 3.0)


def test_allocate_optimal_single_slot():
    allocation = allocate_optimal([7.0])
    assert allocation.powers.tolist() == [7.0]
    assert allocation.breakpoints == (0, 1)


def test_allocate_accepts_slot_profile():
    profile = generate_slot_profile(ArrivalSpec.exponential(10.0), 6, seed=4)
    a = allocate_optimal(profile)
    b = allocate_optimal(profile.rates)
    assert np.array_equal(a.powers, b.powers)


def test_bruteforce_examples():
    allocation = allocate_bruteforce([3.0, 1.0, 2.0])
    assert allocation.powers.tolist() == [2.0, 2.0, 2.0]
    assert allocation.throughput == pytest.approx(0.5 * math.log2(3.0))
    single = allocate_bruteforce([7.0])
    assert single.powers.tolist() == [7.0]


def test_bruteforce_slot_budget():
    with pytest.raises(ResourceLimitError):
        allocate_bruteforce(np.ones(21))


def test_bruteforce_agrees_with_solver():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        l_slots = int(rng.integers(1, 9))
        rates = _random_profile(rng, l_slots)
        fast = allocate_optimal(rates)
        slow = allocate_bruteforce(rates)
        assert abs(fast.throughput - slow.throughput) <= 1e-9
        assert np.max(np.abs(fast.powers - slow.powers)) <= 1e-9


def test_optimal_structure_invariants():
    rng = np.random.default_rng(7)
    for _ in range(300):
        l_slots = int(rng.integers(1, 30))
        rates = _random_profile(rng, l_slots)
        allocation = allocate_optimal(rates)
        e = cumulative(rates).points
        # powers never decrease
        assert np.all(np.diff(allocation.powers) >= -1e-12)
        # full budget is spent
        assert abs(float(np.sum(allocation.powers)) - e[-1]) <= 1e-9
        # battery drains exactly at each breakpoint, never goes negative
        cum_tr = np.cumsum(allocation.powers)
        assert np.all(cum_tr <= e[1:] + 1e-9)
        for b in allocation.breakpoints[1:]:
            assert abs(cum_tr[b - 1] - e[b]) <= 1e-9


def test_optimal_scale_covariance():
    rng = np.random.default_rng(11)
    rates = _random_profile(rng, 10)
    base = allocate_optimal(rates)
    scaled = allocate_optimal(rates * 3.0)
    assert np.allclose(scaled.powers, base.powers * 3.0, rtol=1e-12, atol=1e-12)


def test_sandwich_and_equality_iff_constant():
    report = throughput_report([4.0, 4.0, 4.0])
    assert report.t_lb == report.t_opt == report.t_ub
    rng = np.random.default_rng(13)
    for _ in range(100):
        rates = _random_profile(rng, int(rng.integers(2, 16)))
        report = throughput_report(rates)
        assert report.t_lb <= report.t_opt + 1e-9
        assert report.t_opt <= report.t_ub + 1e-9
        assert report.t_lb + 1e-9 < report.t_ub


@settings(max_examples=80, deadline=None)
@given(rates=profiles)
def test_sandwich_property(rates):
    report = throughput_report(np.asarray(rates))
    assert report.t_lb <= report.t_opt + 1e-9
    assert report.t_opt <= report.t_ub + 1e-9


def test_smoothing_hand_example():
    check = check_smoothing_improvement([1.0, 3.0], 1, 2, [2.0, 2.0])
    assert check.constant == 2.0
    assert check.base_throughput == pytest.approx(0.75)
    assert check.smoothed_throughput == pytest.approx(0.5 * math.log2(3.0))
    assert check.improved


def test_smoothing_preconditions():
    # constant segment: replacement is a no-op
    with pytest.raises(ParameterError):
        check_smoothing_improvement([2.0, 2.0], 1, 2, [2.0, 2.0])
    # replacement would front-load energy that has not arrived yet
    with pytest.raises(ParameterError):
        check_smoothing_improvement([1.0, 3.0], 1, 2, [1.0, 3.0])
    # infeasible base is rejected outright
    with pytest.raises(ParameterError):
        check_smoothing_improvement([3.0, 1.0], 1, 2, [1.0, 3.0])
    # malformed segments
    with pytest.raises(ParameterError):
        check_smoothing_improvement([1.0, 3.0], 2, 2, [2.0, 2.0])
    with pytest.raises(ParameterError):
        check_smoothing_improvement([1.0, 3.0], 0, 2, [2.0, 2.0])
    with pytest.raises(InputDataError):
        check_smoothing_improvement([1.0, 3.0, 1.0], 1, 2, [2.0, 2.0])


def test_feasible_smoothing_always_improves():
    rng = np.random.default_rng(17)
    passed = 0
    for _ in range(200):
        l_slots = int(rng.integers(2, 9))
        rates = _random_profile(rng, l_slots)
        base = rates  # spend-as-it-comes is always feasible
        start = int(rng.integers(1, l_slots))
        end = int(rng.integers(start + 1, l_slots + 1))
        try:
            check = check_smoothing_improvement(base, start, end, rates)
        except ParameterError:
            continue
        passed += 1
        assert check.improved
        assert check.smoothed_throughput > check.base_throughput
    assert passed > 50


def test_optimal_admits_no_feasible_smoothing():
    rng = np.random.default_rng(19)
    for _ in range(50):
        l_slots = int(rng.integers(2, 8))
        rates = _random_profile(rng, l_slots)
        allocation = allocate_optimal(rates)
        for start in range(1, l_slots):
            for end in range(start + 1, l_slots + 1):
                with pytest.raises(ParameterError):
                    check_smoothing_improvement(allocation.powers, start, end, rates)
