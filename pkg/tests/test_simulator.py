import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcaoi import kernels
from mcaoi.analytic import ScheduleConfig, average_aoi, chebyshev_bound, second_moment
from mcaoi.errors import EmptyInputError, InvalidConfigError, OutOfDomainError
from mcaoi.simulator import (
    CommonRandomStream,
    RenewalSample,
    RenewalSamples,
    SimConfig,
    discretized_reference,
    empirical_bounded_aoi,
    empirical_stats,
    fraction_below,
    simulate_renewals,
    simulate_slots,
    survival_table,
    time_average_aoi,
    time_second_moment,
)


def sched(m=1, l=100, n=20, eps=0.99, b=1.0):
    return ScheduleConfig(num_devices=n, num_subchannels=m, block_len=l, bandwidth_total=b, epsilon=eps)


@pytest.fixture(scope="module")
def half():
    return simulate_renewals(0.5, SimConfig(num_rounds=1_000_000, seed=4))


def test_certain_success():
    s = simulate_renewals(0.0, SimConfig(num_rounds=1000, seed=123))
    assert np.all(s.cycles == 1)
    assert all(x.cycles == 1 for x in s)


def test_cycle_mean(half):
    assert half.cycles.mean() == pytest.approx(2.0, abs=0.01)


def test_determinism():
    cfg = SimConfig(num_rounds=10_000, seed=77)
    assert simulate_renewals(0.3, cfg) == simulate_renewals(0.3, cfg)
    assert simulate_slots(0.3, cfg) == simulate_slots(0.3, cfg)
    assert simulate_renewals(0.3, cfg) != simulate_renewals(0.3, SimConfig(num_rounds=10_000, seed=78))


def test_sim_config_validation():
    with pytest.raises(InvalidConfigError):
        SimConfig(num_rounds=0)
    with pytest.raises(InvalidConfigError):
        SimConfig(num_rounds=10, warmup_rounds=10)


def test_out_of_domain_probability():
    with pytest.raises(OutOfDomainError):
        simulate_renewals(1.0, SimConfig(num_rounds=10))
    with pytest.raises(OutOfDomainError):
        survival_table(-0.5)


def test_slot_mode_matches_renewal_distribution():
    a = simulate_renewals(0.4, SimConfig(num_rounds=400_000, seed=1)).cycles
    b = simulate_slots(0.4, SimConfig(num_rounds=400_000, seed=1, warmup_rounds=100)).cycles
    assert a.size == b.size
    for k in (1, 2, 3, 5):
        assert np.mean(a == k) == pytest.approx(np.mean(b == k), abs=0.005)


def test_common_stream_matches_renewals():
    cfg = SimConfig(num_rounds=100_000, seed=8)
    crn = CommonRandomStream(cfg.seed, cfg.num_rounds)
    for p in (0.0, 0.2, 0.75):
        assert np.array_equal(crn.samples(p).histogram, simulate_renewals(p, cfg).histogram)


def test_time_average_examples(half):
    ones = RenewalSamples(np.ones(50, dtype=np.int64))
    assert time_average_aoi(ones, sched(1)) == 1100.0
    assert time_average_aoi([3], sched(1)) == pytest.approx(3100.0, rel=1e-15)
    assert time_average_aoi(half, sched(4)) == pytest.approx(3400.0, rel=0.005)


def test_time_second_moment_examples():
    assert time_second_moment([1, 1, 1], sched(1)) == pytest.approx(1543333.3333333333, rel=1e-15)
    unit = ScheduleConfig(num_devices=1, num_subchannels=1, block_len=1, bandwidth_total=1.0)
    assert time_second_moment([1], unit) == pytest.approx(7 / 3, rel=1e-15)


def test_time_second_moment_arbitration():
    s = simulate_renewals(0.3, SimConfig(num_rounds=1_000_000, seed=2))
    assert time_second_moment(s, sched(4)) == pytest.approx(second_moment(sched(4), 0.3), rel=0.02)


def test_accepts_sample_records():
    recs = [RenewalSample(2, 4000.0), RenewalSample(1, 2000.0)]
    assert time_average_aoi(recs, sched(1)) == time_average_aoi([2, 1], sched(1))


@pytest.mark.parametrize("fn", [time_average_aoi, time_second_moment])
def test_empty_input(fn):
    with pytest.raises(EmptyInputError):
        fn([], sched(1))


def test_bounded_examples():
    ones = RenewalSamples(np.ones(10, dtype=np.int64))
    assert empirical_bounded_aoi(ones, sched(1), 0.99) == pytest.approx(2080.0, rel=1e-14)
    assert empirical_bounded_aoi(ones, sched(1), 0.5) == pytest.approx(1100.0, rel=1e-14)


def test_bounded_minimality(half):
    s = sched(4)
    v = empirical_bounded_aoi(half, s, 0.99)
    assert fraction_below(half, s, v) >= 0.99
    assert fraction_below(half, s, v * (1 - 1e-6)) < 0.99
    assert fraction_below(half, s, np.nextafter(v, 0)) < 0.99


def test_bounded_rejects_bad_epsilon(half):
    with pytest.raises(InvalidConfigError):
        empirical_bounded_aoi(half, sched(4), 1.0)


def test_fraction_below_examples(half):
    s = sched(4)
    assert fraction_below(half, s, s.slot_duration) == 0.0
    peak = half.max_cycles * s.round_duration
    assert fraction_below(half, s, s.slot_duration + peak) == 1.0
    ones = [1] * 7
    assert fraction_below(ones, sched(1), 100 + 2000 / 4) == pytest.approx(0.25, rel=1e-15)


@pytest.mark.parametrize("threshold", [150.0, 2100.0, 4321.0, 9000.0, 30000.0])
def test_fraction_below_matches_per_cycle_sum(half, threshold):
    s = sched(4)
    direct = kernels.fraction_below_direct(half.cycles, s.slot_duration, s.round_duration, threshold)
    assert fraction_below(half, s, threshold) == pytest.approx(direct, rel=1e-12, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 30), min_size=1, max_size=60), st.floats(0, 80_000), st.floats(0, 80_000))
def test_fraction_below_monotone(cycles, a, b):
    lo, hi = sorted((a, b))
    s = sched(1)
    assert fraction_below(cycles, s, lo) <= fraction_below(cycles, s, hi)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 30), min_size=1, max_size=60), st.floats(0.01, 0.999))
def test_bounded_is_minimal_quantile(cycles, eps):
    s = sched(2, l=150)
    v = empirical_bounded_aoi(cycles, s, eps)
    assert fraction_below(cycles, s, v) >= eps
    assert fraction_below(cycles, s, np.nextafter(v, 0)) < eps


def test_discretized_reference_agrees():
    s = sched(4)
    samples = simulate_renewals(0.5, SimConfig(num_rounds=2000, seed=6))
    steps = 50
    mean, second = discretized_reference(samples, s, steps_per_slot=steps)
    dt = s.slot_duration / steps
    assert mean == pytest.approx(time_average_aoi(samples, s), rel=1e-12)
    assert abs(second - time_second_moment(samples, s)) <= dt * dt / 12 * (1 + 1e-6) + 1e-9 * second


@pytest.mark.parametrize("m,l,p", [(1, 300, 0.2), (4, 100, 0.5), (20, 150, 0.05)])
def test_bound_dominates_empirical(m, l, p):
    s = sched(m, l)
    samples = simulate_renewals(p, SimConfig(num_rounds=200_000, seed=3))
    assert chebyshev_bound(s, p) >= empirical_bounded_aoi(samples, s, 0.99)


def test_empirical_stats_bundle(half):
    st_ = empirical_stats(half, sched(4), meta={"seed": 4})
    assert st_.num_cycles == 1_000_000
    assert st_.fraction_below >= 0.99
    assert st_.total_time == pytest.approx(half.cycles.sum() * 2000.0)
    assert st_.empirical_variance > 0
    assert st_.time_avg_aoi == pytest.approx(average_aoi(sched(4), 0.5), rel=0.005)


def test_huge_power_sums_stay_exact():
    hist = np.zeros(200_000, dtype=np.int64)
    hist[-1] = 5_000_000_000
    s = RenewalSamples(histogram=hist)
    assert s.power_sums()[3] == 5_000_000_000 * 200_000**3


def test_dump_roundtrip(tmp_path):
    s = simulate_renewals(0.6, SimConfig(num_rounds=500, seed=1))
    path = tmp_path / "cycles.txt"
    s.dump(path)
    assert np.array_equal(np.loadtxt(path, dtype=np.int64), s.cycles)
