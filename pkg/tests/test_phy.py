import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcaoi.errors import InvalidConfigError
from mcaoi.phy import (
    ChannelConfig,
    CodeConfig,
    effective_snr,
    link_budget,
    packet_error_rate,
    q_function,
)


def test_effective_snr_examples():
    assert effective_snr(ChannelConfig(1.0, 1.0, 0.0), 1) == 1.0
    assert effective_snr(ChannelConfig(1.0, 1.0, 0.0), 20) == 20.0
    # 4 * 10**0.3 evaluated with 50-digit arithmetic
    assert effective_snr(ChannelConfig(1.0, 1.0, 3.0), 4) == pytest.approx(7.9810492598755184, rel=1e-15)


def test_effective_snr_scales_with_bandwidth_and_noise():
    assert effective_snr(ChannelConfig(2.0, 4.0, 0.0), 3) == pytest.approx(1.5)


@pytest.mark.parametrize("power_db", [-5.0, 0.0, 3.0, 8.0])
def test_effective_snr_strictly_increasing_in_m(power_db):
    cfg = ChannelConfig(1.0, 1.0, power_db)
    values = [effective_snr(cfg, m) for m in range(1, 41)]
    assert all(b > a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize(
    "kwargs",
    [dict(bandwidth_total=0.0), dict(noise_power_fullband=-1.0), dict(received_power_db=math.inf),
     dict(received_power_db=math.nan)],
)
def test_channel_config_rejects_bad_fields(kwargs):
    with pytest.raises(InvalidConfigError):
        ChannelConfig(**kwargs)


def test_subchannel_count_must_be_positive():
    with pytest.raises(InvalidConfigError):
        effective_snr(ChannelConfig(), 0)


def test_code_config_rate_bound():
    with pytest.raises(InvalidConfigError):
        CodeConfig(info_bits=101, block_len=100)
    with pytest.raises(InvalidConfigError):
        CodeConfig(info_bits=0, block_len=100)
    assert CodeConfig(100, 200).rate == 0.5


def test_q_function_examples():
    assert q_function(0.0) == 0.5
    assert q_function(10.0) < 1e-20
    # Gaussian tail integrated numerically (scipy quad): 0.0499952174683463
    assert q_function(1.6449) == pytest.approx(0.05, abs=1e-4)
    assert q_function(1.6449) == pytest.approx(0.0499952174683463, rel=1e-12)


def test_q_function_complementarity():
    xs = np.linspace(-8, 8, 1601)
    assert np.max(np.abs(q_function(xs) + q_function(-xs) - 1.0)) < 1e-12


def test_q_function_relative_accuracy_against_mpmath():
    mpmath.mp.dps = 40
    worst = 0.0
    for x in np.linspace(-8, 8, 321):
        ref = mpmath.erfc(mpmath.mpf(float(x)) / mpmath.sqrt(2)) / 2
        worst = max(worst, abs((q_function(float(x)) - ref) / ref))
    assert worst <= 1e-12


def test_q_function_monotone():
    vals = q_function(np.linspace(-10, 10, 2001))
    assert np.all(np.diff(vals) <= 0)


def test_per_examples():
    # capacity term equals the rate: numerator is zero
    assert packet_error_rate(1.0, CodeConfig(100, 200)) == 0.5
    assert packet_error_rate(1e6, CodeConfig(100, 100)) < 1e-10
    # term-by-term evaluation at 50 digits: 6.7792426294364076e-17
    assert packet_error_rate(2.0, CodeConfig(100, 300)) == pytest.approx(6.7792426294364076e-17, rel=1e-9)


def test_per_array_broadcast_matches_scalar():
    ls = np.arange(100, 401)
    arr = packet_error_rate(3.0, info_bits=100, block_len=ls)
    for l, v in zip(ls[::37], arr[::37]):
        assert packet_error_rate(3.0, CodeConfig(100, int(l))) == pytest.approx(v, rel=1e-14)


def test_per_non_increasing_in_snr():
    snrs = np.geomspace(1e-3, 1e3, 100)
    for l in (100, 150, 250, 400):
        p = [packet_error_rate(float(g), CodeConfig(100, l)) for g in snrs]
        assert all(b <= a for a, b in zip(p, p[1:]))


def test_per_non_increasing_in_block_length_above_capacity():
    snr = 3.0  # half log2(4) = 1 >= K/L for every L >= 100
    p = packet_error_rate(snr, info_bits=100, block_len=np.arange(100, 401))
    assert np.all(np.diff(p) <= 0)


def test_per_degenerate_snr():
    assert packet_error_rate(0.0, CodeConfig(100, 200)) == 1.0
    lb = link_budget(ChannelConfig(received_power_db=-200.0), 1, CodeConfig(100, 200))
    assert lb.per == 1.0 and lb.degenerate
    assert not link_budget(ChannelConfig(), 4, CodeConfig(100, 200)).degenerate


def test_per_rejects_negative_snr():
    with pytest.raises(InvalidConfigError):
        packet_error_rate(-1.0, CodeConfig(100, 200))


def test_link_budget_fdma():
    lb = link_budget(ChannelConfig(received_power_db=0.0), 20, CodeConfig(100, 100))
    assert lb.effective_snr_linear == 20.0
    assert lb.per < 1e-6


def test_subchannels_lower_error_rate():
    code = CodeConfig(100, 200)
    cfg = ChannelConfig(received_power_db=0.0)
    p = [link_budget(cfg, m, code).per for m in (1, 2, 4, 5, 10, 20)]
    assert all(b < a for a, b in zip(p, p[1:]))


@given(st.floats(1e-9, 1e9), st.integers(1, 400), st.integers(0, 400))
def test_per_is_a_probability(snr, k, extra):
    p = packet_error_rate(snr, info_bits=k, block_len=k + extra)
    assert 0.0 <= p <= 1.0
