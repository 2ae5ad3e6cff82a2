import os
import subprocess
import sys

import numpy as np
import pytest

from mcaoi import _fallback, kernels
from mcaoi.simulator import survival_table, uniform_stream


def test_backend_is_reported():
    assert kernels.BACKEND in kernels.implementations()


def test_cycles_match_reference(impl):
    u = uniform_stream(3, 20_000)
    thr = survival_table(0.7)
    ref = np.array([1 + sum(1 for t in thr if uu <= t) for uu in u[:500]])
    assert np.array_equal(impl.cycles_from_uniforms(u[:500], thr), ref)
    assert np.array_equal(impl.cycles_from_uniforms(u, thr), _fallback.cycles_from_uniforms(u, thr))


def test_histogram_from_sorted_matches_direct_count(impl):
    u = uniform_stream(5, 50_000)
    thr = survival_table(0.55, u.min())
    hist = impl.histogram_from_sorted(np.sort(u), thr)
    direct = np.bincount(_fallback.cycles_from_uniforms(u, thr) - 1, minlength=hist.size)
    assert np.array_equal(hist, direct[: hist.size])
    assert hist.sum() == u.size


def test_cycle_histogram(impl):
    cycles = np.array([1, 3, 3, 2, 7, 1], dtype=np.int64)
    assert impl.cycle_histogram(cycles).tolist() == [2, 1, 2, 0, 0, 0, 1]


@pytest.mark.parametrize("chunks", [1, 3, 17])
def test_slot_scan_is_chunk_invariant(impl, chunks):
    u = uniform_stream(11, 10_000)
    whole, carry_whole = impl.slot_scan(u, 0.3, -1)
    parts, carry = [], -1
    for piece in np.array_split(u, chunks):
        got, carry = impl.slot_scan(np.ascontiguousarray(piece), 0.3, carry)
        parts.append(got)
    assert np.array_equal(np.concatenate(parts), whole)
    assert carry == carry_whole


def test_slot_scan_semantics(impl):
    u = np.array([0.9, 0.1, 0.9, 0.9, 0.1, 0.1, 0.9])
    cycles, carry = impl.slot_scan(u, 0.5, -1)
    assert cycles.tolist() == [3, 1]
    assert carry == 1
    cycles, carry = impl.slot_scan(u, 0.5, 2)
    assert cycles.tolist() == [4, 3, 1]


def test_power_sums_exact(impl):
    hist = np.array([5, 0, 2, 1], dtype=np.int64)
    assert impl.power_sums(hist) == (8, 15, 39, 123)


def test_power_sums_beyond_int64(impl):
    # 10**12 cycles of length 10**5 has a cube sum near 10**27
    hist = np.zeros(100_000, dtype=np.int64)
    hist[-1] = 10**12
    hist[0] = 3
    k = 100_000
    assert impl.power_sums(hist) == (10**12 + 3, 10**12 * k + 3, 10**12 * k**2 + 3, 10**12 * k**3 + 3)


def test_discretized_moments_agree(impl):
    cycles = np.array([1, 2, 5, 1, 3], dtype=np.int64)
    a = impl.discretized_moments(cycles, 100.0, 2000.0, 50)
    b = _fallback.discretized_moments(cycles, 100.0, 2000.0, 50)
    assert a == pytest.approx(b, rel=1e-13)


def test_fraction_below_direct_agrees(impl):
    cycles = uniform_stream(1, 1000)
    cycles = (1 + (cycles * 10).astype(np.int64))
    a = impl.fraction_below_direct(cycles, 100.0, 2000.0, 5300.0)
    b = _fallback.fraction_below_direct(cycles, 100.0, 2000.0, 5300.0)
    assert a == pytest.approx(b, rel=1e-14)


def _simulate_csv(tmp_path, name, pure):
    env = dict(os.environ)
    env["MCAOI_PURE_PYTHON"] = "1" if pure else "0"
    out = tmp_path / name
    subprocess.run(
        [sys.executable, "-m", "mcaoi", "simulate", "--p", "0.4", "--m", "4", "--l", "150",
         "--num-rounds", "50000", "--seed", "9", "-o", str(out)],
        check=True, env=env, capture_output=True,
    )
    return out.read_text()


@pytest.mark.skipif("cython" not in kernels.implementations(), reason="extension not built")
def test_backends_give_identical_results(tmp_path):
    a = _simulate_csv(tmp_path, "c.csv", pure=False)
    b = _simulate_csv(tmp_path, "p.csv", pure=True)
    # only the recorded kernel backend may differ
    assert a.replace("cython", "python") == b
