"""Pure numpy twins of the compiled kernels in ``_kernels.pyx``."""

import math

import numpy as np


def cycles_from_uniforms(u, thresholds):
    # thresholds is descending; count entries >= u via the negated ascending table
    neg = -np.asarray(thresholds, dtype=np.float64)
    return 1 + np.searchsorted(neg, -np.asarray(u, dtype=np.float64), side="right").astype(np.int64)


def histogram_from_sorted(u_sorted, thresholds):
    """Cycle-count histogram (index k-1 holds #X==k) read off sorted uniforms."""
    u_sorted = np.asarray(u_sorted, dtype=np.float64)
    ge = np.empty(len(thresholds) + 1, dtype=np.int64)
    ge[0] = u_sorted.size
    ge[1:] = np.searchsorted(u_sorted, thresholds, side="right")
    return ge[:-1] - ge[1:]


def cycle_histogram(cycles):
    cycles = np.asarray(cycles, dtype=np.int64)
    if cycles.size == 0:
        return np.zeros(0, dtype=np.int64)
    return np.bincount(cycles - 1).astype(np.int64)


def slot_scan(u, success_prob, carry):
    u = np.asarray(u, dtype=np.float64)
    hits = np.flatnonzero(u < success_prob)
    if hits.size == 0:
        return np.zeros(0, dtype=np.int64), (carry + u.size if carry >= 0 else -1)
    gaps = np.diff(hits)
    if carry >= 0:
        gaps = np.concatenate(([carry + hits[0] + 1], gaps))
    return gaps.astype(np.int64), int(u.size - 1 - hits[-1])


def power_sums(hist):
    """Exact ``(sum c, sum c k, sum c k^2, sum c k^3)`` for ``hist[k-1] = c``."""
    hist = np.asarray(hist, dtype=np.int64)
    k = np.arange(1, hist.size + 1, dtype=np.int64)
    n = int(hist.sum())
    if float(hist.size) ** 3 * max(n, 1) < 2.0**62:
        return n, int(hist @ k), int(hist @ (k * k)), int(hist @ (k * k * k))
    # int64 would overflow; Python integers are exact
    s = [0, 0, 0, 0]
    for kk, c in zip(range(1, hist.size + 1), hist.tolist()):
        if c:
            s[0] += c
            s[1] += c * kk
            s[2] += c * kk * kk
            s[3] += c * kk * kk * kk
    return tuple(s)


def discretized_moments(cycles, slot, round_len, steps_per_slot):
    """Midpoint-rule time averages of the sawtooth and its square."""
    dt = slot / steps_per_slot
    per_round = int(round(round_len / slot * steps_per_slot))
    s1 = []
    s2 = []
    total = 0.0
    # identical cycle lengths share one ramp
    for x, count in zip(*np.unique(np.asarray(cycles, dtype=np.int64), return_counts=True)):
        nsteps = int(x) * per_round
        a = slot + (np.arange(nsteps) + 0.5) * dt
        s1.append(math.fsum(a * dt) * int(count))
        s2.append(math.fsum(a * a * dt) * int(count))
        total += nsteps * dt * int(count)
    return math.fsum(s1) / total, math.fsum(s2) / total


def fraction_below_direct(cycles, slot, round_len, threshold):
    d = np.asarray(cycles, dtype=np.float64) * round_len
    head = max(threshold - slot, 0.0)
    return math.fsum(np.minimum(head, d)) / math.fsum(d)
