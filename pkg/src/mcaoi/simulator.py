"""Monte Carlo ground truth for the sawtooth age process.

Only renewal cycles are simulated: a cycle lasts ``X`` rounds, and the age
ramps from ``T`` to ``T + X G T`` inside it. Every time average is a sum of
polynomials in ``X``, so all statistics reduce to the integer histogram of
cycle counts. Sums over that histogram are exact and do not depend on
summation order, which keeps results identical between kernel backends
and across platforms.

Random numbers come from numpy's PCG64 seeded through ``SeedSequence``.
A uniform ``u`` in ``(0, 1]`` maps to the cycle count
``X = 1 + #{k >= 1 : u <= p**k}``, which is the geometric inverse CDF
computed without logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from mcaoi import kernels
from mcaoi.analytic import ScheduleConfig
from mcaoi.errors import EmptyInputError, InvalidConfigError, OutOfDomainError

RNG_ALGORITHM = "numpy-PCG64/SeedSequence;geometric-inverse-cdf-table"
_TINY_U = 2.0**-53  # smallest uniform produced by 1 - Generator.random()
_MAX_TABLE = 5_000_000


@dataclass(frozen=True)
class SimConfig:
    num_rounds: int = 1_000_000
    seed: int = 0
    warmup_rounds: int = 0

    def __post_init__(self):
        if self.num_rounds < 1:
            raise InvalidConfigError(f"num_rounds must be >= 1, got {self.num_rounds}")
        if not 0 <= self.warmup_rounds < self.num_rounds:
            raise InvalidConfigError(
                f"need 0 <= warmup_rounds < num_rounds, got {self.warmup_rounds}"
            )


@dataclass(frozen=True)
class RenewalSample:
    cycles: int
    cycle_duration: float


class RenewalSamples:
    """Cycle counts from one run, stored as an int64 array.

    Iterating yields :class:`RenewalSample` objects. Statistics go through
    the cached histogram, so the raw array is needed only for dumps and
    per-cycle checks.
    """

    def __init__(self, cycles=None, histogram=None):
        if cycles is None and histogram is None:
            raise ValueError("need cycles or a histogram")
        self._cycles = None if cycles is None else np.ascontiguousarray(cycles, dtype=np.int64)
        if self._cycles is not None and self._cycles.size and self._cycles.min() < 1:
            raise ValueError("cycle counts must be >= 1")
        self._hist = None if histogram is None else np.asarray(histogram, dtype=np.int64)
        self._sums = None
        self._profile = None

    @classmethod
    def coerce(cls, samples) -> "RenewalSamples":
        if isinstance(samples, cls):
            return samples
        items = list(samples)
        if items and isinstance(items[0], RenewalSample):
            items = [s.cycles for s in items]
        return cls(np.asarray(items, dtype=np.int64))

    @property
    def cycles(self) -> np.ndarray:
        if self._cycles is None:
            self._cycles = np.repeat(np.arange(1, self._hist.size + 1, dtype=np.int64), self._hist)
        return self._cycles

    @property
    def histogram(self) -> np.ndarray:
        """``histogram[k - 1]`` is the number of cycles lasting ``k`` rounds."""
        if self._hist is None:
            self._hist = kernels.cycle_histogram(self._cycles)
        return self._hist

    def __len__(self):
        return int(self.histogram.sum())

    def __iter__(self):
        for x in self.cycles:
            yield RenewalSample(int(x), math.nan)

    def with_durations(self, sched: ScheduleConfig):
        gt = sched.round_duration
        return [RenewalSample(int(x), int(x) * gt) for x in self.cycles]

    def power_sums(self):
        """Exact ``(count, sum X, sum X^2, sum X^3)`` as Python ints."""
        if self._sums is None:
            self._sums = kernels.power_sums(np.ascontiguousarray(self.histogram))
        return self._sums

    def below_profile(self):
        """Cumulative pieces of ``F(y) = sum_w min(y, X_w G T) / (G T)``.

        On ``[(k-1) G T, k G T]``, ``F(y) = done[k-1] + (y / G T) * alive[k-1]``,
        where ``done`` sums ``X`` over cycles shorter than ``k`` and ``alive``
        counts cycles lasting at least ``k`` rounds. ``ends[k-1]`` is ``F(k G T)``.
        """
        if self._profile is None:
            hist = self.histogram
            ks = np.arange(1, hist.size + 1, dtype=np.int64)
            done = np.concatenate(([0], np.cumsum(hist * ks)[:-1])).astype(np.int64)
            alive = np.cumsum(hist[::-1])[::-1].astype(np.int64)
            self._profile = (done, alive, done + ks * alive)
        return self._profile

    @property
    def max_cycles(self) -> int:
        nz = np.flatnonzero(self.histogram)
        return int(nz[-1]) + 1 if nz.size else 0

    def dump(self, path):
        """Write one cycle count per line."""
        with open(path, "w") as fh:
            fh.write("\n".join(str(int(x)) for x in self.cycles))
            fh.write("\n")

    def __eq__(self, other):
        if not isinstance(other, RenewalSamples):
            return NotImplemented
        return np.array_equal(self.histogram, other.histogram) and np.array_equal(self.cycles, other.cycles)


@dataclass(frozen=True)
class EmpiricalStats:
    time_avg_aoi: float
    time_second_moment: float
    empirical_variance: float
    empirical_bounded_aoi: float
    fraction_below: float
    total_time: float
    num_cycles: int = 0
    meta: dict = field(default_factory=dict, compare=False)


def survival_table(p: float, floor: float = _TINY_U) -> np.ndarray:
    """Descending table ``p**k``, ``k = 1..kmax``, ending below ``floor``.

    ``floor`` must not exceed the smallest uniform the table is applied to.
    """
    if not 0.0 <= p < 1.0:
        raise OutOfDomainError(f"error rate must satisfy 0 <= p < 1, got {p}")
    if p == 0.0:
        return np.zeros(1)
    kmax = math.ceil(math.log(floor) / math.log(p)) + 2
    if kmax > _MAX_TABLE:
        raise OutOfDomainError(f"p={p} is too close to 1 to simulate")
    table = p ** np.arange(1, kmax + 1, dtype=np.float64)
    return table


def uniform_stream(seed: int, size: int) -> np.ndarray:
    """``size`` uniforms on ``(0, 1]`` from the seeded PCG64 stream."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    return 1.0 - rng.random(size)


def simulate_renewals(p: float, sim: SimConfig) -> RenewalSamples:
    """Draw ``sim.num_rounds`` i.i.d. renewal cycles.

    Each cycle begins right after a success, so there is no transient and
    ``warmup_rounds`` is ignored here; it only matters for
    :func:`simulate_slots`.
    """
    table = survival_table(p)
    u = uniform_stream(sim.seed, sim.num_rounds)
    return RenewalSamples(kernels.cycles_from_uniforms(u, table))


def simulate_slots(p: float, sim: SimConfig, chunk: int = 1 << 20) -> RenewalSamples:
    """Round-by-round Bernoulli simulation; a slower independent cross-check.

    The first ``warmup_rounds`` rounds are discarded and the clock starts at
    the first success after them. Collects ``num_rounds`` complete cycles.
    """
    if not 0.0 <= p < 1.0:
        raise OutOfDomainError(f"error rate must satisfy 0 <= p < 1, got {p}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([sim.seed, 1])))
    q = 1.0 - p
    if sim.warmup_rounds:
        rng.random(sim.warmup_rounds)
    parts = []
    have = 0
    carry = -1
    while have < sim.num_rounds:
        got, carry = kernels.slot_scan(rng.random(chunk), q, carry)
        parts.append(got)
        have += got.size
    return RenewalSamples(np.concatenate(parts)[: sim.num_rounds])


class CommonRandomStream:
    """Sorted uniforms shared by many error rates (common random numbers).

    The histogram for any ``p`` is read straight off the sorted stream. That
    makes it cheap to scan many block lengths, and two ``p`` values always
    see coupled samples. For the same seed the histogram matches
    ``simulate_renewals`` exactly.
    """

    def __init__(self, seed: int, num_cycles: int):
        self.seed = seed
        self.num_cycles = num_cycles
        self.sorted_u = np.sort(uniform_stream(seed, num_cycles))

    def samples(self, p: float) -> RenewalSamples:
        hist = kernels.histogram_from_sorted(self.sorted_u, survival_table(p, self.sorted_u[0]))
        nz = np.flatnonzero(hist)
        return RenewalSamples(histogram=hist[: nz[-1] + 1] if nz.size else hist[:0])


def _require(samples) -> RenewalSamples:
    samples = RenewalSamples.coerce(samples)
    if len(samples) == 0:
        raise EmptyInputError("no renewal samples")
    return samples


def time_average_aoi(samples, sched: ScheduleConfig) -> float:
    """Exact time average of the sawtooth over the sampled cycles."""
    n, s1, s2, _ = _require(samples).power_sums()
    t, gt = sched.slot_duration, sched.round_duration
    # per cycle: X G T * T + (X G T)^2 / 2, over total time G T * sum X
    return t + gt * float(Fraction(s2, 2 * s1))


def time_second_moment(samples, sched: ScheduleConfig) -> float:
    """Exact time average of the squared sawtooth over the sampled cycles."""
    n, s1, s2, s3 = _require(samples).power_sums()
    t, gt = sched.slot_duration, sched.round_duration
    # per cycle: ((T + X G T)^3 - T^3) / 3
    return t * t + t * gt * float(Fraction(s2, s1)) + gt * gt * float(Fraction(s3, 3 * s1))


def fraction_below(samples, sched: ScheduleConfig, threshold: float) -> float:
    """Exact fraction of time the age is at most ``threshold``."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    samples = _require(samples)
    return _fraction_below(samples, sched, threshold)


def _fraction_below(samples, sched, threshold):
    t, gt = sched.slot_duration, sched.round_duration
    y = threshold - t
    if y <= 0:
        return 0.0
    done, alive, _ = samples.below_profile()
    k = int(y // gt) + 1  # y lies in [(k-1) G T, k G T)
    if k > done.size:
        return 1.0
    _, s1, _, _ = samples.power_sums()
    covered = int(done[k - 1]) + y / gt * int(alive[k - 1])
    return min(covered / s1, 1.0)


def empirical_bounded_aoi(samples, sched: ScheduleConfig, epsilon: float) -> float:
    """Smallest threshold the age stays under for at least ``epsilon`` of the time."""
    if not 0.0 < epsilon < 1.0:
        raise InvalidConfigError(f"epsilon must lie in (0, 1), got {epsilon}")
    samples = _require(samples)
    _, s1, _, _ = samples.power_sums()
    t, gt = sched.slot_duration, sched.round_duration
    done, alive, ends = samples.below_profile()
    target = Fraction(epsilon) * s1
    # locate the first piece whose end reaches the target, then settle it exactly
    k = int(np.searchsorted(ends, float(target), side="left")) + 1
    k = min(max(k, 1), ends.size)
    while k > 1 and int(ends[k - 2]) >= target:
        k -= 1
    while int(ends[k - 1]) < target:
        k += 1
    y = float((target - int(done[k - 1])) / int(alive[k - 1]) * Fraction(gt))
    value = t + y
    # the float solve can land an ulp off the target; settle on the smallest feasible float
    while _fraction_below(samples, sched, value) < epsilon:
        value = math.nextafter(value, math.inf)
    while _fraction_below(samples, sched, math.nextafter(value, 0.0)) >= epsilon:
        value = math.nextafter(value, 0.0)
    return value


def empirical_stats(samples, sched: ScheduleConfig, meta=None) -> EmpiricalStats:
    samples = _require(samples)
    avg = time_average_aoi(samples, sched)
    sm = time_second_moment(samples, sched)
    bounded = empirical_bounded_aoi(samples, sched, sched.epsilon)
    n, s1, _, _ = samples.power_sums()
    return EmpiricalStats(
        time_avg_aoi=avg,
        time_second_moment=sm,
        empirical_variance=_variance(samples, sched),
        empirical_bounded_aoi=bounded,
        fraction_below=fraction_below(samples, sched, bounded),
        total_time=sched.round_duration * s1,
        num_cycles=n,
        meta=dict(meta or {}),
    )


def _variance(samples, sched):
    # exact rational evaluation avoids cancellation between E[D^2] and E[D]^2
    _, s1, s2, s3 = samples.power_sums()
    t = Fraction(sched.slot_duration)
    gt = Fraction(sched.round_duration)
    mean = t + gt * Fraction(s2, 2 * s1)
    second = t * t + t * gt * Fraction(s2, s1) + gt * gt * Fraction(s3, 3 * s1)
    return float(second - mean * mean)


def discretized_reference(samples, sched: ScheduleConfig, steps_per_slot: int = 1000):
    """Brute-force midpoint-rule ``(mean, second moment)`` with step ``T / steps_per_slot``.

    The midpoint rule is exact for the linear ramp and off by ``dt**2 / 12``
    for its square, which bounds the expected gap to the exact integrals.
    """
    samples = _require(samples)
    return kernels.discretized_moments(
        samples.cycles, sched.slot_duration, sched.round_duration, steps_per_slot
    )
