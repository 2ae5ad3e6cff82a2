"""Block-length optimization, power sweeps, crossovers and Pareto contours."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from mcaoi import analytic, simulator
from mcaoi.analytic import ScheduleConfig
from mcaoi.errors import (
    AoIError,
    InsufficientDataError,
    InvalidConfigError,
    NegativeRadicandError,
    OutOfDomainError,
)
from mcaoi.phy import ChannelConfig, effective_snr, packet_error_rate
from mcaoi.renewal import Backend

REFERENCE_SUBCHANNELS = (1, 2, 4, 5, 10, 20)
REFERENCE_POWERS_DB = tuple(0.5 * i for i in range(17))


class Metric(str, enum.Enum):
    AVERAGE_AOI = "average_aoi"
    BOUNDED_AOI = "bounded_aoi"

    @classmethod
    def parse(cls, value) -> "Metric":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        return cls({"avg": "average_aoi", "average": "average_aoi", "bounded": "bounded_aoi"}.get(key, key))


class Source(str, enum.Enum):
    ANALYTIC = "analytic"
    SIMULATED = "simulated"

    @classmethod
    def parse(cls, value) -> "Source":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        return cls({"sim": "simulated", "simulation": "simulated"}.get(key, key))


@dataclass(frozen=True)
class SystemConfig:
    """Everything about a scenario except the swept quantities (P, M, L)."""

    num_devices: int = 20
    info_bits: int = 100
    bandwidth_total: float = 1.0
    noise_power_fullband: float = 1.0
    epsilon: float = 0.99
    backend: Backend = Backend.REDERIVED

    def __post_init__(self):
        object.__setattr__(self, "backend", Backend.parse(self.backend))
        if self.num_devices < 1:
            raise InvalidConfigError(f"num_devices must be >= 1, got {self.num_devices}")
        if self.info_bits < 1:
            raise InvalidConfigError(f"info_bits must be >= 1, got {self.info_bits}")
        if not 0.0 < self.epsilon < 1.0:
            raise InvalidConfigError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        ChannelConfig(self.bandwidth_total, self.noise_power_fullband, 0.0)

    def schedule(self, num_subchannels: int, block_len: int) -> ScheduleConfig:
        return ScheduleConfig(
            self.num_devices, num_subchannels, block_len, self.bandwidth_total, self.epsilon
        )

    def channel(self, power_db: float) -> ChannelConfig:
        return ChannelConfig(self.bandwidth_total, self.noise_power_fullband, power_db)

    def error_rate(self, power_db: float, num_subchannels: int, block_len: int) -> tuple[float, float]:
        """``(snr, p)`` for one device at the given operating point."""
        snr = effective_snr(self.channel(power_db), num_subchannels)
        return snr, packet_error_rate(snr, info_bits=self.info_bits, block_len=block_len)


@dataclass(frozen=True)
class SweepGrid:
    power_db_list: tuple = REFERENCE_POWERS_DB
    subchannel_list: tuple = REFERENCE_SUBCHANNELS
    block_len_range: tuple = (100, 400)
    metric: Metric = Metric.AVERAGE_AOI
    source: Source = Source.ANALYTIC

    def __post_init__(self):
        object.__setattr__(self, "power_db_list", tuple(float(p) for p in self.power_db_list))
        object.__setattr__(self, "subchannel_list", tuple(int(m) for m in self.subchannel_list))
        object.__setattr__(self, "block_len_range", tuple(int(v) for v in self.block_len_range))
        object.__setattr__(self, "metric", Metric.parse(self.metric))
        object.__setattr__(self, "source", Source.parse(self.source))
        lo, hi = self.block_len_range
        if lo > hi:
            raise InvalidConfigError(f"block_len_range is empty: {self.block_len_range}")

    def validate(self, system: SystemConfig):
        """Return ``(field, message)`` pairs for every invariant this grid breaks."""
        issues = []
        for m in self.subchannel_list:
            if m < 1 or system.num_devices % m:
                issues.append(("grid.subchannel_list", f"M={m} must divide N={system.num_devices}"))
        if self.block_len_range[0] < system.info_bits:
            issues.append(
                ("grid.block_len_range", f"lower bound {self.block_len_range[0]} < info_bits {system.info_bits}")
            )
        if not self.power_db_list:
            issues.append(("grid.power_db_list", "must not be empty"))
        if not self.subchannel_list:
            issues.append(("grid.subchannel_list", "must not be empty"))
        return issues


@dataclass(frozen=True)
class SweepRecord:
    power_db: float
    num_subchannels: int
    block_len_opt: int
    gamma: float
    per: float
    avg_aoi: float
    bounded_aoi: float
    backend: Backend
    source: Source
    seed: int | None = None
    error: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ParetoPoint:
    avg_aoi: float
    bounded_aoi: float
    num_subchannels: int
    power_db: float = math.nan
    block_len_avg: int = 0
    block_len_bounded: int = 0


class Evaluator:
    """Metric evaluation at ``(P, M, L)`` from either the closed forms or the simulator.

    Simulated metrics share one sorted uniform stream for every operating
    point, so a scan over ``L`` or a bisection over ``P`` runs on a
    deterministic, smooth-in-expectation objective.
    """

    def __init__(self, system: SystemConfig, source=Source.ANALYTIC, backend=None,
                 sim: simulator.SimConfig | None = None):
        self.system = system
        self.source = Source.parse(source)
        self.backend = Backend.parse(backend if backend is not None else system.backend)
        self.sim = sim or simulator.SimConfig()
        self._stream = None

    @property
    def seed(self):
        return self.sim.seed if self.source is Source.SIMULATED else None

    @property
    def stream(self) -> simulator.CommonRandomStream:
        if self._stream is None:
            self._stream = simulator.CommonRandomStream(self.sim.seed, self.sim.num_rounds)
        return self._stream

    def both(self, power_db, num_subchannels, block_len):
        """``(snr, p, avg_aoi, bounded_aoi)``; an infeasible bound comes back as ``inf``."""
        sched = self.system.schedule(num_subchannels, block_len)
        snr, p = self.system.error_rate(power_db, num_subchannels, block_len)
        if p >= 1.0:
            return snr, p, math.inf, math.inf
        if self.source is Source.SIMULATED:
            try:
                samples = self.stream.samples(p)
            except OutOfDomainError:
                return snr, p, math.inf, math.inf
            return (
                snr,
                p,
                simulator.time_average_aoi(samples, sched),
                simulator.empirical_bounded_aoi(samples, sched, sched.epsilon),
            )
        avg = analytic.average_aoi(sched, p)
        try:
            bound = analytic.chebyshev_bound(sched, p, self.backend)
        except NegativeRadicandError:
            bound = math.inf
        return snr, p, avg, bound

    def metric(self, power_db, num_subchannels, block_len, metric) -> float:
        metric = Metric.parse(metric)
        sched = self.system.schedule(num_subchannels, block_len)
        _, p = self.system.error_rate(power_db, num_subchannels, block_len)
        if p >= 1.0:
            return math.inf
        if self.source is Source.SIMULATED:
            try:
                samples = self.stream.samples(p)
            except OutOfDomainError:  # cycles too long to tabulate; never a minimizer
                return math.inf
            if metric is Metric.AVERAGE_AOI:
                return simulator.time_average_aoi(samples, sched)
            return simulator.empirical_bounded_aoi(samples, sched, sched.epsilon)
        if metric is Metric.AVERAGE_AOI:
            return analytic.average_aoi(sched, p)
        try:
            return analytic.chebyshev_bound(sched, p, self.backend)
        except NegativeRadicandError:
            return math.inf

    def optimize(self, power_db, num_subchannels, metric, block_len_range=(100, 400)):
        lo, hi = block_len_range
        if lo > hi:
            raise InvalidConfigError(f"block_len_range is empty: {block_len_range}")
        best_l, best_v = lo, math.inf
        for block_len in range(lo, hi + 1):
            v = self.metric(power_db, num_subchannels, block_len, metric)
            if v < best_v:  # strict: ties keep the smaller L
                best_l, best_v = block_len, v
        return best_l, best_v


def optimize_block_length(system: SystemConfig, power_db: float, num_subchannels: int, metric,
                          block_len_range=(100, 400), *, source=Source.ANALYTIC, backend=None,
                          sim=None, evaluator: Evaluator | None = None):
    """Exhaustive search for the block length minimizing ``metric``.

    Returns ``(L*, value)``. When every L is infeasible (certain loss, or a
    negative printed radicand) the value is ``inf`` and ``L*`` is the lower end.
    """
    if system.num_devices % num_subchannels:
        raise InvalidConfigError(f"M={num_subchannels} must divide N={system.num_devices}")
    ev = evaluator or Evaluator(system, source, backend, sim)
    return ev.optimize(power_db, num_subchannels, metric, block_len_range)


def run_sweep(system: SystemConfig, grid: SweepGrid, *, backend=None, sim=None) -> list[SweepRecord]:
    """One record per ``(P, M)``, P-major, with L optimized for ``grid.metric``."""
    issues = grid.validate(system)
    if issues:
        raise InvalidConfigError("; ".join(f"{k}: {v}" for k, v in issues))
    ev = Evaluator(system, grid.source, backend, sim)
    records = []
    for power_db in grid.power_db_list:
        for m in grid.subchannel_list:
            try:
                l_opt, _ = ev.optimize(power_db, m, grid.metric, grid.block_len_range)
                snr, p, avg, bound = ev.both(power_db, m, l_opt)
                error = None
                if math.isinf(bound) or math.isinf(avg):
                    error = "infeasible: no block length gives a finite metric"
                    bound = math.nan if math.isinf(bound) else bound
                    avg = math.nan if math.isinf(avg) else avg
            except AoIError as exc:
                l_opt, snr, p, avg, bound = grid.block_len_range[0], math.nan, math.nan, math.nan, math.nan
                error = f"{type(exc).__name__}: {exc}"
            records.append(
                SweepRecord(power_db, m, l_opt, snr, p, avg, bound, ev.backend, ev.source, ev.seed, error)
            )
    return records


def find_crossover(records, m_a: int, m_b: int, metric, system: SystemConfig,
                   block_len_range=(100, 400), *, source=None, backend=None, sim=None,
                   resolution_db: float = 0.01):
    """Power where ``metric(M_a) - metric(M_b)`` changes sign, or ``None``.

    The record powers only bracket the search. Every probe, including the
    grid powers themselves, re-runs the block-length optimization, and the
    bracket is then bisected down to ``resolution_db``.
    """
    metric = Metric.parse(metric)
    if m_a == m_b:
        return None
    records = list(records)
    powers_a = {r.power_db for r in records if r.num_subchannels == m_a}
    powers_b = {r.power_db for r in records if r.num_subchannels == m_b}
    powers = sorted(powers_a & powers_b)
    if len(powers) < 2:
        raise InsufficientDataError(f"need >= 2 common powers for M={m_a} and M={m_b}, got {len(powers)}")
    if source is None:
        source = records[0].source
    ev = Evaluator(system, source, backend if backend is not None else records[0].backend, sim)

    def gap(power_db):
        a = ev.optimize(power_db, m_a, metric, block_len_range)[1]
        b = ev.optimize(power_db, m_b, metric, block_len_range)[1]
        return a - b

    prev_p, prev_g = powers[0], gap(powers[0])
    if prev_g == 0:
        return prev_p
    for power_db in powers[1:]:
        g = gap(power_db)
        if g == 0:
            return power_db
        if (g > 0) != (prev_g > 0) and math.isfinite(g) and math.isfinite(prev_g):
            lo, hi, g_lo = prev_p, power_db, prev_g
            while hi - lo > resolution_db:
                mid = 0.5 * (lo + hi)
                g_mid = gap(mid)
                if g_mid == 0:
                    return mid
                if (g_mid > 0) == (g_lo > 0):
                    lo, g_lo = mid, g_mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)
        prev_p, prev_g = power_db, g
    return None


def pareto_contour(system: SystemConfig, power_db: float, subchannel_list=REFERENCE_SUBCHANNELS,
                   block_len_range=(100, 400), *, source=Source.ANALYTIC, backend=None, sim=None,
                   shared_block_len=None) -> list[ParetoPoint]:
    """Average-vs-bounded AoI points for one power, ordered by M.

    By default each coordinate uses its own optimal block length. Passing
    ``shared_block_len=Metric.X`` instead optimizes L once for metric X and
    reports both coordinates at that L.
    """
    ms = sorted(int(m) for m in subchannel_list)
    if not ms:
        raise InvalidConfigError("subchannel_list must not be empty")
    for m in ms:
        if m < 1 or system.num_devices % m:
            raise InvalidConfigError(f"M={m} must divide N={system.num_devices}")
    ev = Evaluator(system, source, backend, sim)
    points = []
    for m in ms:
        if shared_block_len is not None:
            l_shared, _ = ev.optimize(power_db, m, shared_block_len, block_len_range)
            _, _, avg, bound = ev.both(power_db, m, l_shared)
            points.append(ParetoPoint(avg, bound, m, power_db, l_shared, l_shared))
            continue
        l_avg, avg = ev.optimize(power_db, m, Metric.AVERAGE_AOI, block_len_range)
        l_bnd, bound = ev.optimize(power_db, m, Metric.BOUNDED_AOI, block_len_range)
        points.append(ParetoPoint(avg, bound, m, power_db, l_avg, l_bnd))
    return points


def best_subchannels(points) -> tuple[int, int]:
    """``(M minimizing average AoI, M minimizing bounded AoI)`` over a contour."""
    points = list(points)
    if not points:
        raise InsufficientDataError("empty contour")
    best_avg = min(points, key=lambda pt: (pt.avg_aoi, pt.num_subchannels))
    best_bnd = min(points, key=lambda pt: (pt.bounded_aoi, pt.num_subchannels))
    return best_avg.num_subchannels, best_bnd.num_subchannels


def non_dominated(points) -> list[ParetoPoint]:
    """Contour points not beaten on both axes by another point."""
    points = list(points)
    keep = []
    for pt in points:
        beaten = any(
            o.avg_aoi <= pt.avg_aoi and o.bounded_aoi <= pt.bounded_aoi
            and (o.avg_aoi < pt.avg_aoi or o.bounded_aoi < pt.bounded_aoi)
            for o in points
        )
        if not beaten:
            keep.append(pt)
    return keep


def with_backend(system: SystemConfig, backend) -> SystemConfig:
    return replace(system, backend=Backend.parse(backend))
