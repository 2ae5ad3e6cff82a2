"""Closed-form AoI metrics for the cyclic multichannel schedule.

``N`` devices are split into ``G = N/M`` groups. Each group gets one slot
of length ``T = M L / B`` per round. A decoded packet resets a device's
age to ``T``, so over one renewal cycle of ``X`` rounds the age ramps
linearly from ``T`` to ``T + X G T``. Time averages then follow from the
renewal-reward theorem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from mcaoi.errors import EmptyInputError, InvalidConfigError, NegativeRadicandError, OutOfDomainError
from mcaoi.renewal import Backend, Diagnostic, geometric_moments


@dataclass(frozen=True)
class ScheduleConfig:
    num_devices: int = 20
    num_subchannels: int = 1
    block_len: int = 100
    bandwidth_total: float = 1.0
    epsilon: float = 0.99

    def __post_init__(self):
        n, m = self.num_devices, self.num_subchannels
        if n < 1 or m < 1:
            raise InvalidConfigError(f"need N >= 1 and M >= 1, got N={n}, M={m}")
        if n % m:
            raise InvalidConfigError(f"M must divide N exactly, got N={n}, M={m}")
        if self.block_len < 1:
            raise InvalidConfigError(f"block_len must be >= 1, got {self.block_len}")
        if not self.bandwidth_total > 0:
            raise InvalidConfigError(f"bandwidth_total must be > 0, got {self.bandwidth_total}")
        if not 0.0 < self.epsilon < 1.0:
            raise InvalidConfigError(f"epsilon must lie in (0, 1), got {self.epsilon}")

    @property
    def num_groups(self) -> int:
        return self.num_devices // self.num_subchannels

    @property
    def slot_duration(self) -> float:
        return self.num_subchannels * self.block_len / self.bandwidth_total

    @property
    def round_duration(self) -> float:
        return self.num_groups * self.slot_duration

    @property
    def time_unit(self) -> float:
        """``L / B``: duration of one coded bit on the full band."""
        return self.block_len / self.bandwidth_total


@dataclass(frozen=True)
class AoIAnalytic:
    avg_aoi: float
    second_moment: float
    variance: float
    cheb_bound: float
    backend: Backend
    diagnostics: tuple[Diagnostic, ...] = field(default=(), compare=False)


def _check_p(p):
    if not 0.0 <= p < 1.0:
        raise OutOfDomainError(f"average AoI diverges unless 0 <= p < 1, got p={p}")


def average_aoi(sched: ScheduleConfig, p: float) -> float:
    _check_p(p)
    n, m = sched.num_devices, sched.num_subchannels
    return (1.0 + n * (1.0 + p) / (2.0 * m * (1.0 - p))) * sched.slot_duration


def average_aoi_high_snr(sched: ScheduleConfig) -> float:
    return (2 * sched.num_subchannels + sched.num_devices) / 2 * sched.time_unit


def second_moment(sched: ScheduleConfig, p: float, backend=Backend.REDERIVED) -> float:
    """Time average of the squared age."""
    _check_p(p)
    backend = Backend.parse(backend)
    n, m = sched.num_devices, sched.num_subchannels
    if backend is Backend.AS_PRINTED:
        q = 1.0 - p
        poly = (
            n * n * (1 - 8 * p - 11 * p * p + 24 * p**3) / (3 * q * q)
            + m * n * (1 + p) / q
            + m * m
        )
        return sched.time_unit**2 * poly
    mom = geometric_moments(p, Backend.REDERIVED)
    t, gt = sched.slot_duration, sched.round_duration
    return t * t + t * gt * mom.m2 / mom.m1 + gt * gt * mom.m3 / (3.0 * mom.m1)


def aoi_variance(sched: ScheduleConfig, p: float, backend=Backend.REDERIVED) -> float:
    """Second moment minus squared mean; may be negative for the printed backend."""
    avg = average_aoi(sched, p)
    return second_moment(sched, p, backend) - avg * avg


def printed_bound_radicand(sched: ScheduleConfig, p: float) -> float:
    """Polynomial under the square root of the published bounded-AoI formula."""
    n, m = sched.num_devices, sched.num_subchannels
    return (
        2 * n * n
        + 3 * m * n
        - 16 * n * n * p
        - (22 * n * n + 3 * m * n) * p * p
        + 48 * n * n * p**3
    )


def printed_implied_variance(sched: ScheduleConfig, p: float) -> float:
    """Variance the published bounded-AoI formula implicitly uses.

    At ``p = 0`` this is ``(L/B)^2 (2N^2 + 3MN) / 3``, while the mean and
    second moment give ``(G T)^2 / 12``. Kept so the gap can be reported.
    """
    _check_p(p)
    return sched.time_unit**2 * printed_bound_radicand(sched, p) / (3.0 * (1.0 - p) ** 2)


def chebyshev_bound(sched: ScheduleConfig, p: float, backend=Backend.REDERIVED) -> float:
    """Upper bound on the age exceeded at most ``1 - epsilon`` of the time."""
    _check_p(p)
    backend = Backend.parse(backend)
    eps = sched.epsilon
    if backend is Backend.AS_PRINTED:
        poly = printed_bound_radicand(sched, p)
        if poly < 0:
            raise NegativeRadicandError(
                f"printed bound radicand is negative ({poly!r}) at p={p}, "
                f"N={sched.num_devices}, M={sched.num_subchannels}",
                poly,
            )
        n, m = sched.num_devices, sched.num_subchannels
        root = math.sqrt(poly / (3 * (1 - p) ** 2 * (1 - eps)))
        return sched.time_unit * (root + (2 * m + n + (n - 2 * m) * p) / (2 * (1 - p)))
    var = aoi_variance(sched, p, backend)
    if var < 0:
        raise NegativeRadicandError(f"variance is negative ({var!r}) at p={p}", var)
    return math.sqrt(var / (1.0 - eps)) + average_aoi(sched, p)


def chebyshev_bound_high_snr(sched: ScheduleConfig) -> float:
    n, m, eps = sched.num_devices, sched.num_subchannels, sched.epsilon
    return sched.time_unit * (math.sqrt((2 * n * n + 3 * m * n) / (3 * (1 - eps))) + (2 * m + n) / 2)


def network_bound(per_device_bounds) -> float:
    """Network-wide bounded AoI: the worst device's bound."""
    bounds = list(per_device_bounds)
    if not bounds:
        raise EmptyInputError("network_bound needs at least one device bound")
    return max(bounds)


def analyze(sched: ScheduleConfig, p: float, backend=Backend.REDERIVED) -> AoIAnalytic:
    """All closed-form metrics at one operating point.

    A negative variance or radicand does not raise here; the bound comes back
    as NaN with a diagnostic attached.
    """
    backend = Backend.parse(backend)
    avg = average_aoi(sched, p)
    sm = second_moment(sched, p, backend)
    var = sm - avg * avg
    diags = list(geometric_moments(p, backend).diagnostics)
    if var < 0:
        diags.append(Diagnostic("negative_variance", f"second moment minus mean^2 is {var!r}", var))
    try:
        bound = chebyshev_bound(sched, p, backend)
    except NegativeRadicandError as exc:
        diags.append(Diagnostic("negative_radicand", str(exc), exc.value))
        bound = math.nan
    return AoIAnalytic(avg, sm, var, bound, backend, tuple(diags))
