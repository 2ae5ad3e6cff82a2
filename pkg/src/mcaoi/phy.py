"""Per-subchannel SNR and finite-blocklength packet error rate.

The error-rate expression is the normal approximation for a real AWGN
channel, with the ``1/2 log2(1+snr)`` capacity and ``1/(2L)`` dispersion
scaling. Use it as is. Swapping in the complex-channel constants moves every
crossover power by several dB.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from mcaoi.errors import InvalidConfigError

LOG2_E = math.log2(math.e)
# below this SNR the dispersion term is numerically zero; report certain loss
DEGENERATE_SNR = 1e-12
_CLAMP_SLACK = 1e-12


@dataclass(frozen=True)
class ChannelConfig:
    bandwidth_total: float = 1.0
    noise_power_fullband: float = 1.0
    received_power_db: float = 0.0

    def __post_init__(self):
        if not self.bandwidth_total > 0:
            raise InvalidConfigError(f"bandwidth_total must be > 0, got {self.bandwidth_total}")
        if not self.noise_power_fullband > 0:
            raise InvalidConfigError(
                f"noise_power_fullband must be > 0, got {self.noise_power_fullband}"
            )
        if not math.isfinite(self.received_power_db):
            raise InvalidConfigError(f"received_power_db must be finite, got {self.received_power_db}")

    @property
    def received_power_linear(self) -> float:
        return 10.0 ** (self.received_power_db / 10.0)


@dataclass(frozen=True)
class CodeConfig:
    info_bits: int = 100
    block_len: int = 100

    def __post_init__(self):
        if not 0 < self.info_bits <= self.block_len:
            raise InvalidConfigError(
                f"need 0 < info_bits <= block_len, got K={self.info_bits}, L={self.block_len}"
            )

    @property
    def rate(self) -> float:
        return self.info_bits / self.block_len


@dataclass(frozen=True)
class LinkBudget:
    num_subchannels: int
    effective_snr_linear: float
    per: float
    degenerate: bool = False


def effective_snr(cfg: ChannelConfig, num_subchannels: int) -> float:
    """SNR seen by one device when the band is split into ``num_subchannels``.

    Noise spectral density is flat, so a device on ``B/M`` of the band sees
    ``1/M`` of the noise while keeping its full received power.
    """
    if num_subchannels < 1:
        raise InvalidConfigError(f"num_subchannels must be >= 1, got {num_subchannels}")
    return (
        num_subchannels
        * cfg.received_power_linear
        * cfg.bandwidth_total
        / cfg.noise_power_fullband
    )


def q_function(x):
    """Gaussian upper-tail probability ``P(Z > x)``; accepts scalars or arrays."""
    out = 0.5 * erfc(np.asarray(x, dtype=np.float64) / math.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out


def _per_array(snr, info_bits, block_len):
    snr = np.asarray(snr, dtype=np.float64)
    block_len = np.asarray(block_len, dtype=np.float64)
    degenerate = snr <= DEGENERATE_SNR
    with np.errstate(divide="ignore", invalid="ignore"):
        safe = np.where(degenerate, 1.0, snr)
        num = 0.5 * np.log2(1.0 + safe) - info_bits / block_len
        den = LOG2_E * np.sqrt((1.0 - (1.0 + safe) ** -2) / (2.0 * block_len))
        raw = 0.5 * erfc(num / den / math.sqrt(2.0))
    excursion = np.maximum(raw - 1.0, -raw)
    assert np.all(excursion < _CLAMP_SLACK), "error rate escaped [0, 1]"
    p = np.clip(raw, 0.0, 1.0)
    return np.where(degenerate, 1.0, p), degenerate


def packet_error_rate(snr, code: CodeConfig | None = None, *, info_bits=None, block_len=None):
    """Finite-blocklength packet error rate at linear SNR ``snr``.

    Either pass a :class:`CodeConfig` or ``info_bits``/``block_len`` directly;
    the keyword form broadcasts over arrays of block lengths. SNRs at or below
    ``DEGENERATE_SNR`` return 1.
    """
    if code is not None:
        info_bits, block_len = code.info_bits, code.block_len
    if info_bits is None or block_len is None:
        raise InvalidConfigError("packet_error_rate needs a CodeConfig or info_bits and block_len")
    if np.any(np.asarray(snr) < 0):
        raise InvalidConfigError("snr must be non-negative")
    p, _ = _per_array(snr, info_bits, block_len)
    return float(p) if np.ndim(p) == 0 else p


def link_budget(cfg: ChannelConfig, num_subchannels: int, code: CodeConfig) -> LinkBudget:
    snr = effective_snr(cfg, num_subchannels)
    p, degenerate = _per_array(snr, code.info_bits, code.block_len)
    return LinkBudget(num_subchannels, snr, float(p), bool(degenerate))
