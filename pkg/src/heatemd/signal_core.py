"""Uniformly sampled signals and the synthetic test-signal generators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError

__all__ = [
    "Signal",
    "CosineComponent",
    "synth_cosine_sum",
    "synth_mode_mixing",
    "add_white_noise",
    "count_zero_crossings",
]


@dataclass(frozen=True, eq=False)
class Signal:
    """Real time series sampled every ``1 / sample_rate`` seconds.

    ``samples`` is stored as a read-only float64 copy, so a ``Signal`` can be
    shared freely between threads or processes.
    """

    samples: np.ndarray
    sample_rate: float
    start_time: float = 0.0

    def __post_init__(self):
        data = np.array(self.samples, dtype=np.float64, copy=True).reshape(-1)
        if not np.all(np.isfinite(data)):
            raise DomainError("signal samples must be finite")
        rate = float(self.sample_rate)
        if not (np.isfinite(rate) and rate > 0):
            raise DomainError(f"sample_rate must be positive, got {self.sample_rate!r}")
        data.flags.writeable = False
        object.__setattr__(self, "samples", data)
        object.__setattr__(self, "sample_rate", rate)
        object.__setattr__(self, "start_time", float(self.start_time))

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def duration(self) -> float:
        """Length of the (periodic) window in seconds, ``len / sample_rate``."""
        return len(self) / self.sample_rate

    @property
    def times(self) -> np.ndarray:
        return self.start_time + np.arange(len(self)) / self.sample_rate

    def with_samples(self, samples) -> "Signal":
        """Return a signal on the same time grid carrying new values."""
        samples = np.asarray(samples, dtype=np.float64)
        if samples.shape != self.samples.shape:
            raise DomainError(
                f"expected {self.samples.shape[0]} samples, got {samples.shape}"
            )
        return Signal(samples, self.sample_rate, self.start_time)

    def __add__(self, other: "Signal") -> "Signal":
        _check_compatible(self, other)
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other: "Signal") -> "Signal":
        _check_compatible(self, other)
        return self.with_samples(self.samples - other.samples)

    def __mul__(self, scale: float) -> "Signal":
        return self.with_samples(self.samples * float(scale))

    __rmul__ = __mul__


def _check_compatible(a: Signal, b: Signal) -> None:
    if len(a) != len(b) or a.sample_rate != b.sample_rate:
        raise DomainError("signals differ in length or sample rate")


@dataclass(frozen=True)
class CosineComponent:
    """One term ``amplitude * cos(2 pi frequency t + phase)``."""

    amplitude: float
    frequency: float
    phase: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.amplitude):
            raise DomainError("component amplitude must be finite")
        if not (np.isfinite(self.frequency) and self.frequency > 0):
            raise DomainError(f"component frequency must be > 0, got {self.frequency!r}")


def _sample_count(sample_rate: float, duration: float) -> int:
    if not (sample_rate > 0):
        raise DomainError("sample_rate must be positive")
    if not (duration > 0):
        raise DomainError("duration must be positive")
    n = int(round(duration * sample_rate))
    if n < 1:
        raise DomainError("duration * sample_rate rounds to an empty signal")
    return n


def synth_cosine_sum(
    components: Sequence[CosineComponent],
    offset: float = 0.0,
    sample_rate: float = 1000.0,
    duration: float = 1.0,
) -> Signal:
    """Sample ``sum_k A_k cos(2 pi f_k t + phi_k) + offset`` on ``[0, duration)``.

    Raises
    ------
    DomainError
        If a component is at or above the Nyquist frequency, or the requested
        window holds no samples.
    """
    n = _sample_count(sample_rate, duration)
    for comp in components:
        if not sample_rate > 2.0 * comp.frequency:
            raise DomainError(
                f"component at {comp.frequency} Hz violates Nyquist for fs={sample_rate}"
            )
    t = np.arange(n) / sample_rate
    samples = np.full(n, float(offset))
    for comp in components:
        samples += comp.amplitude * np.cos(2.0 * np.pi * comp.frequency * t + comp.phase)
    return Signal(samples, sample_rate)


def synth_mode_mixing(
    f1: float = 10.0,
    f2: float = 20.0,
    t_switch: float = 0.5,
    sample_rate: float = 1000.0,
    duration: float = 1.0,
) -> Signal:
    """Concatenate ``cos(2 pi f1 t)`` before ``t_switch`` with ``cos(2 pi f2 t)`` after.

    Both pieces keep the global time origin, so the waveform generally jumps
    at ``t_switch``; no phase matching is attempted.
    """
    n = _sample_count(sample_rate, duration)
    if not (0.0 < t_switch < duration):
        raise DomainError(f"t_switch must lie in (0, {duration}), got {t_switch}")
    for f in (f1, f2):
        if not (f > 0 and sample_rate > 2.0 * f):
            raise DomainError(f"frequency {f} Hz is not below Nyquist for fs={sample_rate}")
    t = np.arange(n) / sample_rate
    samples = np.where(
        t < t_switch, np.cos(2.0 * np.pi * f1 * t), np.cos(2.0 * np.pi * f2 * t)
    )
    return Signal(samples, sample_rate)


def add_white_noise(signal: Signal, sigma: float, seed: int) -> Signal:
    """Add i.i.d. N(0, sigma^2) noise drawn from a PCG64 generator seeded with ``seed``.

    PCG64 through ``numpy.random.Generator`` gives the same stream on every
    platform for a given seed and numpy major version.
    """
    if not (sigma >= 0):
        raise DomainError(f"sigma must be >= 0, got {sigma!r}")
    if sigma == 0:
        return signal.with_samples(signal.samples)
    rng = np.random.Generator(np.random.PCG64(seed))
    noise = rng.normal(0.0, sigma, size=len(signal))
    return signal.with_samples(signal.samples + noise)


def count_zero_crossings(samples) -> int:
    """Count sign changes; an exact zero takes the sign of the sample before it.

    Leading zeros take the sign of the first nonzero sample, so they never
    count as a crossing.
    """
    x = np.asarray(samples, dtype=np.float64)
    signs = np.sign(x)
    nz = np.flatnonzero(signs)
    if nz.size < 2:
        return 0
    # forward-fill zeros from the previous nonzero sign
    idx = np.maximum.accumulate(np.where(signs != 0, np.arange(x.size), 0))
    filled = signs[idx][nz[0]:]
    return int(np.count_nonzero(filled[1:] != filled[:-1]))
