"""Choosing the diffusivity ``a`` and the sifting budget ``(T, N, delta)``.

Cutoff relation: for tones whose frequency ratio (lower / higher) is ``f``,
``N`` sifting passes with ``a = 1/omega_high^2`` leave the lower tone scaled,
relative to the higher one, by ``[(1 - e^{-f^2 T}) / (1 - e^{-T})]^N``. The
cutoff ratio ``f0`` is where that factor equals ``delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError, EstimationError
from .signal_core import Signal, count_zero_crossings

__all__ = [
    "CutoffSolution",
    "bisect",
    "a_default",
    "a_from_zero_crossings",
    "a_from_autocorrelation",
    "dominant_frequency_zcr",
    "cutoff_ratio_factor",
    "cutoff_frequency",
    "solve_T",
    "cutoff_frequency_closed_form",
    "compare_cutoff_formulas",
    "cutoff_grid",
]

ACF_MIN_CORRELATION = 0.2


@dataclass(frozen=True)
class CutoffSolution:
    f0: float
    T: float
    N: int
    delta: float

    def residual(self) -> float:
        return cutoff_ratio_factor(self.f0, self.T, self.N) - self.delta


def bisect(fn: Callable[[float], float], lo: float, hi: float, xtol: float = 0.0, max_iter: int = 400) -> float:
    """Root of an increasing function on ``[lo, hi]`` by interval halving.

    With ``xtol=0`` the loop runs until the midpoint can no longer be
    separated from an endpoint in floating point.
    """
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo > 0 or f_hi < 0:
        raise DomainError(f"root not bracketed: f({lo})={f_lo}, f({hi})={f_hi}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= xtol:
            break
        if fn(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def a_default(sample_rate: float) -> float:
    """``1 / (4 pi^2 fs^2)``: small enough for every frequency below ``fs``."""
    if not (sample_rate > 0):
        raise DomainError("sample_rate must be positive")
    return 1.0 / (4.0 * math.pi**2 * sample_rate**2)


def dominant_frequency_zcr(signal: Signal) -> float:
    """Dominant frequency in Hz as ``crossings / (2 * duration)``."""
    crossings = count_zero_crossings(signal.samples)
    if crossings < 2:
        raise EstimationError(f"only {crossings} zero crossing(s); cannot estimate frequency")
    return crossings / (2.0 * signal.duration)


def a_from_zero_crossings(signal: Signal) -> float:
    """``a = 1 / omega^2`` with ``omega`` from the zero-crossing rate."""
    omega = 2.0 * math.pi * dominant_frequency_zcr(signal)
    return 1.0 / omega**2


def a_from_autocorrelation(signal: Signal, min_correlation: float = ACF_MIN_CORRELATION) -> float:
    """``a = 1 / omega^2`` with ``omega = 2 pi / tau``, ``tau`` the first autocorrelation peak.

    Uses the biased autocorrelation of the mean-removed signal, normalised to
    1 at lag 0. The first strict local maximum at positive lag whose
    normalised value exceeds ``min_correlation`` is taken as the period.
    Reliable when the window spans at least ~4 periods of the dominant tone.

    Raises
    ------
    EstimationError
        If no qualifying peak exists (e.g. white noise).
    """
    x = signal.samples - np.mean(signal.samples)
    n = x.size
    if n < 4:
        raise EstimationError("need at least 4 samples")
    nfft = 1 << (2 * n - 1).bit_length()
    spec = np.fft.rfft(x, nfft)
    acf = np.fft.irfft(spec * np.conj(spec), nfft)[:n] / n
    if acf[0] <= 0:
        raise EstimationError("zero-variance signal")
    acf = acf / acf[0]
    inner = acf[1:-1]
    peaks = np.flatnonzero((inner > acf[:-2]) & (inner > acf[2:]) & (inner > min_correlation)) + 1
    if peaks.size == 0:
        raise EstimationError("no autocorrelation peak above the noise guard")
    tau = peaks[0] / signal.sample_rate
    return (tau / (2.0 * math.pi)) ** 2


def _check_N_delta(N: int, delta: float) -> None:
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")
    if not (0 < delta < 1):
        raise DomainError(f"delta must lie in (0, 1), got {delta!r}")


def cutoff_ratio_factor(f0: float, T: float, N: int) -> float:
    """``[(1 - e^{-f0^2 T}) / (1 - e^{-T})]^N``."""
    return math.exp(N * (math.log(-math.expm1(-f0 * f0 * T)) - math.log(-math.expm1(-T)))) if f0 > 0 else 0.0


def cutoff_frequency(N: int, T: float, delta: float) -> float:
    """Cutoff ratio ``f0`` in (0, 1) where :func:`cutoff_ratio_factor` equals ``delta``.

    The factor rises strictly from 0 at ``f0 = 0`` to 1 at ``f0 = 1``, so the
    root is unique; it is found by bisection in log space.
    """
    _check_N_delta(N, delta)
    if not (T > 0 and math.isfinite(T)):
        raise DomainError(f"T must be positive, got {T!r}")
    log_delta = math.log(delta)
    log_top = math.log(-math.expm1(-T))

    def g(f):
        if f <= 0:
            return -math.inf
        return N * (math.log(-math.expm1(-f * f * T)) - log_top) - log_delta

    return bisect(g, 0.0, 1.0)


def solve_T(N: int, delta: float) -> float:
    """``T`` with ``(1 - e^{-T})^N = 1 - delta``: the top tone keeps ``1 - delta`` of its amplitude."""
    _check_N_delta(N, delta)
    target = math.log1p(-delta)

    def g(T):
        if T <= 0:
            return -math.inf
        return N * math.log1p(-math.exp(-T)) - target

    hi = 1.0
    while g(hi) < 0:
        hi *= 2.0
    return bisect(g, 0.0, hi)


def cutoff_frequency_closed_form(N: int, epsilon: float, delta: float, alpha: float) -> float:
    """Closed-form cutoff ``sqrt(log(1 - (delta/alpha)^(1/N) (1 - eps)) / log eps)``.

    ``epsilon = e^{-T}``; ``alpha`` is the amplitude ratio of the two tones.
    With ``alpha = 1`` this coincides with :func:`cutoff_frequency`.

    Raises
    ------
    DomainError
        When a logarithm argument or the square root leaves its domain.
    """
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")
    if not (0 < epsilon < 1):
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if not (alpha > 0):
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    if not (delta > 0):
        raise DomainError(f"delta must be positive, got {delta!r}")
    inner = 1.0 - (delta / alpha) ** (1.0 / N) * (1.0 - epsilon)
    if not (0 < inner < 1):
        raise DomainError(f"log argument 1 - (delta/alpha)^(1/N)(1-eps) = {inner!r} is outside (0, 1)")
    return math.sqrt(math.log(inner) / math.log(epsilon))


def compare_cutoff_formulas(
    N_values: Iterable[int],
    T_values: Iterable[float],
    delta_values: Iterable[float],
    alpha: float = 1.0,
) -> list[dict]:
    """Evaluate both cutoff formulas on a grid; one row per (N, T, delta).

    Rows where the closed form is out of its domain carry ``f0_closed_form = None``
    and an ``error`` message instead of being dropped.
    """
    rows = []
    for N in N_values:
        for T in T_values:
            for delta in delta_values:
                f0 = cutoff_frequency(N, T, delta)
                row = {"N": N, "T": T, "delta": delta, "alpha": alpha, "f0": f0}
                try:
                    f_cf = cutoff_frequency_closed_form(N, math.exp(-T), delta, alpha)
                    row.update(f0_closed_form=f_cf, abs_diff=abs(f_cf - f0), error=None)
                except DomainError as exc:
                    row.update(f0_closed_form=None, abs_diff=None, error=str(exc))
                rows.append(row)
    return rows


def cutoff_grid(N_values: Iterable[int], T_values: Iterable[float], delta: float) -> np.ndarray:
    """``f0`` over an ``N x T`` grid at fixed ``delta`` (rows follow ``N_values``)."""
    N_values, T_values = list(N_values), list(T_values)
    out = np.empty((len(N_values), len(T_values)))
    for i, N in enumerate(N_values):
        for j, T in enumerate(T_values):
            out[i, j] = cutoff_frequency(N, T, delta)
    return out
