"""Classical (spline-envelope) Empirical Mode Decomposition.

Sifting follows the usual recipe: locate extrema, fit natural cubic splines
through the maxima and minima, subtract the envelope mean, repeat until the
candidate qualifies as an IMF or a stopping rule fires.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, InsufficientExtremaError
from .signal_core import Signal, count_zero_crossings

__all__ = [
    "ExtremaSet",
    "SiftConfig",
    "Decomposition",
    "ImfVerdict",
    "find_extrema",
    "spline_envelope",
    "envelopes",
    "local_mean",
    "imf_check",
    "sift_classical",
    "decompose_classical",
]

# extrema mirrored across each endpoint before splining
MIRROR_COUNT = 2


@dataclass(frozen=True)
class ExtremaSet:
    maxima: list[tuple[int, float]]
    minima: list[tuple[int, float]]

    @property
    def count(self) -> int:
        return len(self.maxima) + len(self.minima)


@dataclass(frozen=True)
class SiftConfig:
    """Stopping rules for the classical sifting loop.

    ``sd_threshold`` bounds the Cauchy-type statistic
    ``sum((h_prev - h)^2) / sum(h_prev^2)``; ``imf_mean_tolerance`` is the
    largest envelope mean allowed, as a fraction of ``max |candidate|``.
    """

    sd_threshold: float = 0.2
    max_sift_iterations: int = 100
    imf_mean_tolerance: float = 0.05

    def __post_init__(self):
        if not (0 < self.sd_threshold < 1):
            raise DomainError("sd_threshold must lie in (0, 1)")
        if int(self.max_sift_iterations) != self.max_sift_iterations or self.max_sift_iterations < 1:
            raise DomainError("max_sift_iterations must be a positive integer")
        if not (self.imf_mean_tolerance > 0):
            raise DomainError("imf_mean_tolerance must be positive")


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Ordered IMFs (highest frequency first) and the final residual.

    ``imfs`` were removed from the input by plain subtraction, so
    ``sum(imfs) + residual`` reproduces the input up to rounding.
    ``stage_info`` holds one metadata dict per IMF (e.g. the diffusivity used).
    """

    imfs: tuple[Signal, ...]
    residual: Signal
    method: str
    iterations_per_imf: tuple[int, ...]
    stage_info: tuple[dict, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "imfs", tuple(self.imfs))
        object.__setattr__(self, "iterations_per_imf", tuple(int(i) for i in self.iterations_per_imf))
        object.__setattr__(self, "stage_info", tuple(self.stage_info))
        if len(self.iterations_per_imf) != len(self.imfs):
            raise DomainError("iterations_per_imf must have one entry per IMF")
        for imf in self.imfs:
            if len(imf) != len(self.residual) or imf.sample_rate != self.residual.sample_rate:
                raise DomainError("all IMFs must share length and sample rate with the residual")

    def __len__(self) -> int:
        return len(self.imfs)

    def reconstruct(self) -> Signal:
        total = self.residual.samples.copy()
        for imf in self.imfs:
            total += imf.samples
        return self.residual.with_samples(total)


@dataclass(frozen=True)
class ImfVerdict:
    passed: bool
    reason: str | None
    n_extrema: int
    n_zero_crossings: int
    mean_ratio: float

    def __bool__(self) -> bool:
        return self.passed


def _extrema_indices(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Strict interior extrema; flat runs collapse to their midpoint."""
    # run-length encode equal neighbours
    change = np.flatnonzero(np.diff(x) != 0)
    starts = np.concatenate(([0], change + 1))
    ends = np.concatenate((change, [x.size - 1]))
    vals = x[starts]
    if starts.size < 3:
        empty = np.empty(0, dtype=np.intp)
        return empty, empty
    prev, cur, nxt = vals[:-2], vals[1:-1], vals[2:]
    mid = (starts[1:-1] + ends[1:-1]) // 2
    return mid[(cur > prev) & (cur > nxt)], mid[(cur < prev) & (cur < nxt)]


def find_extrema(signal: Signal | np.ndarray) -> ExtremaSet:
    """Local maxima and minima by three-point comparison.

    Endpoints are never reported. A plateau that is higher (lower) than both
    neighbouring runs is reported once, at its midpoint index.
    """
    x = signal.samples if isinstance(signal, Signal) else np.asarray(signal, dtype=np.float64)
    if x.size < 3:
        raise DomainError("find_extrema needs at least 3 samples")
    imax, imin = _extrema_indices(x)
    return ExtremaSet(
        maxima=[(int(i), float(x[i])) for i in imax],
        minima=[(int(i), float(x[i])) for i in imin],
    )


def _mirror(knots: Sequence[tuple[int, float]], n: int) -> list[tuple[int, float]]:
    """Reflect the nearest extrema across both endpoints (index 0 and n-1)."""
    left = [(-i, v) for i, v in knots[:MIRROR_COUNT][::-1] if i != 0]
    right = [(2 * (n - 1) - i, v) for i, v in knots[-MIRROR_COUNT:][::-1] if i != n - 1]
    return left + list(knots) + right


def spline_envelope(
    knots: Sequence[tuple[int, float]], domain_length: int, sample_rate: float
) -> np.ndarray:
    """Natural cubic spline through ``knots`` evaluated at sample indices ``0..domain_length-1``.

    Knot indices may fall outside the domain (mirrored extrema). Two knots
    give the straight line through them.
    """
    if len(knots) < 2:
        raise InsufficientExtremaError("an envelope needs at least 2 knots")
    idx = np.array([k[0] for k in knots], dtype=np.float64)
    val = np.array([k[1] for k in knots], dtype=np.float64)
    order = np.argsort(idx, kind="stable")
    idx, val = idx[order], val[order]
    if np.any(np.diff(idx) == 0):
        raise DomainError("duplicate knot positions")
    x = np.arange(domain_length) / sample_rate
    xk = idx / sample_rate
    if idx.size == 2:
        # natural spline on two knots is the chord; extrapolate it linearly
        return val[0] + (val[1] - val[0]) * (x - xk[0]) / (xk[1] - xk[0])
    return CubicSpline(xk, val, bc_type="natural", extrapolate=True)(x)


def envelopes(signal: Signal) -> tuple[np.ndarray, np.ndarray]:
    """Upper and lower spline envelopes with mirrored endpoint extension.

    Raises
    ------
    InsufficientExtremaError
        If there are fewer than 2 maxima or fewer than 2 minima.
    """
    ext = find_extrema(signal)
    if len(ext.maxima) < 2 or len(ext.minima) < 2:
        raise InsufficientExtremaError(
            f"{len(ext.maxima)} maxima / {len(ext.minima)} minima; need 2 of each"
        )
    n = len(signal)
    upper = spline_envelope(_mirror(ext.maxima, n), n, signal.sample_rate)
    lower = spline_envelope(_mirror(ext.minima, n), n, signal.sample_rate)
    return upper, lower


def local_mean(upper, lower) -> np.ndarray:
    upper = np.asarray(upper, dtype=np.float64)
    lower = np.asarray(lower, dtype=np.float64)
    if upper.shape != lower.shape:
        raise DomainError(f"envelope lengths differ: {upper.shape} vs {lower.shape}")
    return 0.5 * (upper + lower)


def imf_check(candidate: Signal, config: SiftConfig = SiftConfig()) -> ImfVerdict:
    """Test the two IMF conditions on ``candidate``.

    Passes when extrema and zero-crossing counts differ by at most one and the
    largest envelope mean is within ``imf_mean_tolerance * max|candidate|``.
    """
    ext = find_extrema(candidate)
    n_ext = ext.count
    n_zc = count_zero_crossings(candidate.samples)
    if abs(n_ext - n_zc) > 1:
        return ImfVerdict(False, "extrema/zero-crossing count mismatch", n_ext, n_zc, float("nan"))
    try:
        upper, lower = envelopes(candidate)
    except InsufficientExtremaError:
        return ImfVerdict(False, "too few extrema for envelopes", n_ext, n_zc, float("nan"))
    scale = np.max(np.abs(candidate.samples))
    ratio = float(np.max(np.abs(local_mean(upper, lower))) / scale) if scale > 0 else 0.0
    if ratio > config.imf_mean_tolerance:
        return ImfVerdict(False, "envelope mean not close to zero", n_ext, n_zc, ratio)
    return ImfVerdict(True, None, n_ext, n_zc, ratio)


def sift_classical(signal: Signal, config: SiftConfig = SiftConfig()) -> tuple[Signal, int]:
    """Extract one IMF by repeated envelope-mean subtraction.

    Stops after the first iteration at which the candidate passes
    :func:`imf_check`, the SD statistic drops below ``sd_threshold``, or
    ``max_sift_iterations`` is reached. If a later candidate runs out of
    extrema, the last valid candidate is returned.

    Raises
    ------
    InsufficientExtremaError
        If the input itself has fewer than 2 maxima or 2 minima.
    """
    h = signal.samples
    iterations = 0
    while iterations < config.max_sift_iterations:
        try:
            upper, lower = envelopes(signal.with_samples(h))
        except InsufficientExtremaError:
            if iterations == 0:
                raise
            break
        mean = local_mean(upper, lower)
        h_new = h - mean
        iterations += 1
        denom = float(np.sum(h * h))
        sd = float(np.sum(mean * mean)) / denom if denom > 0 else 0.0
        h = h_new
        candidate = signal.with_samples(h)
        if sd < config.sd_threshold or imf_check(candidate, config):
            break
    return signal.with_samples(h), iterations


def decompose_classical(
    signal: Signal, config: SiftConfig = SiftConfig(), max_imfs: int = 10
) -> Decomposition:
    """Peel off IMFs until the residual has fewer than 3 extrema or ``max_imfs`` is hit."""
    if max_imfs < 1:
        raise DomainError("max_imfs must be >= 1")
    residual = signal
    imfs, iters = [], []
    while len(imfs) < max_imfs and len(residual) >= 3:
        if find_extrema(residual).count < 3:
            break
        try:
            imf, k = sift_classical(residual, config)
        except InsufficientExtremaError:
            break
        imfs.append(imf)
        iters.append(k)
        residual = residual - imf
    return Decomposition(
        imfs=tuple(imfs),
        residual=residual,
        method="classical",
        iterations_per_imf=tuple(iters),
        stage_info=tuple({"sd_threshold": config.sd_threshold} for _ in imfs),
    )
