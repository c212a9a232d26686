"""Analytic signals, instantaneous frequency and Hilbert-Huang spectra."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .classical_emd import Decomposition
from .errors import DomainError
from .signal_core import Signal

__all__ = [
    "AnalyticSignal",
    "HilbertSpectrum",
    "analytic_signal",
    "instantaneous_frequency",
    "hh_spectrum",
]

MIN_MAGNITUDE = 1e-12


@dataclass(frozen=True, eq=False)
class AnalyticSignal:
    real_part: np.ndarray
    imag_part: np.ndarray
    sample_rate: float

    def __post_init__(self):
        re = np.asarray(self.real_part, dtype=np.float64)
        im = np.asarray(self.imag_part, dtype=np.float64)
        if re.shape != im.shape:
            raise DomainError("real and imaginary parts differ in length")
        object.__setattr__(self, "real_part", re)
        object.__setattr__(self, "imag_part", im)

    @property
    def complex(self) -> np.ndarray:
        return self.real_part + 1j * self.imag_part

    @property
    def amplitude(self) -> np.ndarray:
        return np.hypot(self.real_part, self.imag_part)


@dataclass(frozen=True, eq=False)
class HilbertSpectrum:
    """Amplitude deposited on a (time, frequency) grid.

    ``amplitude[i, j]`` belongs to ``time_bins[i]`` and ``freq_bins[j]``
    (bin centres). Samples whose frequency fell outside ``[0, freq_max]``
    were clipped into the edge bins and are tallied in ``clipped_*``;
    samples with undefined frequency (near-zero magnitude) are skipped and
    tallied in ``undefined_*``.
    """

    time_bins: np.ndarray
    freq_bins: np.ndarray
    amplitude: np.ndarray
    time_edges: np.ndarray
    freq_edges: np.ndarray
    clipped_count: int = 0
    clipped_amplitude: float = 0.0
    undefined_count: int = 0
    undefined_amplitude: float = 0.0
    empty: bool = False

    def summary(self) -> dict:
        return {
            "time_bin_count": int(self.time_bins.size),
            "freq_bin_count": int(self.freq_bins.size),
            "time_range": [float(self.time_edges[0]), float(self.time_edges[-1])],
            "freq_range": [float(self.freq_edges[0]), float(self.freq_edges[-1])],
            "total_amplitude": float(self.amplitude.sum()),
            "clipped_count": int(self.clipped_count),
            "clipped_amplitude": float(self.clipped_amplitude),
            "undefined_count": int(self.undefined_count),
            "undefined_amplitude": float(self.undefined_amplitude),
            "empty": bool(self.empty),
        }


def analytic_signal(signal: Signal) -> AnalyticSignal:
    """One-sided spectrum construction of ``x + i H[x]``.

    Positive-frequency bins are doubled, negative ones zeroed; the DC bin and
    (for even length) the Nyquist bin are kept as is. The real part is
    replaced by the input exactly, which only removes rounding noise.
    """
    x = signal.samples
    n = x.size
    if n < 4:
        raise DomainError("analytic_signal needs at least 4 samples")
    weights = np.zeros(n)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[n // 2] = 1.0
        weights[1 : n // 2] = 2.0
    else:
        weights[1 : (n + 1) // 2] = 2.0
    z = np.fft.ifft(np.fft.fft(x) * weights)
    return AnalyticSignal(x.copy(), z.imag, signal.sample_rate)


def instantaneous_frequency(analytic: AnalyticSignal) -> np.ndarray:
    """Phase derivative in Hz; ``nan`` where the magnitude is below 1e-12.

    Central differences of the unwrapped phase in the interior, one-sided
    differences at the two ends.
    """
    z = analytic.complex
    if z.size < 2:
        raise DomainError("need at least 2 samples")
    phase = np.unwrap(np.angle(z))
    freq = np.gradient(phase) * analytic.sample_rate / (2.0 * np.pi)
    freq[analytic.amplitude <= MIN_MAGNITUDE] = np.nan
    return freq


def hh_spectrum(
    decomposition: Decomposition,
    time_bin_count: int = 100,
    freq_bin_count: int = 100,
    freq_max: float | None = None,
) -> HilbertSpectrum:
    """Accumulate every IMF's instantaneous amplitude on a time x frequency grid.

    ``freq_max`` defaults to the Nyquist frequency. The residual is not
    included.
    """
    if time_bin_count < 1 or freq_bin_count < 1:
        raise DomainError("bin counts must be positive")
    ref = decomposition.residual
    fs = ref.sample_rate
    if freq_max is None:
        freq_max = fs / 2.0
    if not freq_max > 0:
        raise DomainError("freq_max must be positive")
    t = ref.times
    t_edges = np.linspace(t[0], t[-1] + 1.0 / fs, time_bin_count + 1)
    f_edges = np.linspace(0.0, freq_max, freq_bin_count + 1)
    grid = np.zeros((time_bin_count, freq_bin_count))
    centres = lambda e: 0.5 * (e[:-1] + e[1:])

    if len(decomposition.imfs) == 0:
        warnings.warn("empty decomposition: Hilbert spectrum is all zeros", stacklevel=2)
        return HilbertSpectrum(centres(t_edges), centres(f_edges), grid, t_edges, f_edges, empty=True)

    t_idx = np.clip(np.searchsorted(t_edges, t, side="right") - 1, 0, time_bin_count - 1)
    clipped_n, clipped_amp, undef_n, undef_amp = 0, 0.0, 0, 0.0
    for imf in decomposition.imfs:
        z = analytic_signal(imf)
        amp = z.amplitude
        freq = instantaneous_frequency(z)
        defined = np.isfinite(freq)
        undef_n += int(np.count_nonzero(~defined))
        undef_amp += float(amp[~defined].sum())
        outside = defined & ((freq < 0) | (freq > freq_max))
        clipped_n += int(np.count_nonzero(outside))
        clipped_amp += float(amp[outside].sum())
        f_idx = np.clip(np.floor(freq[defined] / freq_max * freq_bin_count), 0, freq_bin_count - 1).astype(np.intp)
        np.add.at(grid, (t_idx[defined], f_idx), amp[defined])
    return HilbertSpectrum(
        centres(t_edges),
        centres(f_edges),
        grid,
        t_edges,
        f_edges,
        clipped_count=clipped_n,
        clipped_amplitude=clipped_amp,
        undefined_count=undef_n,
        undefined_amplitude=undef_amp,
    )
