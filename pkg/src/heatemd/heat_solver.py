"""Forward heat-equation evolution ``h_t = a h_xx`` of a sampled signal.

The spatial variable is time in seconds, so ``a`` carries units of s^2 and a
Fourier mode of angular frequency ``omega`` (rad/s) decays as
``exp(-a omega^2 T)`` over pseudo-time ``T``.

Three routes are provided:

* :func:`evolve_spectral` -- exact per-mode solution on a periodic domain.
* :func:`evolve_fd` -- Crank-Nicolson finite differences, with periodic,
  fixed-end or reflective (zero-flux) boundaries.
* :func:`gaussian_convolve_oracle` -- circular convolution with the heat
  kernel, a Gaussian of standard deviation ``sqrt(2 a T)`` seconds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import DomainError
from .signal_core import Signal

__all__ = [
    "BoundaryCondition",
    "HeatEvolution",
    "evolve_spectral",
    "evolve_fd",
    "gaussian_convolve_oracle",
    "evolve",
    "spectral_gain",
]


class BoundaryCondition(str, enum.Enum):
    PERIODIC = "periodic"
    FIXED_ENDS = "fixed_ends"
    REFLECTIVE = "reflective"

    @classmethod
    def parse(cls, value) -> "BoundaryCondition":
        if isinstance(value, cls):
            return value
        aliases = {"fixed": cls.FIXED_ENDS, "fixed-ends": cls.FIXED_ENDS}
        try:
            return aliases.get(value) or cls(value)
        except ValueError:
            raise DomainError(f"unknown boundary condition {value!r}") from None


@dataclass(frozen=True)
class HeatEvolution:
    a: float
    T: float
    bc: BoundaryCondition = BoundaryCondition.PERIODIC

    def __post_init__(self):
        _check_a_T(self.a, self.T, allow_zero_T=False)
        object.__setattr__(self, "bc", BoundaryCondition.parse(self.bc))


def _check_a_T(a: float, T: float, allow_zero_T: bool = True) -> None:
    if not (np.isfinite(a) and a > 0):
        raise DomainError(f"diffusivity a must be > 0 (forward equation only), got {a!r}")
    ok = T >= 0 if allow_zero_T else T > 0
    if not (np.isfinite(T) and ok):
        raise DomainError(f"evolution time T must be {'>=' if allow_zero_T else '>'} 0, got {T!r}")


def _as_array(signal) -> tuple[np.ndarray, float]:
    if isinstance(signal, Signal):
        return signal.samples, signal.sample_rate
    raise TypeError("expected a Signal")


def angular_frequencies(n: int, sample_rate: float) -> np.ndarray:
    """Angular frequency of each ``rfft`` bin on a periodic window of ``n`` samples."""
    return 2.0 * np.pi * np.fft.rfftfreq(n, d=1.0 / sample_rate)


def spectral_gain(omega, a: float, T: float) -> np.ndarray:
    """Per-mode heat-equation multiplier ``exp(-a omega^2 T)``."""
    omega = np.asarray(omega, dtype=np.float64)
    return np.exp(-a * omega * omega * T)


def evolve_spectral(signal: Signal, a: float, T: float) -> np.ndarray:
    """Exact periodic solution: damp each DFT mode by ``exp(-a omega_k^2 T)``.

    Mode ``k`` has ``omega_k = 2 pi k / L`` with ``L = len(signal) / sample_rate``.
    """
    _check_a_T(a, T)
    x, fs = _as_array(signal)
    if x.size < 2:
        raise DomainError("need at least 2 samples")
    spec = np.fft.rfft(x)
    spec *= spectral_gain(angular_frequencies(x.size, fs), a, T)
    return np.fft.irfft(spec, n=x.size)


def _laplacian(n: int, bc: BoundaryCondition) -> scipy.sparse.csc_matrix:
    """Second-difference operator (unit spacing) with boundary rows for ``bc``."""
    main = -2.0 * np.ones(n)
    off = np.ones(n - 1)
    lap = scipy.sparse.lil_matrix(scipy.sparse.diags([off, main, off], [-1, 0, 1], shape=(n, n)))
    if bc is BoundaryCondition.PERIODIC:
        lap[0, n - 1] += 1.0
        lap[n - 1, 0] += 1.0
    elif bc is BoundaryCondition.REFLECTIVE:
        # ghost node mirrors the first interior neighbour: u[-1] = u[1]
        lap[0, 1] = 2.0
        lap[n - 1, n - 2] = 2.0
    elif bc is BoundaryCondition.FIXED_ENDS:
        lap[0, :] = 0.0
        lap[n - 1, :] = 0.0
    return lap.tocsc()


def evolve_fd(
    signal: Signal,
    a: float,
    T: float,
    bc: BoundaryCondition | str = BoundaryCondition.PERIODIC,
    time_steps: int = 1000,
) -> np.ndarray:
    """Crank-Nicolson integration of ``h_t = a h_xx`` with central differences.

    ``fixed_ends`` keeps both endpoint values at their initial values,
    ``reflective`` imposes zero normal derivative, ``periodic`` wraps the
    stencil.
    """
    bc = BoundaryCondition.parse(bc)
    _check_a_T(a, T)
    if int(time_steps) != time_steps or time_steps < 1:
        raise DomainError("time_steps must be a positive integer")
    x, fs = _as_array(signal)
    n = x.size
    if n < 3:
        raise DomainError("finite differences need at least 3 samples")
    if T == 0:
        return x.copy()
    r = a * (T / time_steps) * fs * fs
    lap = _laplacian(n, bc)
    eye = scipy.sparse.identity(n, format="csc")
    lhs = scipy.sparse.linalg.splu((eye - 0.5 * r * lap).tocsc())
    rhs = (eye + 0.5 * r * lap).tocsr()
    h = x.copy()
    for _ in range(int(time_steps)):
        h = lhs.solve(rhs @ h)
    if bc is BoundaryCondition.FIXED_ENDS:
        h[0], h[-1] = x[0], x[-1]
    return h


def gaussian_convolve_oracle(signal: Signal, a: float, T: float) -> np.ndarray:
    """Circular convolution with the sampled periodic heat kernel.

    The kernel is a Gaussian of standard deviation ``sqrt(2 a T)`` seconds,
    wrapped onto the periodic window and normalised to unit sum. The sum is
    carried out directly in the sample domain as a circulant matrix-vector
    product, so it shares no code path with :func:`evolve_spectral`
    (memory is O(n^2); intended for verification-sized inputs).
    """
    _check_a_T(a, T)
    x, fs = _as_array(signal)
    n = x.size
    sigma = np.sqrt(2.0 * a * T)
    period = n / fs
    lag = np.arange(n) / fs
    # signed distance to the nearest copy, then neighbouring periodic images
    lag = np.where(lag > period / 2, lag - period, lag)
    if sigma == 0:
        kernel = (np.arange(n) == 0).astype(np.float64)
    else:
        images = int(np.ceil(12.0 * sigma / period)) + 1
        shifts = np.arange(-images, images + 1)[:, None] * period
        kernel = np.exp(-0.5 * ((lag[None, :] + shifts) / sigma) ** 2).sum(axis=0)
        kernel /= kernel.sum()
    return scipy.linalg.circulant(kernel) @ x


def evolve(
    signal: Signal,
    a: float,
    T: float,
    bc: BoundaryCondition | str = BoundaryCondition.PERIODIC,
    time_steps: int = 1000,
) -> np.ndarray:
    """Dispatch to the spectral solver for periodic domains, Crank-Nicolson otherwise."""
    bc = BoundaryCondition.parse(bc)
    if bc is BoundaryCondition.PERIODIC:
        return evolve_spectral(signal, a, T)
    return evolve_fd(signal, a, T, bc, time_steps)
