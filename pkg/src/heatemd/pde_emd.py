"""EMD with the spline-envelope mean replaced by a forward heat-equation mean curve.

One sifting pass maps ``c -> c - H_T c`` where ``H_T`` evolves ``c`` under
``h_t = a h_xx`` for pseudo-time ``T``. On a periodic domain each Fourier mode
of angular frequency ``omega`` is scaled by ``1 - exp(-a omega^2 T)`` per pass,
so after ``N`` passes it keeps :func:`attenuation` of its amplitude.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .classical_emd import Decomposition, SiftConfig, imf_check
from .errors import DomainError, EstimationError
from .heat_solver import BoundaryCondition, evolve
from .pde_params import a_from_zero_crossings, dominant_frequency_zcr
from .signal_core import Signal

__all__ = ["PdeParams", "mean_curve", "sift_pde", "decompose_pde", "attenuation"]

# residual energy below this fraction of the input counts as exhausted
RESIDUAL_FLOOR = 1e-10


@dataclass(frozen=True)
class PdeParams:
    """Forward-PDE sifting parameters.

    ``a`` is the diffusivity in s^2; ``None`` means "estimate from the signal's
    zero-crossing rate". ``N`` is a fixed number of passes per IMF unless
    ``imf_early_exit`` is set, in which case sifting also stops as soon as the
    candidate passes the classical IMF test. ``delta`` is the suppression
    threshold used when deriving ``T``/``N``; sifting itself does not read it.
    """

    a: float | None = None
    T: float = 10.0
    N: int = 100
    delta: float = 0.5
    bc: BoundaryCondition = BoundaryCondition.PERIODIC
    time_steps: int = 1000
    imf_early_exit: bool = False

    def __post_init__(self):
        if self.a is not None and not (math.isfinite(self.a) and self.a > 0):
            raise DomainError(f"a must be > 0, got {self.a!r}")
        if not (math.isfinite(self.T) and self.T > 0):
            raise DomainError(f"T must be > 0, got {self.T!r}")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"N must be a positive integer, got {self.N!r}")
        if not (0 < self.delta < 1):
            raise DomainError(f"delta must lie in (0, 1), got {self.delta!r}")
        if int(self.time_steps) != self.time_steps or self.time_steps < 1:
            raise DomainError("time_steps must be a positive integer")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "bc", BoundaryCondition.parse(self.bc))

    def with_a(self, a: float) -> "PdeParams":
        return dataclasses.replace(self, a=a)

    def resolve_a(self, signal: Signal) -> float:
        return self.a if self.a is not None else a_from_zero_crossings(signal)


def attenuation(omega: float, a: float, T: float, N: int) -> float:
    """Surviving amplitude fraction ``(1 - exp(-a omega^2 T))^N`` after ``N`` passes."""
    if omega < 0 or not a > 0 or not T > 0 or int(N) != N or N < 1:
        raise DomainError("attenuation needs omega >= 0, a > 0, T > 0, N >= 1")
    return (-math.expm1(-a * omega * omega * T)) ** int(N)


def mean_curve(signal: Signal, params: PdeParams) -> np.ndarray:
    """Heat evolution of ``signal`` to pseudo-time ``T`` (the PDE mean curve)."""
    return evolve(signal, params.resolve_a(signal), params.T, params.bc, params.time_steps)


def sift_pde(signal: Signal, params: PdeParams) -> tuple[Signal, int]:
    """Apply ``c <- c - mean_curve(c)`` ``N`` times; returns ``(imf, passes)``.

    ``a`` is resolved once from the input when ``params.a`` is ``None``.
    """
    params = params.with_a(params.resolve_a(signal))
    c = signal
    passes = 0
    check = SiftConfig() if params.imf_early_exit else None
    for _ in range(params.N):
        c = c.with_samples(c.samples - mean_curve(c, params))
        passes += 1
        if check is not None and len(c) >= 3 and imf_check(c, check):
            break
    return c, passes


def decompose_pde(signal: Signal, params: PdeParams = PdeParams(), max_imfs: int = 10) -> Decomposition:
    """Extract IMFs with :func:`sift_pde` until the residual stops oscillating.

    The first stage uses ``params.a`` when given. Every later stage (and the
    first, when ``a`` is ``None``) sets ``a = 1 / omega^2`` from the residual's
    zero-crossing rate, so each stage targets the next band down. Extraction
    stops when the residual's dominant frequency drops below one cycle per
    window, its energy is negligible, or ``max_imfs`` IMFs exist.
    """
    if max_imfs < 1:
        raise DomainError("max_imfs must be >= 1")
    floor = RESIDUAL_FLOOR * float(np.linalg.norm(signal.samples))
    residual = signal
    imfs, passes, info = [], [], []
    while len(imfs) < max_imfs:
        if float(np.linalg.norm(residual.samples)) <= floor:
            break
        try:
            freq = dominant_frequency_zcr(residual)
        except EstimationError:
            break
        if freq < 1.0 / signal.duration:
            break
        if imfs or params.a is None:
            a = 1.0 / (2.0 * math.pi * freq) ** 2
            source = "zero_crossings"
        else:
            a = params.a
            source = "given"
        imf, k = sift_pde(residual, params.with_a(a))
        imfs.append(imf)
        passes.append(k)
        info.append({"a": a, "a_source": source, "dominant_frequency": freq})
        residual = residual - imf
    return Decomposition(
        imfs=tuple(imfs),
        residual=residual,
        method="forward_pde",
        iterations_per_imf=tuple(passes),
        stage_info=tuple(info),
    )
