import numpy as np
import pytest

from heatemd.signal_core import CosineComponent, Signal, synth_cosine_sum


def rel_l2(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.linalg.norm(x - y) / np.linalg.norm(y))


def project_amplitude(samples, sample_rate, freq):
    """Amplitude of the ``freq`` Hz component by direct cosine/sine projection.

    Deliberately avoids the FFT so it stays independent of the spectral code.
    """
    x = np.asarray(samples, dtype=float)
    t = np.arange(x.size) / sample_rate
    c = 2.0 / x.size * np.sum(x * np.cos(2 * np.pi * freq * t))
    s = 2.0 / x.size * np.sum(x * np.sin(2 * np.pi * freq * t))
    return float(np.hypot(c, s))


@pytest.fixture
def tone5():
    """Unit 5 Hz cosine, 1 s at 1 kHz: integer number of periods."""
    return synth_cosine_sum([CosineComponent(1.0, 5.0)], 0.0, 1000.0, 1.0)


@pytest.fixture
def two_tone_10_3():
    return synth_cosine_sum([CosineComponent(1.0, 10.0), CosineComponent(1.0, 3.0)], 0.0, 1000.0, 2.0)


@pytest.fixture
def three_tone():
    """Band-limited periodic signal used for solver cross-checks."""
    return synth_cosine_sum(
        [CosineComponent(1.0, 1.0), CosineComponent(0.5, 2.0, 0.3), CosineComponent(0.25, 3.0, 1.0)],
        0.0,
        1000.0,
        1.0,
    )


@pytest.fixture
def constant():
    return Signal(np.full(500, 2.5), 100.0)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
