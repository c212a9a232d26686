import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heatemd.errors import DomainError
from heatemd.signal_core import (
    CosineComponent,
    Signal,
    add_white_noise,
    count_zero_crossings,
    synth_cosine_sum,
    synth_mode_mixing,
)


class TestSignal:
    def test_samples_are_read_only_copies(self):
        raw = np.arange(4.0)
        s = Signal(raw, 10.0)
        raw[0] = 99
        assert s.samples[0] == 0
        with pytest.raises(ValueError):
            s.samples[0] = 1.0

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(DomainError):
            Signal([0.0, bad, 1.0], 10.0)

    @pytest.mark.parametrize("rate", [0.0, -1.0, np.nan])
    def test_rejects_bad_rate(self, rate):
        with pytest.raises(DomainError):
            Signal([0.0, 1.0], rate)

    def test_times_and_duration(self):
        s = Signal(np.zeros(5), 10.0, start_time=1.0)
        np.testing.assert_allclose(s.times, [1.0, 1.1, 1.2, 1.3, 1.4])
        assert s.duration == pytest.approx(0.5)

    def test_arithmetic(self):
        a = Signal([1.0, 2.0], 4.0)
        b = Signal([0.5, 0.5], 4.0)
        np.testing.assert_array_equal((a - b).samples, [0.5, 1.5])
        np.testing.assert_array_equal((2 * a + b).samples, [2.5, 4.5])
        with pytest.raises(DomainError):
            a + Signal([1.0, 2.0], 5.0)


class TestSynthCosineSum:
    def test_single_unit_cosine(self):
        s = synth_cosine_sum([CosineComponent(1, 1, 0)], 0.0, 100.0, 1.0)
        assert len(s) == 100
        assert s.samples[0] == 1.0

    def test_empty_sum_is_offset(self):
        s = synth_cosine_sum([], 2.5, 10.0, 1.0)
        np.testing.assert_array_equal(s.samples, np.full(10, 2.5))

    def test_two_tone_form(self):
        s = synth_cosine_sum([CosineComponent(1, 1, 0), CosineComponent(0.5, 0.5)], 0.0, 100.0, 10.0)
        assert s.samples[0] == 1.5

    def test_nyquist_rejected(self):
        with pytest.raises(DomainError):
            synth_cosine_sum([CosineComponent(1, 50)], 0.0, 100.0, 1.0)

    def test_empty_output_rejected(self):
        with pytest.raises(DomainError):
            synth_cosine_sum([], 0.0, 10.0, 0.01)

    @pytest.mark.parametrize("freq", [0.0, -1.0])
    def test_component_frequency_positive(self, freq):
        with pytest.raises(DomainError):
            CosineComponent(1.0, freq)

    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(st.tuples(st.floats(-5, 5), st.floats(0.1, 20), st.floats(-3, 3)), min_size=0, max_size=4),
        st.lists(st.tuples(st.floats(-5, 5), st.floats(0.1, 20), st.floats(-3, 3)), min_size=0, max_size=4),
    )
    def test_linear_in_components(self, left, right):
        lc = [CosineComponent(*c) for c in left]
        rc = [CosineComponent(*c) for c in right]
        both = synth_cosine_sum(lc + rc, 0.0, 100.0, 2.0).samples
        split = synth_cosine_sum(lc, 0.0, 100.0, 2.0).samples + synth_cosine_sum(rc, 0.0, 100.0, 2.0).samples
        scale = max(1.0, np.max(np.abs(both)))
        assert np.max(np.abs(both - split)) <= 1e-12 * scale * (len(lc) + len(rc) + 1)


class TestModeMixing:
    def test_values(self):
        s = synth_mode_mixing(10, 20, 0.5, 1000, 1)
        assert len(s) == 1000
        assert s.samples[0] == 1.0
        assert s.samples[250] == pytest.approx(-1.0, abs=1e-12)

    def test_degenerate_equal_frequencies(self):
        a = synth_mode_mixing(7, 7, 0.3, 200, 1)
        b = synth_cosine_sum([CosineComponent(1, 7)], 0.0, 200, 1)
        np.testing.assert_array_equal(a.samples, b.samples)

    def test_prefix_matches_single_tone(self):
        a = synth_mode_mixing(10, 20, 0.37, 1000, 1)
        b = synth_cosine_sum([CosineComponent(1, 10)], 0.0, 1000, 1)
        pre = a.times < 0.37
        np.testing.assert_array_equal(a.samples[pre], b.samples[pre])

    @pytest.mark.parametrize("t_switch", [0.0, 1.0, -0.1, 2.0])
    def test_switch_outside_window(self, t_switch):
        with pytest.raises(DomainError):
            synth_mode_mixing(10, 20, t_switch, 1000, 1)


class TestWhiteNoise:
    def test_zero_sigma_identity(self, tone5):
        np.testing.assert_array_equal(add_white_noise(tone5, 0.0, 3).samples, tone5.samples)

    def test_deterministic(self, tone5):
        a = add_white_noise(tone5, 0.3, 11)
        b = add_white_noise(tone5, 0.3, 11)
        assert a.samples.tobytes() == b.samples.tobytes()
        assert not np.array_equal(a.samples, add_white_noise(tone5, 0.3, 12).samples)

    def test_unit_variance(self):
        noisy = add_white_noise(Signal(np.zeros(100_000), 1000.0), 1.0, 2024)
        var = float(np.var(noisy.samples, ddof=1))
        assert 0.95 <= var <= 1.05
        assert abs(float(np.mean(noisy.samples))) < 0.02

    def test_negative_sigma(self, tone5):
        with pytest.raises(DomainError):
            add_white_noise(tone5, -0.1, 0)


class TestZeroCrossings:
    @pytest.mark.parametrize(
        "x, expected",
        [
            ([1, -1, 1, -1], 3),
            ([1, 0, -1], 1),
            ([1, 0, 1], 0),  # touch, not a crossing
            ([0, 0, 1, -1], 1),
            ([2, 2, 2], 0),
            ([0, 0, 0], 0),
        ],
    )
    def test_counts(self, x, expected):
        assert count_zero_crossings(x) == expected

    def test_scale_invariant(self, two_tone_10_3):
        base = count_zero_crossings(two_tone_10_3.samples)
        assert count_zero_crossings(7.5 * two_tone_10_3.samples) == base
