import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from heatemd.classical_emd import (
    Decomposition,
    SiftConfig,
    decompose_classical,
    envelopes,
    find_extrema,
    imf_check,
    local_mean,
    sift_classical,
    spline_envelope,
)
from heatemd.errors import DomainError, InsufficientExtremaError
from heatemd.signal_core import CosineComponent, Signal, count_zero_crossings, synth_cosine_sum, synth_mode_mixing

from conftest import rel_l2

finite = st.floats(-100, 100, allow_nan=False, allow_infinity=False)


class TestFindExtrema:
    def test_sine_at_eight_samples(self):
        x = np.sin(2 * np.pi * np.arange(8) / 8)
        ext = find_extrema(Signal(x, 8.0))
        assert [i for i, _ in ext.maxima] == [2]
        assert [i for i, _ in ext.minima] == [6]

    @pytest.mark.parametrize("x", [np.full(20, 3.0), np.linspace(-1, 4, 20), np.linspace(4, -1, 20)])
    def test_no_extrema(self, x):
        ext = find_extrema(Signal(x, 1.0))
        assert ext.maxima == [] and ext.minima == []

    def test_plateau_midpoint(self):
        x = [0, 1, 3, 3, 3, 3, 1, 0, -2, -2, -2, 0]
        ext = find_extrema(Signal(x, 1.0))
        assert ext.maxima == [(3, 3.0)]
        assert ext.minima == [(9, -2.0)]

    def test_shelf_is_not_extremum(self):
        ext = find_extrema(Signal([0, 1, 1, 1, 2, 3], 1.0))
        assert ext.count == 0

    def test_endpoints_excluded(self):
        ext = find_extrema(Signal([5, 0, 1, 0, 5], 1.0))
        assert ext.maxima == [(2, 1.0)]
        assert [i for i, _ in ext.minima] == [1, 3]

    def test_too_short(self):
        with pytest.raises(DomainError):
            find_extrema(Signal([1.0, 2.0], 1.0))

    @settings(max_examples=60, deadline=None)
    @given(arrays(np.float64, st.integers(3, 60), elements=finite))
    def test_negation_swaps(self, x):
        a = find_extrema(Signal(x, 1.0))
        b = find_extrema(Signal(-x, 1.0))
        assert [i for i, _ in a.maxima] == [i for i, _ in b.minima]
        assert [i for i, _ in a.minima] == [i for i, _ in b.maxima]

    @settings(max_examples=60, deadline=None)
    @given(arrays(np.float64, st.integers(3, 60), elements=finite))
    def test_indices_increasing_and_extremal(self, x):
        ext = find_extrema(Signal(x, 1.0))
        for knots, cmp in ((ext.maxima, np.greater), (ext.minima, np.less)):
            idx = [i for i, _ in knots]
            assert idx == sorted(set(idx))
            for i, v in knots:
                assert 0 < i < len(x) - 1
                assert v == x[i]
                # strict against the nearest differing neighbours on each side
                left = x[:i][x[:i] != x[i]]
                right = x[i + 1 :][x[i + 1 :] != x[i]]
                assert cmp(x[i], left[-1]) and cmp(x[i], right[0])


class TestSplineEnvelope:
    def test_two_knots_linear(self):
        env = spline_envelope([(2, 1.0), (8, 4.0)], 11, 10.0)
        np.testing.assert_allclose(env, 1.0 + 0.5 * (np.arange(11) - 2), atol=1e-12)

    def test_collinear_knots(self):
        env = spline_envelope([(0, 0.0), (5, 1.0), (10, 2.0)], 11, 1.0)
        np.testing.assert_allclose(env, np.arange(11) / 5.0, atol=1e-12)

    def test_interpolates_knots(self):
        rng = np.random.default_rng(5)
        idx = np.sort(rng.choice(np.arange(-10, 110), size=12, replace=False))
        vals = rng.normal(size=12)
        env = spline_envelope(list(zip(idx, vals)), 100, 50.0)
        inside = (idx >= 0) & (idx < 100)
        np.testing.assert_allclose(env[idx[inside]], vals[inside], atol=1e-12)

    def test_too_few_knots(self):
        with pytest.raises(InsufficientExtremaError):
            spline_envelope([(1, 0.0)], 10, 1.0)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-1e3, 1e3))
    def test_translation_equivariant(self, c):
        knots = [(-3, 0.2), (4, 1.0), (9, -0.5), (15, 0.7), (22, 0.1)]
        base = spline_envelope(knots, 20, 1.0)
        shifted = spline_envelope([(i, v + c) for i, v in knots], 20, 1.0)
        np.testing.assert_allclose(shifted, base + c, atol=1e-12 * max(1.0, abs(c)))

    def test_envelopes_bracket_extrema(self, two_tone_10_3):
        upper, lower = envelopes(two_tone_10_3)
        ext = find_extrema(two_tone_10_3)
        for i, v in ext.maxima:
            assert upper[i] >= v - 1e-12
        for i, v in ext.minima:
            assert lower[i] <= v + 1e-12


class TestLocalMean:
    def test_identical(self):
        s = np.array([1.0, -2.0, 3.0])
        np.testing.assert_array_equal(local_mean(s, s), s)

    def test_symmetric(self):
        s = np.array([1.0, -2.0, 3.0])
        np.testing.assert_array_equal(local_mean(s, -s), 0.0)

    def test_constants(self):
        np.testing.assert_array_equal(local_mean(np.full(4, 2.0), np.zeros(4)), 1.0)

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            local_mean(np.zeros(3), np.zeros(4))


class TestImfCheck:
    def test_pure_sine_passes(self):
        s = synth_cosine_sum([CosineComponent(1.0, 5.0, -np.pi / 2)], 0.0, 1000.0, 1.0)
        assert imf_check(s)

    def test_offset_sine_fails(self):
        s = synth_cosine_sum([CosineComponent(1.0, 5.0)], 3.0, 1000.0, 1.0)
        verdict = imf_check(s)
        assert not verdict
        assert verdict.n_zero_crossings == 0 and verdict.n_extrema > 1

    def test_two_cosines_brute_force(self):
        # frozen from a plain-loop count: 11 strict extrema, 6 sign changes
        # (the exact zeros at x = 0.5, 1.5, 2.5 are touches, not crossings)
        x = np.cos(2 * np.pi * np.arange(3000) / 1000) + np.cos(4 * np.pi * np.arange(3000) / 1000)
        verdict = imf_check(Signal(x, 1000.0))
        assert (verdict.n_extrema, verdict.n_zero_crossings) == (11, 6)
        assert not verdict.passed
        assert verdict.reason == "extrema/zero-crossing count mismatch"

    def test_config_validation(self):
        with pytest.raises(DomainError):
            SiftConfig(sd_threshold=1.5)
        with pytest.raises(DomainError):
            SiftConfig(max_sift_iterations=0)
        with pytest.raises(DomainError):
            SiftConfig(imf_mean_tolerance=0)


class TestSift:
    def test_pure_sine_recovered(self, tone5):
        imf, k = sift_classical(tone5)
        n = len(tone5)
        sl = slice(n // 10, n - n // 10)
        assert k <= 5
        assert rel_l2(imf.samples[sl], tone5.samples[sl]) < 0.05

    def test_fixed_point_one_iteration(self):
        s = synth_cosine_sum([CosineComponent(1.0, 5.0)], 0.0, 1000.0, 2.0)
        imf, k = sift_classical(s)
        assert k == 1
        np.testing.assert_allclose(imf.samples, s.samples, atol=1e-6)

    @pytest.mark.parametrize("cap", [1, 2, 3])
    def test_iteration_cap(self, two_tone_10_3, cap):
        cfg = SiftConfig(sd_threshold=1e-12, max_sift_iterations=cap, imf_mean_tolerance=1e-12)
        _, k = sift_classical(two_tone_10_3, cfg)
        assert k == cap

    def test_insufficient_extrema(self):
        with pytest.raises(InsufficientExtremaError):
            sift_classical(Signal(np.linspace(0, 1, 50), 10.0))


class TestDecomposeClassical:
    def test_constant(self, constant):
        dec = decompose_classical(constant)
        assert len(dec) == 0
        np.testing.assert_array_equal(dec.residual.samples, constant.samples)

    def test_two_tone_first_imf(self, two_tone_10_3):
        dec = decompose_classical(two_tone_10_3)
        n = len(two_tone_10_3)
        sl = slice(n // 10, n - n // 10)
        ref = np.cos(2 * np.pi * 10 * two_tone_10_3.times)
        assert np.corrcoef(dec.imfs[0].samples[sl], ref[sl])[0, 1] > 0.95

    def test_mode_mixing_stays_in_one_imf(self):
        sig = synth_mode_mixing(10, 20, 0.5, 1000, 1)
        dec = decompose_classical(sig)
        x = dec.imfs[0].samples
        spec = np.abs(np.fft.rfft(x[:500])) ** 2, np.abs(np.fft.rfft(x[500:])) ** 2
        f = np.fft.rfftfreq(500, 1e-3)
        first = spec[0][(f >= 7.5) & (f <= 12.5)].sum() / spec[0].sum()
        second = spec[1][(f >= 15) & (f <= 25)].sum() / spec[1].sum()
        # both tones sit in IMF 1
        assert first > 0.8 and second > 0.8

    def test_max_imfs(self, two_tone_10_3):
        assert len(decompose_classical(two_tone_10_3, max_imfs=1)) == 1
        with pytest.raises(DomainError):
            decompose_classical(two_tone_10_3, max_imfs=0)

    def test_decreasing_zero_crossings(self):
        for f_low in (2.0, 3.0, 4.0):
            sig = synth_cosine_sum([CosineComponent(1.0, 12.0), CosineComponent(1.0, f_low)], 0.0, 1000.0, 2.0)
            dec = decompose_classical(sig)
            counts = [count_zero_crossings(imf.samples) for imf in dec.imfs]
            assert len(counts) >= 2
            assert all(a > b for a, b in zip(counts, counts[1:]))

    @settings(max_examples=15, deadline=None)
    @given(arrays(np.float64, st.integers(8, 200), elements=st.floats(-10, 10)))
    def test_reconstruction_identity(self, x):
        sig = Signal(x, 50.0)
        dec = decompose_classical(sig)
        norm = max(np.linalg.norm(x), 1e-300)
        assert np.linalg.norm(dec.reconstruct().samples - x) / norm <= 1e-9


def test_decomposition_shape_validation(tone5):
    with pytest.raises(DomainError):
        Decomposition((Signal(np.zeros(10), 1000.0),), tone5, "classical", (1,))
    with pytest.raises(DomainError):
        Decomposition((tone5,), tone5, "classical", ())
