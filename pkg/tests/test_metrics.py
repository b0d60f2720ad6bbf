import math

import numpy as np
import pytest

from sparsepr.metrics import (
    DEFAULT_SUCCESS_THRESHOLD,
    AlignmentPolicy,
    TrialResult,
    add_noise,
    measure_snr,
    nmse,
    recovery_probability,
)
from sparsepr.signals import RngSpec


def result_with_success(flag: bool) -> TrialResult:
    return TrialResult(
        method="l0l1pr", n=8, s=2, snr=None, k_masks=0, seed=0,
        nmse=0.0 if flag else 1.0, success=flag, iterations=1, wall_time_s=0.0,
    )


class TestAddNoise:
    def test_infinite_snr_is_identity(self):
        b = np.array([1.0, 2.0, 3.0])
        out = add_noise(b, math.inf, RngSpec(0))
        np.testing.assert_array_equal(out, b)

    def test_exact_norm_ratio_at_20db(self):
        b = np.random.default_rng(0).random(64) + 0.5
        noisy = add_noise(b, 20.0, RngSpec(1))
        ratio = np.linalg.norm(noisy - b) / np.linalg.norm(b)
        assert ratio == pytest.approx(0.1, rel=1e-12)

    def test_deterministic(self):
        b = np.ones(16)
        assert np.array_equal(add_noise(b, 30, RngSpec(2)), add_noise(b, 30, RngSpec(2)))

    def test_zero_b_rejected(self):
        with pytest.raises(ValueError):
            add_noise(np.zeros(4), 20.0, RngSpec(0))

    def test_nan_snr_rejected(self):
        with pytest.raises(ValueError):
            add_noise(np.ones(4), math.nan, RngSpec(0))


class TestMeasureSnr:
    def test_zero_noise_is_inf(self):
        b = np.array([1.0, 2.0])
        assert measure_snr(b, b) == math.inf

    @pytest.mark.parametrize("snr", [20.0, 30.0, 40.0])
    def test_round_trip(self, snr):
        b = np.random.default_rng(3).random(128) + 0.2
        noisy = add_noise(b, snr, RngSpec(4))
        assert measure_snr(b, noisy) == pytest.approx(snr, abs=0.5)

    def test_sign_flip_invariance(self):
        b = np.random.default_rng(5).random(32) + 0.1
        noisy = add_noise(b, 25.0, RngSpec(6))
        assert measure_snr(b, -noisy) == pytest.approx(measure_snr(b, noisy))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            measure_snr(np.ones(3), np.ones(4))


class TestNmse:
    def test_global_phase_removed(self):
        gen = np.random.default_rng(7)
        x = gen.standard_normal(32) + 1j * gen.standard_normal(32)
        for theta in (0.0, 0.7, np.pi):
            assert nmse(np.exp(1j * theta) * x, x) <= 1e-12

    def test_shift_removed(self):
        gen = np.random.default_rng(8)
        x = gen.standard_normal(16) + 1j * gen.standard_normal(16)
        assert nmse(np.roll(x, 3), x, AlignmentPolicy.fourier()) <= 1e-12

    def test_conj_flip_removed(self):
        gen = np.random.default_rng(9)
        n = 16
        x = gen.standard_normal(n) + 1j * gen.standard_normal(n)
        flipped = np.conj(x[(-np.arange(n)) % n])
        assert nmse(flipped, x, AlignmentPolicy.fourier()) <= 1e-12

    def test_phase_only_hand_value(self):
        # ||(0,1) - c (1,0)|| = sqrt(2) for every unit c, and ||truth|| = 1
        val = nmse(np.array([0.0, 1.0]), np.array([1.0, 0.0]), AlignmentPolicy.phase_only())
        assert val == pytest.approx(math.sqrt(2.0))

    def test_policy_monotonicity(self):
        """A looser policy can only shrink the error."""
        gen = np.random.default_rng(10)
        x = gen.standard_normal(32) + 1j * gen.standard_normal(32)
        est = np.roll(x, 5) * np.exp(0.3j) + 0.01 * gen.standard_normal(32)
        loose = nmse(est, x, AlignmentPolicy.fourier())
        tight = nmse(est, x, AlignmentPolicy.phase_only())
        assert loose <= tight + 1e-12

    @pytest.mark.parametrize("n", [4, 8, 16, 64])
    def test_fft_alignment_matches_exhaustive(self, n):
        """The FFT correlation must equal the O(N^2) scan over all transforms."""
        gen = np.random.default_rng(n)
        truth = gen.standard_normal(n) + 1j * gen.standard_normal(n)
        est = gen.standard_normal(n) + 1j * gen.standard_normal(n)
        fast = nmse(est, truth, AlignmentPolicy.fourier())
        flipped = np.conj(truth[(-np.arange(n)) % n])
        best = math.inf
        for ref in (truth, flipped):
            for tau in range(n):
                shifted = np.roll(ref, tau)
                inner = np.vdot(shifted, est)
                c = inner / abs(inner) if abs(inner) > 0 else 1.0
                best = min(best, np.linalg.norm(est - c * shifted))
        slow = best / np.linalg.norm(truth)
        assert fast == pytest.approx(slow, abs=1e-10)

    def test_zero_truth_rejected(self):
        with pytest.raises(ValueError):
            nmse(np.ones(4), np.zeros(4))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            nmse(np.ones(4), np.ones(5))


class TestRecoveryProbability:
    def test_all_success(self):
        assert recovery_probability([result_with_success(True)] * 4 ) == 1.0

    def test_paper_fraction(self):
        results = [result_with_success(i < 62) for i in range(100)]
        assert recovery_probability(results) == pytest.approx(0.62)

    def test_none_recovered(self):
        assert recovery_probability([result_with_success(False)] * 100) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            recovery_probability([])

    def test_threshold_constant(self):
        assert DEFAULT_SUCCESS_THRESHOLD == 1e-3
