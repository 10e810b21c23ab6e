import math

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from quantum_basis.models import Field, NoiseSpec, DimensionMismatchError
from quantum_basis.noise import snr_db, corrupt, poisson_scale, gaussian_beta, expected_poisson_snr_db
from quantum_basis.synth import make_image


class TestSNR:

    def test_twenty_decibels(self):
        assert snr_db(Field.from_array([10.0, 0.0]), Field.from_array([10.0, 1.0])) == pytest.approx(20.0)

    def test_identical_is_infinite(self, random_signal):
        assert snr_db(random_signal, random_signal) == math.inf

    def test_scale_invariant(self, random_signal, rng):
        other = random_signal.with_values(random_signal.values + rng.normal(size=random_signal.size))
        c = 7.5
        scaled = snr_db(random_signal.with_values(c * random_signal.values), other.with_values(c * other.values))
        assert scaled == pytest.approx(snr_db(random_signal, other), rel=1e-12)

    def test_shape_mismatch(self, random_signal, random_image):
        with pytest.raises(DimensionMismatchError):
            snr_db(random_signal, random_image)


class TestScales:

    def test_poisson_scale_hits_target(self, random_image):
        a = poisson_scale(random_image, 12.0)
        assert expected_poisson_snr_db(random_image, a) == pytest.approx(12.0, abs=1e-9)

    def test_gaussian_beta_closed_form(self):
        x = Field.from_array(np.array([1.0, 2.0, 3.0]))
        # sum x^2 = 14, sum x = 6
        assert gaussian_beta(x, 10.0) == pytest.approx(14.0 / (6.0 * 10.0))


class TestCorrupt:

    @pytest.mark.parametrize("model", ["poisson", "gaussian"])
    def test_large_constant_field_hits_target(self, model):
        clean = Field.from_array(np.full(10 ** 6, 50.0))
        _, achieved = corrupt(clean, NoiseSpec(model, 15.0, seed=3))
        assert abs(achieved - 15.0) <= 0.2

    @pytest.mark.parametrize("model", ["poisson", "gaussian"])
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_structured_field_hits_target(self, model, seed):
        clean = make_image(100, seed=seed)
        assert clean.size == 10 ** 4
        _, achieved = corrupt(clean, NoiseSpec(model, 15.0, seed=seed))
        assert abs(achieved - 15.0) <= 0.5

    @pytest.mark.parametrize("model", ["poisson", "gaussian"])
    def test_deterministic(self, random_image, model):
        a, snr_a = corrupt(random_image, NoiseSpec(model, 15.0, seed=11))
        b, snr_b = corrupt(random_image, NoiseSpec(model, 15.0, seed=11))
        assert_array_equal(a.values, b.values)
        assert snr_a == snr_b

    def test_seeds_differ(self, random_image):
        a, _ = corrupt(random_image, NoiseSpec("poisson", 15.0, seed=1))
        b, _ = corrupt(random_image, NoiseSpec("poisson", 15.0, seed=2))
        assert not np.array_equal(a.values, b.values)

    def test_poisson_variance_is_signal_dependent(self):
        level = 40.0
        clean = Field.from_array(np.full(10 ** 4, level))
        spec = NoiseSpec("poisson", 15.0, seed=5)
        noisy, _ = corrupt(clean, spec)
        a = poisson_scale(clean, 15.0)
        assert np.var(noisy.values) == pytest.approx(level / a, rel=0.05)

    def test_gaussian_variance_is_signal_dependent(self):
        level = 40.0
        clean = Field.from_array(np.full(10 ** 4, level))
        noisy, _ = corrupt(clean, NoiseSpec("gaussian", 15.0, seed=5))
        beta = gaussian_beta(clean, 15.0)
        assert np.var(noisy.values) == pytest.approx(beta * level, rel=0.05)

    def test_zero_samples_stay_noise_free(self):
        clean = Field.from_array(np.array([0.0, 10.0, 0.0, 20.0]))
        for model in ("poisson", "gaussian"):
            noisy, _ = corrupt(clean, NoiseSpec(model, 10.0, seed=0))
            assert noisy.values[0] == 0.0 and noisy.values[2] == 0.0

    def test_negative_input(self):
        with pytest.raises(ValueError):
            corrupt(Field.from_array(np.array([1.0, -1.0])), NoiseSpec("poisson"))

    def test_all_zero_input(self):
        with pytest.raises(ValueError):
            corrupt(Field.from_array(np.zeros(8)), NoiseSpec("gaussian"))

    def test_unknown_model(self):
        with pytest.raises(ValueError):
            NoiseSpec("speckle")
