import numpy as np
import pytest
from numpy.testing import assert_array_equal

from quantum_basis.synth import IMAGE_BRIGHT_LEVEL, IMAGE_DARK_LEVEL, make_signal, make_image
from quantum_basis.utils.calculations import zero_crossing_rate


class TestSignal:

    def test_shape_and_sign(self):
        s = make_signal(256, seed=0)
        assert s.kind == "signal_1d"
        assert s.size == 256
        assert s.values.min() >= 0.0

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_dark_half_oscillates_faster(self, seed):
        v = make_signal(256, seed=seed).values
        slow = zero_crossing_rate(v[:128], remove_mean=True)
        fast = zero_crossing_rate(v[128:], remove_mean=True)
        assert fast >= 4.0 * slow
        assert v[:128].mean() >= 4.0 * v[128:].mean()

    def test_deterministic(self):
        assert_array_equal(make_signal(128, seed=5).values, make_signal(128, seed=5).values)
        assert not np.array_equal(make_signal(128, seed=5).values, make_signal(128, seed=6).values)

    def test_too_short(self):
        with pytest.raises(ValueError):
            make_signal(63)


class TestImage:

    def test_shape_and_sign(self):
        img = make_image(64, seed=0)
        assert img.shape == (64, 64)
        assert img.values.min() >= 0.0

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_bright_side_is_smooth(self, seed):
        a = make_image(64, seed=seed).to_array()
        bright, dark = a[:, :32], a[:, 32:]
        assert bright.mean() >= 4.0 * dark.mean()
        slow = np.mean([zero_crossing_rate(row, remove_mean=True) for row in bright])
        fast = np.mean([zero_crossing_rate(row, remove_mean=True) for row in dark])
        assert fast >= 4.0 * slow

    @pytest.mark.parametrize("n", [32, 64])
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_halves_meet_in_a_ramp(self, n, seed):
        a = make_image(n, seed=seed).to_array()
        step = np.abs(np.diff(a, axis=1)).max()
        assert step < 0.5 * (IMAGE_BRIGHT_LEVEL - IMAGE_DARK_LEVEL)
        # the two columns either side of the edge are strictly between the levels
        middle = a[:, n // 2 - 1: n // 2 + 1].mean(axis=0)
        assert np.all(middle < a[:, : n // 4].mean())
        assert np.all(middle > a[:, 3 * n // 4:].mean())

    def test_deterministic(self):
        assert_array_equal(make_image(32, seed=9).values, make_image(32, seed=9).values)

    def test_too_small(self):
        with pytest.raises(ValueError):
            make_image(31)
