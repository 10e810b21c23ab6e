import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from quantum_basis.models import Field, PlanckMassRatio, ThresholdProfile, Coefficients, DimensionMismatchError
from quantum_basis.hamiltonian import build_hamiltonian
from quantum_basis.eigen import eig_full, eig_partial
from quantum_basis.transform import (
    project, tau, tau_vector, rank_order, weights, reconstruct, coefficient_table,
)
from quantum_basis.utils.calculations import zero_crossing_rate, local_frequency


@pytest.fixture
def image_basis(random_image):
    return eig_full(build_hamiltonian(random_image, PlanckMassRatio(1.5)))


class TestThresholdProfile:

    def test_ramp_values(self):
        p = ThresholdProfile(s=3, rho=2)
        assert [tau(p, i) for i in range(1, 7)] == [1.0, 1.0, 1.0, 0.5, 0.0, 0.0]
        assert p.support() == 4

    def test_empty_profile(self):
        p = ThresholdProfile(s=0, rho=1)
        assert tau(p, 1) == 0.0
        assert p.support() == 0

    def test_fractional_step(self):
        p = ThresholdProfile(s=10, rho=4)
        assert tau(p, 12) == 0.5
        assert tau(p, 14) == 0.0
        assert p.support() == 13

    @pytest.mark.parametrize("s, rho", [(0, 0.5), (2, 1.0), (5, 2.5), (7, 7.0)])
    def test_vector_matches_scalar(self, s, rho):
        p = ThresholdProfile(s=s, rho=rho)
        expected = [tau(p, i) for i in range(1, 21)]
        assert_array_equal(tau_vector(p, 20), expected)
        assert int(np.count_nonzero(tau_vector(p, 40))) == p.support()

    def test_rank_is_one_based(self):
        with pytest.raises(ValueError):
            tau(ThresholdProfile(s=1, rho=1), 0)

    @pytest.mark.parametrize("s, rho, ranking", [(-1, 1.0, "ascending"), (1, 0.0, "ascending"), (1, 1.0, "sideways")])
    def test_invalid(self, s, rho, ranking):
        with pytest.raises(ValueError):
            ThresholdProfile(s=s, rho=rho, ranking=ranking)


class TestProjection:

    def test_eigenvector_projects_to_unit_vector(self, image_basis, random_image):
        coeffs = project(image_basis, random_image.with_values(image_basis.vector(3)))
        expected = np.zeros(image_basis.count)
        expected[2] = 1.0
        assert_allclose(coeffs.alpha, expected, atol=1e-10)

    def test_energy_preserved(self, image_basis, random_image):
        coeffs = project(image_basis, random_image)
        assert_allclose(np.sum(coeffs.alpha ** 2), np.sum(random_image.values ** 2), rtol=1e-10)

    def test_size_mismatch(self, image_basis):
        with pytest.raises(DimensionMismatchError):
            project(image_basis, Field.from_array(np.ones(image_basis.dim + 1)))


class TestReconstruction:

    def test_keep_everything_is_identity(self, image_basis, random_image):
        p = ThresholdProfile(s=image_basis.dim, rho=1)
        out = reconstruct(image_basis, project(image_basis, random_image), p, like=random_image)
        assert out.shape == random_image.shape
        assert_allclose(out.values, random_image.values, atol=1e-9 * np.abs(random_image.values).max())

    def test_keep_nothing_is_zero(self, image_basis, random_image):
        out = reconstruct(image_basis, project(image_basis, random_image), ThresholdProfile(s=0, rho=1))
        assert out.kind == "signal_1d"
        assert_array_equal(out.values, 0.0)

    @pytest.mark.parametrize("s, rho", [(3, 2.0), (10, 5.0), (20, 0.5)])
    def test_never_increases_energy(self, image_basis, random_image, s, rho):
        p = ThresholdProfile(s=s, rho=rho)
        out = reconstruct(image_basis, project(image_basis, random_image), p)
        assert np.linalg.norm(out.values) <= np.linalg.norm(random_image.values) + 1e-12

    def test_linear(self, image_basis, random_image, rng):
        p = ThresholdProfile(s=6, rho=3.0)
        y = random_image.with_values(rng.normal(size=random_image.size))
        combo = random_image.with_values(2.0 * random_image.values - 3.0 * y.values)

        def run(f):
            return reconstruct(image_basis, project(image_basis, f), p).values

        assert_allclose(run(combo), 2.0 * run(random_image) - 3.0 * run(y), atol=1e-10)

    def test_hard_cut_is_idempotent(self, image_basis, random_image):
        p = ThresholdProfile(s=8, rho=1)
        once = reconstruct(image_basis, project(image_basis, random_image), p, like=random_image)
        twice = reconstruct(image_basis, project(image_basis, once), p, like=random_image)
        assert_allclose(twice.values, once.values, atol=1e-10)

    def test_coefficient_count_mismatch(self, image_basis):
        with pytest.raises(DimensionMismatchError):
            reconstruct(image_basis, Coefficients(alpha=np.ones(3)), ThresholdProfile(s=1, rho=1))

    def test_template_size_mismatch(self, image_basis, random_image):
        coeffs = project(image_basis, random_image)
        with pytest.raises(DimensionMismatchError):
            reconstruct(image_basis, coeffs, ThresholdProfile(s=1, rho=1), like=Field.from_array(np.ones(4)))


class TestRanking:

    def test_ascending_puts_lowest_first(self, image_basis):
        w = weights(image_basis, ThresholdProfile(s=2, rho=1))
        assert w[-1] == 1.0 and w[-2] == 1.0
        assert np.count_nonzero(w) == 2

    def test_descending_puts_highest_first(self, image_basis):
        w = weights(image_basis, ThresholdProfile(s=2, rho=1, ranking="descending"))
        assert w[0] == 1.0 and w[1] == 1.0
        assert np.count_nonzero(w) == 2

    def test_partial_lowest_needs_ascending(self, rng):
        H = build_hamiltonian(Field.from_array(rng.uniform(0, 5, size=60)), PlanckMassRatio(1.0))
        basis = eig_partial(H, 5, "lowest")
        assert_array_equal(rank_order(basis, "ascending"), [4, 3, 2, 1, 0])
        with pytest.raises(ValueError):
            rank_order(basis, "descending")

    def test_partial_highest_needs_descending(self, rng):
        H = build_hamiltonian(Field.from_array(rng.uniform(0, 5, size=60)), PlanckMassRatio(1.0))
        basis = eig_partial(H, 5, "highest")
        assert_array_equal(rank_order(basis, "descending"), [0, 1, 2, 3, 4])
        with pytest.raises(ValueError):
            rank_order(basis, "ascending")

    def test_partial_basis_reconstructs_like_full(self, rng):
        f = Field.from_array(rng.uniform(0, 5, size=80))
        H = build_hamiltonian(f, PlanckMassRatio(2.0))
        p = ThresholdProfile(s=4, rho=3.0)
        full, part = eig_full(H), eig_partial(H, p.support(), "lowest")
        a = reconstruct(full, project(full, f), p).values
        b = reconstruct(part, project(part, f), p).values
        assert_allclose(a, b, atol=1e-7)

    def test_coefficient_table(self, image_basis, random_image):
        p = ThresholdProfile(s=1, rho=2.0)
        table = coefficient_table(image_basis, project(image_basis, random_image), p)
        assert list(table.columns) == ["index", "eigenvalue", "alpha", "tau"]
        assert len(table) == image_basis.count
        assert table["tau"].iloc[-1] == 1.0
        assert table["tau"].iloc[-2] == 0.5


def test_low_potential_oscillates_faster():
    # Staircase potential: 0 on the left half, 1 on the right half
    n = 200
    potential = np.where(np.arange(n) < n // 2, 0.0, 1.0)
    H = build_hamiltonian(Field.from_array(potential), PlanckMassRatio(1.0), "graph_laplacian")
    basis = eig_full(H)
    i = int(np.argmin(np.abs(basis.eigenvalues - 1.5)))
    psi = basis.vectors[:, i]
    zcr_low = zero_crossing_rate(psi[: n // 2])
    zcr_high = zero_crossing_rate(psi[n // 2:])
    assert zcr_low > 1.5 * zcr_high

    k = local_frequency(potential, basis.eigenvalues[i], 1.0)
    assert k[0] > k[-1] > 0


def test_energy_between_plateaus_is_confined_to_low_side():
    n = 200
    potential = np.where(np.arange(n) < n // 2, 0.0, 1.0)
    H = build_hamiltonian(Field.from_array(potential), PlanckMassRatio(1.0), "graph_laplacian")
    basis = eig_full(H)
    i = int(np.argmin(np.abs(basis.eigenvalues - 0.5)))
    energy = basis.eigenvalues[i]
    assert 0.0 < energy < 1.0
    psi = basis.vectors[:, i]
    # decays monotonically past the step; window stays well above round-off
    tail = psi[n // 2: n // 2 + 20]
    assert zero_crossing_rate(tail) == 0.0
    assert np.all(np.diff(np.abs(tail)) < 0)
    assert np.abs(tail[-1]) < 1e-3 * np.abs(psi[: n // 2]).max()
    assert zero_crossing_rate(psi[: n // 2]) > 0.1

    k = local_frequency(potential, energy, 1.0)
    assert np.all(k[: n // 2] > 0)
    assert np.all(k[n // 2:] == 0)
