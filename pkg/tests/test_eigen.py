import numpy as np
import pandas as pd
import pytest
import scipy.sparse as sp
from numpy.testing import assert_allclose, assert_array_equal

from quantum_basis.models import Field, HamiltonianMatrix, PlanckMassRatio
from quantum_basis.hamiltonian import build_hamiltonian
from quantum_basis.eigen import (
    DenseLimitError, EigenConvergenceError, eig_full, eig_partial, decompose, dump_eigenpairs,
    fix_signs, residual_norms,
)
from quantum_basis.utils.calculations import principal_angles


def _diagonal_hamiltonian(diag):
    diag = np.asarray(diag, dtype=np.float64)
    return HamiltonianMatrix(
        dim=diag.size, matrix=sp.csr_matrix(np.diag(diag)), ratio=PlanckMassRatio(1.0),
        boundary="graph_laplacian", grid=(1, diag.size),
    )


def _random_hamiltonian(rng, shape, ratio=1.0):
    return build_hamiltonian(Field.from_array(rng.uniform(0.0, 10.0, size=shape)), PlanckMassRatio(ratio))


class TestFull:

    def test_diagonal_matrix_sorted_descending(self):
        basis = eig_full(_diagonal_hamiltonian([3.0, 1.0, 2.0]))
        assert_allclose(basis.eigenvalues, [3.0, 2.0, 1.0])
        assert_allclose(basis.vector(1), [1.0, 0.0, 0.0])
        assert_allclose(basis.vector(2), [0.0, 0.0, 1.0])
        assert_allclose(basis.vector(3), [0.0, 1.0, 0.0])

    def test_path_graph_spectrum(self):
        H = build_hamiltonian(Field.from_array(np.zeros(4)), PlanckMassRatio(1.0))
        expected = np.sort(4.0 * np.sin(np.arange(4) * np.pi / 8.0) ** 2)[::-1]
        assert_allclose(eig_full(H).eigenvalues, expected, atol=1e-12)

    def test_spectral_reconstruction(self, rng):
        H = _random_hamiltonian(rng, (16, 16), ratio=0.8)
        basis = eig_full(H)
        rebuilt = (basis.vectors * basis.eigenvalues) @ basis.vectors.T
        assert np.abs(rebuilt - H.to_dense()).max() <= 1e-8

    def test_orthonormal_with_small_residuals(self, rng):
        H = _random_hamiltonian(rng, (16, 16))
        basis = eig_full(H)
        gram = basis.vectors.T @ basis.vectors
        assert np.abs(gram - np.eye(H.dim)).max() <= 1e-8
        bound = 1e-8 * np.maximum(1.0, np.abs(basis.eigenvalues))
        assert np.all(residual_norms(H, basis) <= bound)

    def test_sign_convention(self, rng):
        basis = eig_full(_random_hamiltonian(rng, (6, 6)))
        pivots = np.argmax(np.abs(basis.vectors), axis=0)
        assert np.all(basis.vectors[pivots, np.arange(basis.count)] > 0)

    def test_constant_shift(self, rng):
        values = rng.uniform(0.0, 10.0, size=30)
        r = PlanckMassRatio(1.0)
        a = eig_full(build_hamiltonian(Field.from_array(values), r))
        b = eig_full(build_hamiltonian(Field.from_array(values + 7.0), r))
        assert_allclose(b.eigenvalues, a.eigenvalues + 7.0, atol=1e-9)
        assert_allclose(b.vectors, a.vectors, atol=1e-7)

    def test_large_ratio_approaches_cosines(self, rng):
        values = rng.uniform(0.0, 10.0, size=32)
        ratio = 1e6 * np.ptp(values)
        basis = eig_full(build_hamiltonian(Field.from_array(values), PlanckMassRatio(ratio)))
        j = np.arange(32)
        cosines = np.stack([np.cos(np.pi * k * (j + 0.5) / 32) for k in range(5)], axis=1)
        lowest = basis.vectors[:, -5:]
        assert principal_angles(lowest, cosines).max() <= 1e-3

    def test_dense_limit(self, rng):
        H = _random_hamiltonian(rng, (3, 3))
        with pytest.raises(DenseLimitError):
            eig_full(H, dense_limit=8)


class TestPartial:

    def test_matches_full_lowest(self, rng):
        H = _random_hamiltonian(rng, 100)
        full = eig_full(H)
        part = eig_partial(H, 10, "lowest")
        assert part.end == "lowest"
        assert part.count == 10
        assert_allclose(part.eigenvalues, full.eigenvalues[-10:], rtol=1e-9)
        overlaps = np.abs(np.sum(part.vectors * full.vectors[:, -10:], axis=0))
        assert_allclose(overlaps, 1.0, atol=1e-6)

    def test_highest_of_diagonal(self):
        basis = eig_partial(_diagonal_hamiltonian(np.arange(1.0, 31.0)), 3, "highest")
        assert basis.end == "highest"
        assert_allclose(basis.eigenvalues, [30.0, 29.0, 28.0])
        assert_allclose(basis.vector(1)[29], 1.0)
        assert_allclose(basis.vector(3)[27], 1.0)

    def test_near_full_request_uses_index_range(self, rng):
        H = _random_hamiltonian(rng, 12)
        basis = eig_partial(H, 11, "lowest")
        assert_allclose(basis.eigenvalues, eig_full(H).eigenvalues[1:], rtol=1e-10)

    def test_whole_spectrum_is_full(self, rng):
        H = _random_hamiltonian(rng, 6)
        assert eig_partial(H, 6).end == "full"

    @pytest.mark.parametrize("m", [0, 7])
    def test_invalid_count(self, rng, m):
        with pytest.raises(ValueError):
            eig_partial(_random_hamiltonian(rng, 6), m)

    def test_invalid_end(self, rng):
        with pytest.raises(ValueError):
            eig_partial(_random_hamiltonian(rng, 20), 2, "middle")

    def test_non_convergence(self, rng):
        H = _random_hamiltonian(rng, 400)
        with pytest.raises(EigenConvergenceError) as err:
            eig_partial(H, 6, "lowest", max_iter=1)
        assert err.value.iterations == 1


class TestDecompose:

    def test_no_count_is_full(self, rng):
        assert decompose(_random_hamiltonian(rng, 10)).end == "full"

    def test_large_request_goes_dense(self, rng):
        assert decompose(_random_hamiltonian(rng, 40), count=20).end == "full"

    def test_small_request_is_partial(self, rng):
        basis = decompose(_random_hamiltonian(rng, 200), count=5)
        assert basis.end == "lowest"
        assert basis.count == 5

    def test_above_dense_limit_stays_partial(self, rng):
        basis = decompose(_random_hamiltonian(rng, 60), count=30, dense_limit=50)
        assert basis.end == "lowest"
        assert basis.count == 30


def test_fix_signs_ties_pick_first_index():
    v = np.array([[-0.5, 0.0], [0.5, -1.0]])
    assert_array_equal(fix_signs(v), [[0.5, 0.0], [-0.5, 1.0]])


def test_dump_eigenpairs(tmp_path):
    basis = eig_full(_diagonal_hamiltonian([2.0, 5.0]))
    path = tmp_path / "eigs.csv"
    dump_eigenpairs(basis, str(path))
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["index", "eigenvalue", "v1", "v2"]
    assert frame["index"].tolist() == [1, 2]
    assert_allclose(frame["eigenvalue"], [5.0, 2.0])
    assert_allclose(frame[["v1", "v2"]].to_numpy(), [[0.0, 1.0], [1.0, 0.0]])
