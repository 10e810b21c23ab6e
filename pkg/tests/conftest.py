import os
import sys

import numpy as np
import pytest

# Make the package importable without installation
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from quantum_basis.models import Field  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_signal(rng):
    return Field.from_array(rng.uniform(0.0, 10.0, size=48))


@pytest.fixture
def random_image(rng):
    return Field.from_array(rng.uniform(0.0, 10.0, size=(5, 7)))


def dense_stencil_oracle(values: np.ndarray, ratio: float, boundary: str, one_dimensional: bool = False) -> np.ndarray:
    """Brute-force H built cell by cell from the stencil definition."""
    grid = np.atleast_2d(np.asarray(values, dtype=np.float64))
    n_rows, n_cols = grid.shape
    H = np.zeros((n_rows * n_cols, n_rows * n_cols))
    for i in range(n_rows):
        for j in range(n_cols):
            k = i * n_cols + j
            neighbours = [(a, b) for a, b in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1))
                          if 0 <= a < n_rows and 0 <= b < n_cols]
            for a, b in neighbours:
                H[k, a * n_cols + b] = -ratio
            if boundary == "graph_laplacian" or one_dimensional:
                c = len(neighbours)
            elif i in (0, n_rows - 1):
                c = 2
            elif j in (0, n_cols - 1):
                c = 3
            else:
                c = 4
            H[k, k] = grid[i, j] + c * ratio
    return H


@pytest.fixture
def stencil_oracle():
    return dense_stencil_oracle
