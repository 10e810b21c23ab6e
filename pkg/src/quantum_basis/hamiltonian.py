"""
Assembly of the discrete Hamiltonian H = V + (hbar^2/2m) * (-Laplacian).

The potential V is the field itself; off-diagonal entries couple grid
neighbours with -ratio. Two diagonal rules are available:

- literal_stencil: coefficient 2 on the whole first and last grid rows, 3 on the
  remaining cells of the first and last columns, 4 elsewhere. The published
  column condition reads "i mod N^2 in {0, 1}"; it is read here as
  "i mod N in {0, 1}" (first/last column), the only reading that selects cells.
- graph_laplacian: coefficient = number of in-grid neighbours (4/3/2), so the
  zero-potential operator is a true graph Laplacian with zero row sums.
"""
import logging

import numpy as np
import scipy.sparse as sp

from .constants import BoundaryMode, BOUNDARY_MODES
from .models import Field, HamiltonianMatrix, PlanckMassRatio, DimensionMismatchError
from .audit import audit_logger

logger = logging.getLogger(__name__)


def neighbour_pairs(n_rows: int, n_cols: int):
    """0-based (a, b) index arrays of horizontal and vertical neighbour pairs, a < b."""
    idx = np.arange(n_rows * n_cols).reshape(n_rows, n_cols)
    a = np.concatenate([idx[:, :-1].ravel(), idx[:-1, :].ravel()])
    b = np.concatenate([idx[:, 1:].ravel(), idx[1:, :].ravel()])
    return a, b


def neighbour_counts(n_rows: int, n_cols: int) -> np.ndarray:
    a, b = neighbour_pairs(n_rows, n_cols)
    return np.bincount(np.concatenate([a, b]), minlength=n_rows * n_cols).astype(np.float64)


def diagonal_coefficients(n_rows: int, n_cols: int, boundary: BoundaryMode,
                          one_dimensional: bool = False) -> np.ndarray:
    """c_k of the diagonal entry x(k) + c_k * ratio, flattened row-major."""
    if boundary not in BOUNDARY_MODES:
        raise ValueError(f"Unknown boundary mode: {boundary}")
    if boundary == "graph_laplacian" or one_dimensional:
        # 1D fields: both modes use the neighbour count (1 at the endpoints)
        return neighbour_counts(n_rows, n_cols)

    c = np.full((n_rows, n_cols), 4.0)
    c[:, 0] = 3.0
    c[:, -1] = 3.0
    c[0, :] = 2.0
    c[-1, :] = 2.0
    return c.ravel()


def _assemble(values: np.ndarray, n_rows: int, n_cols: int, ratio: PlanckMassRatio,
              boundary: BoundaryMode, one_dimensional: bool = False) -> HamiltonianMatrix:
    dim = n_rows * n_cols
    r = ratio.value
    a, b = neighbour_pairs(n_rows, n_cols)
    diag = values + diagonal_coefficients(n_rows, n_cols, boundary, one_dimensional) * r

    k = np.arange(dim)
    rows = np.concatenate([a, b, k])
    cols = np.concatenate([b, a, k])
    data = np.concatenate([np.full(2 * a.size, -r), diag])
    matrix = sp.coo_matrix((data, (rows, cols)), shape=(dim, dim)).tocsr()
    matrix.sort_indices()

    audit_logger.log_calculation(
        context="Hamiltonian assembly",
        formula="H = diag(V + c*r) - r*Adjacency",
        variables={"grid": f"{n_rows}x{n_cols}", "ratio": r, "boundary": boundary},
        result=int(matrix.nnz),
        unit="nonzeros",
    )
    logger.debug(f"Assembled H: dim={dim}, nnz={matrix.nnz}, ratio={r}, boundary={boundary}")
    return HamiltonianMatrix(dim=dim, matrix=matrix, ratio=ratio, boundary=boundary, grid=(n_rows, n_cols))


def build_hamiltonian_2d(field: Field, ratio: PlanckMassRatio,
                         boundary: BoundaryMode = "graph_laplacian") -> HamiltonianMatrix:
    if field.kind != "image_2d":
        raise ValueError(f"build_hamiltonian_2d needs an image, got {field.kind}")
    if not np.all(np.isfinite(field.values)):
        raise ValueError("Potential values must be finite")
    return _assemble(field.values, field.height, field.width, ratio, boundary)


def build_hamiltonian_1d(field: Field, ratio: PlanckMassRatio,
                         boundary: BoundaryMode = "graph_laplacian") -> HamiltonianMatrix:
    if field.kind != "signal_1d":
        raise ValueError(f"build_hamiltonian_1d needs a signal, got {field.kind}")
    if not np.all(np.isfinite(field.values)):
        raise ValueError("Potential values must be finite")
    return _assemble(field.values, 1, field.width, ratio, boundary, one_dimensional=True)


def build_hamiltonian(field: Field, ratio: PlanckMassRatio,
                      boundary: BoundaryMode = "graph_laplacian") -> HamiltonianMatrix:
    """Dispatch on the field kind."""
    if field.kind == "signal_1d":
        return build_hamiltonian_1d(field, ratio, boundary)
    return build_hamiltonian_2d(field, ratio, boundary)


def apply(H: HamiltonianMatrix, v) -> np.ndarray:
    """Sparse mat-vec H @ v. The matrix is never mutated, so concurrent calls are safe."""
    vec = np.asarray(v, dtype=np.float64)
    if vec.shape != (H.dim,):
        raise DimensionMismatchError(f"Vector of shape {vec.shape} does not match H.dim={H.dim}")
    return H.matrix @ vec


def dump_coordinates(H: HamiltonianMatrix, path: str) -> None:
    """Write 'row col value' lines (1-based), row-major, for external cross-checks."""
    coo = H.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{r + 1} {c + 1} {v:.17g}\n")
