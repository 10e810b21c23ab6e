"""
Symmetric eigendecomposition of the Hamiltonian.

Bases are returned highest eigenvalue first, each eigenvector signed so that
its component of largest magnitude is positive (lowest index on ties).
"""
import logging
from typing import Optional

import numpy as np
import pandas as pd
import scipy.linalg as la
from scipy.sparse.linalg import eigsh, ArpackNoConvergence

from .constants import DENSE_LIMIT, LANCZOS_MAX_ITER, LANCZOS_TOL, Which
from .models import EigenBasis, HamiltonianMatrix
from .audit import audit_logger

logger = logging.getLogger(__name__)

# Fixed start vector seed for the Lanczos iteration (reproducible runs)
_START_VECTOR_SEED = 20240229


class DenseLimitError(ValueError):
    """The matrix is too large for the dense path; use eig_partial."""


class EigenConvergenceError(RuntimeError):
    """The eigensolver did not converge. residuals holds the best residual norms found."""

    def __init__(self, message: str, residuals: Optional[np.ndarray] = None, iterations: Optional[int] = None):
        super().__init__(message)
        self.residuals = residuals
        self.iterations = iterations


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of every column positive."""
    vectors = np.array(vectors, dtype=np.float64, copy=True)
    if vectors.size == 0:
        return vectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _descending(eigenvalues: np.ndarray, vectors: np.ndarray):
    order = np.argsort(-eigenvalues, kind="stable")
    return eigenvalues[order], vectors[:, order]


def residual_norms(H: HamiltonianMatrix, basis: EigenBasis) -> np.ndarray:
    """||H psi_i - lambda_i psi_i||_2 for every stored pair."""
    hv = H.matrix @ basis.vectors
    return np.linalg.norm(hv - basis.vectors * basis.eigenvalues, axis=0)


def eig_full(H: HamiltonianMatrix, dense_limit: int = DENSE_LIMIT) -> EigenBasis:
    """All D eigenpairs via LAPACK (tridiagonalization + implicit QR/divide-and-conquer)."""
    if H.dim > dense_limit:
        raise DenseLimitError(
            f"H.dim={H.dim} exceeds the dense limit {dense_limit}; use eig_partial for large grids"
        )
    try:
        values, vectors = la.eigh(H.matrix.toarray())
    except la.LinAlgError as e:
        raise EigenConvergenceError(f"Dense eigensolver failed to converge: {e}") from e

    values, vectors = _descending(values, vectors)
    basis = EigenBasis(dim=H.dim, vectors=fix_signs(vectors), eigenvalues=values, end="full")

    audit_logger.log_calculation(
        context="Dense eigendecomposition",
        formula="H = sum_i lambda_i psi_i psi_i^T",
        variables={"dim": H.dim},
        result=f"lambda in [{values[-1]:.6g}, {values[0]:.6g}]",
    )
    logger.debug(f"eig_full: dim={H.dim}, spectrum [{values[-1]:.6g}, {values[0]:.6g}]")
    return basis


def eig_partial(H: HamiltonianMatrix, m: int, which: Which = "lowest",
                max_iter: int = LANCZOS_MAX_ITER, tol: float = LANCZOS_TOL) -> EigenBasis:
    """
    m eigenpairs from one end of the spectrum via implicitly restarted Lanczos (ARPACK).
    ARPACK needs m < D - 1 Lanczos targets; larger requests are served by the
    dense solver restricted to the requested index range.
    """
    if not 1 <= m <= H.dim:
        raise ValueError(f"m must be in [1, {H.dim}], got {m}")
    if which not in ("lowest", "highest"):
        raise ValueError(f"which must be 'lowest' or 'highest', got {which}")

    end = "full" if m == H.dim else which
    if m >= H.dim - 1:
        lo, hi = (0, m - 1) if which == "lowest" else (H.dim - m, H.dim - 1)
        try:
            values, vectors = la.eigh(H.matrix.toarray(), subset_by_index=[lo, hi])
        except la.LinAlgError as e:
            raise EigenConvergenceError(f"Dense eigensolver failed to converge: {e}") from e
    else:
        v0 = np.random.default_rng(_START_VECTOR_SEED).standard_normal(H.dim)
        try:
            values, vectors = eigsh(
                H.matrix, k=m, which="SA" if which == "lowest" else "LA",
                v0=v0, maxiter=max_iter, tol=tol,
            )
        except ArpackNoConvergence as e:
            residuals = None
            if e.eigenvectors is not None and e.eigenvectors.size:
                residuals = np.linalg.norm(
                    H.matrix @ e.eigenvectors - e.eigenvectors * e.eigenvalues, axis=0
                )
            raise EigenConvergenceError(
                f"Lanczos did not converge within {max_iter} iterations "
                f"({len(e.eigenvalues)} of {m} pairs converged)",
                residuals=residuals, iterations=max_iter,
            ) from e

    values, vectors = _descending(values, vectors)
    basis = EigenBasis(dim=H.dim, vectors=fix_signs(vectors), eigenvalues=values, end=end)
    worst = float(residual_norms(H, basis).max())

    audit_logger.log_calculation(
        context="Partial eigendecomposition",
        formula=f"{m} extremal pairs ({which}) of H",
        variables={"dim": H.dim, "m": m, "which": which},
        result=worst,
        unit="max residual",
    )
    logger.debug(f"eig_partial: dim={H.dim}, m={m}, which={which}, max residual={worst:.3g}")
    return basis


def decompose(H: HamiltonianMatrix, count: Optional[int] = None, which: Which = "lowest",
              dense_limit: int = DENSE_LIMIT) -> EigenBasis:
    """
    Full decomposition when count is None, partial otherwise. Within the dense
    limit, requests for more than a quarter of the spectrum use the dense solver.
    """
    if count is None:
        return eig_full(H, dense_limit=dense_limit)
    if H.dim <= dense_limit and 4 * count > H.dim:
        return eig_full(H, dense_limit=dense_limit)
    return eig_partial(H, min(max(count, 1), H.dim), which)


def dump_eigenpairs(basis: EigenBasis, path: str) -> None:
    """CSV with header: index, eigenvalue, v1..vD (one row per eigenpair, stored order)."""
    frame = pd.DataFrame(basis.vectors.T, columns=[f"v{k + 1}" for k in range(basis.dim)])
    frame.insert(0, "eigenvalue", basis.eigenvalues)
    frame.insert(0, "index", np.arange(1, basis.count + 1))
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
