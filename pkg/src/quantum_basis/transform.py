"""
Projection onto the adaptive basis, index-ramp thresholding and reconstruction.

Ranks are 1-based. With ranking='descending' rank 1 is the stored first vector
(highest eigenvalue); with ranking='ascending' rank 1 is the lowest eigenvalue.
"""
import logging
from typing import Optional

import numpy as np
import pandas as pd

from .models import Coefficients, EigenBasis, Field, ThresholdProfile, DimensionMismatchError
from .audit import audit_logger

logger = logging.getLogger(__name__)


def project(basis: EigenBasis, x: Field) -> Coefficients:
    """alpha_i = psi_i . x for every stored eigenvector."""
    if basis.dim != x.size:
        raise DimensionMismatchError(f"Basis dim {basis.dim} != field size {x.size}")
    return Coefficients(alpha=basis.vectors.T @ x.values)


def tau(profile: ThresholdProfile, i: int) -> float:
    if i < 1:
        raise ValueError(f"Rank index is 1-based, got {i}")
    if i <= profile.s:
        return 1.0
    ramp = 1.0 - (i - profile.s) / profile.rho
    return ramp if ramp > 0 else 0.0


def tau_vector(profile: ThresholdProfile, m: int) -> np.ndarray:
    """tau_1..tau_m as an array."""
    ranks = np.arange(1, m + 1, dtype=np.float64)
    ramp = 1.0 - (ranks - profile.s) / profile.rho
    return np.where(ranks <= profile.s, 1.0, np.where(ramp > 0, ramp, 0.0))


def rank_order(basis: EigenBasis, ranking: str) -> np.ndarray:
    """0-based storage index of the vector holding rank 1, 2, ..., count."""
    m = basis.count
    if ranking == "descending":
        if basis.end == "lowest":
            raise ValueError("Descending ranking needs the highest eigenpairs; basis holds the lowest")
        return np.arange(m)
    if ranking == "ascending":
        if basis.end == "highest":
            raise ValueError("Ascending ranking needs the lowest eigenpairs; basis holds the highest")
        return np.arange(m - 1, -1, -1)
    raise ValueError(f"Unknown ranking: {ranking}")


def weights(basis: EigenBasis, profile: ThresholdProfile) -> np.ndarray:
    """tau per stored eigenvector."""
    w = np.empty(basis.count)
    w[rank_order(basis, profile.ranking)] = tau_vector(profile, basis.count)
    return w


def reconstruct(basis: EigenBasis, coeffs: Coefficients, profile: ThresholdProfile,
                like: Optional[Field] = None) -> Field:
    """
    x_hat = sum_i alpha_i tau_i psi_i, shaped like `like` (a 1D signal of length dim
    when no template is given). Only vectors with tau > 0 are summed.
    """
    if coeffs.count != basis.count:
        raise DimensionMismatchError(f"{coeffs.count} coefficients for a basis of {basis.count} vectors")
    if like is not None and like.size != basis.dim:
        raise DimensionMismatchError(f"Template field size {like.size} != basis dim {basis.dim}")

    w = weights(basis, profile)
    keep = np.flatnonzero(w > 0)
    values = basis.vectors[:, keep] @ (coeffs.alpha[keep] * w[keep])

    audit_logger.log_calculation(
        context="Reconstruction",
        formula="x_hat = sum alpha_i * tau_i * psi_i",
        variables={"s": profile.s, "rho": profile.rho, "ranking": profile.ranking},
        result=int(keep.size),
        unit="vectors kept",
    )
    logger.debug(f"Reconstruct: {keep.size}/{basis.count} vectors with tau > 0")
    if like is None:
        return Field("signal_1d", basis.dim, 1, values)
    return like.with_values(values)


def coefficient_table(basis: EigenBasis, coeffs: Coefficients, profile: ThresholdProfile) -> pd.DataFrame:
    """index, eigenvalue, alpha, tau per stored eigenvector (stored order)."""
    return pd.DataFrame({
        "index": np.arange(1, basis.count + 1),
        "eigenvalue": basis.eigenvalues,
        "alpha": coeffs.alpha,
        "tau": weights(basis, profile),
    })
