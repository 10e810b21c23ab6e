"""
Comparison denoisers.

fourier_denoise: orthonormal DCT-II (eigenbasis of the Neumann grid Laplacian),
ranked by increasing Laplacian eigenvalue, thresholded with the same index ramp
as the adaptive transform.

tv_denoise: isotropic ROF model min_u 0.5*||u - x||^2 + lam*TV(u), solved through
its dual with monotone fast projected gradient steps.
"""
import logging
from typing import Tuple

import numpy as np
from scipy.fft import dctn, idctn

from .constants import TV_ITERATIONS
from .models import Field, ThresholdProfile
from .transform import tau_vector
from .audit import audit_logger

logger = logging.getLogger(__name__)


# ============================================================================
# FOURIER (DCT) THRESHOLDING
# ============================================================================

def dct_frequencies(shape: Tuple[int, ...]) -> np.ndarray:
    """Neumann Laplacian eigenvalue of every DCT coefficient, row-major flattened."""
    total = np.zeros(shape)
    for axis, n in enumerate(shape):
        k = np.arange(n)
        lam = 4.0 * np.sin(np.pi * k / (2.0 * n)) ** 2
        expand = [np.newaxis] * len(shape)
        expand[axis] = slice(None)
        total = total + lam[tuple(expand)]
    return total.reshape(-1)


def fourier_denoise(x: Field, profile: ThresholdProfile) -> Field:
    """Rank 1 is the constant (lowest frequency) vector regardless of profile.ranking."""
    arr = x.to_array()
    coeffs = dctn(arr, type=2, norm="ortho").reshape(-1)
    order = np.argsort(dct_frequencies(arr.shape), kind="stable")

    w = np.empty(coeffs.size)
    w[order] = tau_vector(profile, coeffs.size)
    out = idctn((coeffs * w).reshape(arr.shape), type=2, norm="ortho")

    logger.debug(f"fourier_denoise: {int(np.count_nonzero(w))}/{w.size} coefficients kept")
    return x.with_values(out)


# ============================================================================
# TOTAL VARIATION
# ============================================================================

def _grad(u: np.ndarray) -> np.ndarray:
    """Forward differences per axis, zero on the last slice; shape (ndim, *u.shape)."""
    out = np.zeros((u.ndim,) + u.shape)
    for axis in range(u.ndim):
        d = np.diff(u, axis=axis)
        index = [axis] + [slice(None)] * u.ndim
        index[axis + 1] = slice(0, u.shape[axis] - 1)
        out[tuple(index)] = d
    return out


def _div(p: np.ndarray) -> np.ndarray:
    """Negative adjoint of _grad."""
    ndim = p.shape[0]
    out = np.zeros(p.shape[1:])
    for axis in range(ndim):
        q = p[axis].copy()
        last = [slice(None)] * ndim
        last[axis] = slice(q.shape[axis] - 1, None)
        q[tuple(last)] = 0.0
        out += np.diff(q, axis=axis, prepend=0.0)
    return out


def _project_unit_ball(p: np.ndarray) -> np.ndarray:
    norm = np.sqrt(np.sum(p * p, axis=0))
    return p / np.maximum(1.0, norm)


def total_variation(u: np.ndarray) -> float:
    """Isotropic TV: sum of gradient magnitudes."""
    g = _grad(np.asarray(u, dtype=np.float64))
    return float(np.sum(np.sqrt(np.sum(g * g, axis=0))))


def tv_objective(u: np.ndarray, x: np.ndarray, lam: float) -> float:
    return 0.5 * float(np.sum((u - x) ** 2)) + lam * total_variation(u)


def tv_denoise_history(x: Field, lam: float, iterations: int = TV_ITERATIONS) -> Tuple[Field, np.ndarray]:
    """
    TV-ROF denoising. Returns the best primal iterate and the primal objective of
    the returned iterate after every iteration (non-increasing).
    """
    if not lam > 0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")

    f = x.to_array()
    step = 1.0 / (4.0 * f.ndim * lam)

    def dual_energy(p):
        return 0.5 * float(np.sum((f + lam * _div(p)) ** 2))

    p = np.zeros((f.ndim,) + f.shape)
    r = p.copy()
    t = 1.0
    best_u = f.copy()
    best_obj = tv_objective(best_u, f, lam)
    history = np.empty(iterations)
    p_energy = dual_energy(p)

    for k in range(iterations):
        z = _project_unit_ball(r + step * _grad(f + lam * _div(r)))
        z_energy = dual_energy(z)
        p_prev = p
        if z_energy <= p_energy:
            p, p_energy = z, z_energy
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        r = p + (t / t_next) * (z - p) + ((t - 1.0) / t_next) * (p - p_prev)
        t = t_next

        u = f + lam * _div(p)
        obj = tv_objective(u, f, lam)
        if obj < best_obj:
            best_u, best_obj = u, obj
        history[k] = best_obj

    audit_logger.log_calculation(
        context="TV-ROF baseline",
        formula="min 0.5*||u-x||^2 + lam*TV(u)",
        variables={"lambda": lam, "iterations": iterations},
        result=best_obj,
        unit="objective",
    )
    logger.debug(f"tv_denoise: lambda={lam:.6g}, {iterations} iterations, objective {best_obj:.6g}")
    return x.with_values(best_u), history


def tv_denoise(x: Field, lam: float, iterations: int = TV_ITERATIONS) -> Field:
    return tv_denoise_history(x, lam, iterations)[0]
