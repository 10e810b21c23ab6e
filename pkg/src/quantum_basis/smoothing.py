import logging
import math

import numpy as np
from scipy.ndimage import gaussian_filter

from .constants import SMOOTHING_TRUNCATE
from .models import Field
from .audit import audit_logger

logger = logging.getLogger(__name__)


def kernel_radius(sigma: float, truncate: float = SMOOTHING_TRUNCATE) -> int:
    return int(math.ceil(truncate * sigma))


def gaussian_kernel(sigma: float, truncate: float = SMOOTHING_TRUNCATE) -> np.ndarray:
    """Sampled Gaussian on [-radius, radius], renormalized to sum 1."""
    r = kernel_radius(sigma, truncate)
    t = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-0.5 * (t / sigma) ** 2)
    return k / k.sum()


def gaussian_smooth(x: Field, sigma: float, truncate: float = SMOOTHING_TRUNCATE) -> Field:
    """
    Separable Gaussian convolution with edge replication ('nearest').
    The kernel is cut at radius ceil(truncate * sigma) and renormalized.
    """
    if not math.isfinite(sigma) or sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma} (skip the call for no smoothing)")

    radius = kernel_radius(sigma, truncate)
    out = gaussian_filter(x.to_array(), sigma=sigma, mode="nearest", radius=radius)

    audit_logger.log_calculation(
        context="Gaussian pre-smoothing",
        formula="V = G_sigma * x (edge replication)",
        variables={"sigma": sigma, "radius": radius, "shape": x.shape},
        result=float(np.ptp(out)) if out.size else 0.0,
        unit="potential range",
    )
    logger.debug(f"Smoothed {x.kind} {x.shape} with sigma={sigma}, radius={radius}")
    return x.with_values(out)
