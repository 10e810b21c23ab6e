import logging
import math
from typing import Dict, Optional

import numpy as np
from skimage.metrics import structural_similarity

from .constants import SSIM_WIN_SIZE, SSIM_SIGMA, SSIM_K1, SSIM_K2
from .models import Field, require_same_grid
from .noise import snr_db

logger = logging.getLogger(__name__)


def _peak(clean: Field, peak: Optional[float]) -> float:
    value = float(np.max(clean.values)) if peak is None else float(peak)
    if not math.isfinite(value) or value <= 0:
        raise ValueError(f"peak must be positive, got {value}")
    return value


def psnr_db(clean: Field, test: Field, peak: Optional[float] = None) -> float:
    """10*log10(peak^2 / MSE); peak=None uses max(clean). Identical fields return +inf."""
    require_same_grid(clean, test)
    p = _peak(clean, peak)
    mse = float(np.mean((test.values - clean.values) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(p * p / mse)


def ssim(clean: Field, test: Field, peak: Optional[float] = None) -> float:
    """
    Mean SSIM over an 11x11 Gaussian window (sigma 1.5), C1=(K1*peak)^2, C2=(K2*peak)^2,
    averaged over window positions that lie fully inside the image.
    """
    require_same_grid(clean, test)
    if clean.kind != "image_2d":
        raise ValueError("SSIM is defined for 2D images only")
    if min(clean.shape) < SSIM_WIN_SIZE:
        raise ValueError(f"SSIM needs both image dimensions >= {SSIM_WIN_SIZE}, got {clean.shape}")
    p = _peak(clean, peak)
    return float(structural_similarity(
        clean.to_array(), test.to_array(),
        data_range=p, win_size=SSIM_WIN_SIZE, gaussian_weights=True, sigma=SSIM_SIGMA,
        use_sample_covariance=False, K1=SSIM_K1, K2=SSIM_K2,
    ))


def evaluate(clean: Field, test: Field, peak: Optional[float] = None) -> Dict[str, Optional[float]]:
    """PSNR, SNR and SSIM (None for signals) of test against clean."""
    return {
        "psnr_db": psnr_db(clean, test, peak),
        "snr_db": snr_db(clean, test),
        "ssim": ssim(clean, test, peak) if clean.kind == "image_2d" else None,
    }
