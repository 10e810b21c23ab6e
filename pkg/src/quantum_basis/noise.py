"""
Signal-dependent corruption models with SNR targeting.

Random draws come from numpy's Generator with the PCG64 bit generator
(np.random.default_rng(seed)); the same seed and input give bit-identical output
for a given numpy release.
"""
import logging
import math
from typing import Tuple

import numpy as np
from scipy.optimize import brentq

from .models import Field, NoiseSpec, require_same_grid
from .audit import audit_logger

logger = logging.getLogger(__name__)

# Search interval for log(a), centered on the closed-form scale
_LOG_SCALE_SPAN = 50.0


def snr_db(clean: Field, other: Field) -> float:
    """
    10*log10(sum clean^2 / sum (other - clean)^2).
    Identical fields return +inf.
    """
    require_same_grid(clean, other)
    noise_energy = float(np.sum((other.values - clean.values) ** 2))
    signal_energy = float(np.sum(clean.values ** 2))
    if noise_energy == 0.0:
        return math.inf
    if signal_energy == 0.0:
        return -math.inf
    return 10.0 * math.log10(signal_energy / noise_energy)


def expected_poisson_snr_db(x: Field, scale: float) -> float:
    """Expected SNR of Poisson(scale*x)/scale: per-sample noise variance is x/scale."""
    return 10.0 * math.log10(scale * float(np.sum(x.values ** 2)) / float(np.sum(x.values)))


def poisson_scale(x: Field, target_snr_db: float) -> float:
    """Scale a > 0 whose expected SNR equals the target, found by bracketed root search on log(a)."""
    sum_sq = float(np.sum(x.values ** 2))
    total = float(np.sum(x.values))
    center = math.log(10.0 ** (target_snr_db / 10.0) * total / sum_sq)

    def gap(log_a: float) -> float:
        return 10.0 * math.log10(math.exp(log_a) * sum_sq / total) - target_snr_db

    log_a = brentq(gap, center - _LOG_SCALE_SPAN, center + _LOG_SCALE_SPAN, xtol=1e-14, rtol=1e-15)
    return math.exp(log_a)


def gaussian_beta(x: Field, target_snr_db: float) -> float:
    """beta with noise variance beta*x_k and expected SNR equal to the target."""
    return float(np.sum(x.values ** 2)) / (float(np.sum(x.values)) * 10.0 ** (target_snr_db / 10.0))


def _check_input(x: Field) -> None:
    if np.any(x.values < 0):
        raise ValueError("Signal-dependent noise needs non-negative values")
    if not np.any(x.values > 0):
        raise ValueError("Cannot corrupt an all-zero field: SNR is undefined")


def corrupt(x: Field, spec: NoiseSpec) -> Tuple[Field, float]:
    """
    Returns the noisy field and its empirical SNR in dB.
    - poisson: y = Poisson(a*x)/a
    - gaussian: y = x + n, n_k ~ Normal(0, beta*x_k)
    """
    _check_input(x)
    rng = np.random.default_rng(spec.seed)

    if spec.model == "poisson":
        a = poisson_scale(x, spec.target_snr_db)
        noisy_values = rng.poisson(a * x.values).astype(np.float64) / a
        param_name, param = "a", a
    elif spec.model == "gaussian":
        beta = gaussian_beta(x, spec.target_snr_db)
        noisy_values = x.values + rng.normal(0.0, 1.0, size=x.size) * np.sqrt(beta * x.values)
        param_name, param = "beta", beta
    else:
        raise ValueError(f"Unknown noise model: {spec.model}")

    noisy = x.with_values(noisy_values)
    achieved = snr_db(x, noisy)

    audit_logger.log_calculation(
        context=f"Noise ({spec.model})",
        formula="SNR = 10*log10(sum x^2 / sum (y-x)^2)",
        variables={"target_db": spec.target_snr_db, param_name: param, "seed": spec.seed},
        result=achieved,
        unit="dB",
    )
    logger.debug(f"Corrupted with {spec.model} ({param_name}={param:.6g}), SNR {achieved:.3f} dB")
    return noisy, achieved
