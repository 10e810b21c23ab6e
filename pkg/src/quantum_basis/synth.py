"""
Synthetic test data whose local frequency is anti-correlated with amplitude:
bright regions oscillate slowly, dark regions oscillate fast.
"""
import logging

import numpy as np

from .constants import DEFAULT_SIGNAL_LENGTH, DEFAULT_IMAGE_SIDE, MIN_SIGNAL_LENGTH, MIN_IMAGE_SIDE
from .models import Field

logger = logging.getLogger(__name__)

# Signal: first half bright/slow, second half dark/fast
SIGNAL_HIGH_LEVEL = 120.0
SIGNAL_HIGH_SWING = 60.0
SIGNAL_LOW_LEVEL = 20.0
SIGNAL_LOW_SWING = 12.0
SIGNAL_SLOW_CYCLES = 2.0
SIGNAL_FAST_CYCLES = 14.0

# Image: left half bright/slow, right half dark textured, joined by a logistic edge
IMAGE_BRIGHT_LEVEL = 160.0
IMAGE_BRIGHT_SWING = 20.0
IMAGE_DARK_LEVEL = 25.0
IMAGE_DARK_SWING = 12.0
IMAGE_SLOW_CYCLES = 1.0
IMAGE_FAST_CYCLES = 8.0
IMAGE_EDGE_WIDTH = 1.5  # pixels

FREQUENCY_JITTER = 0.10
AMPLITUDE_JITTER = 0.10


def _fast_cycles(half: int, nominal: float) -> float:
    # at least 4 samples per period
    return min(nominal, half / 4.0)


def make_signal(n: int = DEFAULT_SIGNAL_LENGTH, seed: int = 0) -> Field:
    """Non-negative 1D signal: slow high-amplitude half followed by a fast low-amplitude half."""
    if n < MIN_SIGNAL_LENGTH:
        raise ValueError(f"Signal length must be >= {MIN_SIGNAL_LENGTH}, got {n}")
    rng = np.random.default_rng(seed)
    half = n // 2
    jitter_f = 1.0 + rng.uniform(-FREQUENCY_JITTER, FREQUENCY_JITTER, size=2)
    jitter_a = 1.0 + rng.uniform(-AMPLITUDE_JITTER, AMPLITUDE_JITTER, size=2)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=2)

    t_high = np.arange(half) / half
    t_low = np.arange(n - half) / (n - half)
    slow = SIGNAL_SLOW_CYCLES * jitter_f[0]
    fast = _fast_cycles(n - half, SIGNAL_FAST_CYCLES) * jitter_f[1]

    high = SIGNAL_HIGH_LEVEL * jitter_a[0] + SIGNAL_HIGH_SWING * np.sin(2 * np.pi * slow * t_high + phases[0])
    low = SIGNAL_LOW_LEVEL * jitter_a[1] + SIGNAL_LOW_SWING * np.sin(2 * np.pi * fast * t_low + phases[1])
    values = np.clip(np.concatenate([high, low]), 0.0, None)

    logger.debug(f"make_signal: n={n}, seed={seed}, cycles {slow:.2f}/{fast:.2f}")
    return Field.from_array(values)


def make_image(n: int = DEFAULT_IMAGE_SIDE, seed: int = 0) -> Field:
    """
    n x n image: bright slowly varying left half, dark high-frequency texture on
    the right half. The halves meet in a logistic ramp a few pixels wide.
    """
    if n < MIN_IMAGE_SIDE:
        raise ValueError(f"Image side must be >= {MIN_IMAGE_SIDE}, got {n}")
    rng = np.random.default_rng(seed)
    half = n // 2
    jitter_f = 1.0 + rng.uniform(-FREQUENCY_JITTER, FREQUENCY_JITTER, size=4)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=3)

    yy, xx = np.mgrid[0:n, 0:n].astype(np.float64)
    slow_x = IMAGE_SLOW_CYCLES * jitter_f[0] / half
    slow_y = IMAGE_SLOW_CYCLES * jitter_f[1] / n
    fast_x = _fast_cycles(n - half, IMAGE_FAST_CYCLES) * jitter_f[2] / (n - half)
    fast_y = _fast_cycles(n, 2 * IMAGE_FAST_CYCLES) * jitter_f[3] / n

    bright = IMAGE_BRIGHT_LEVEL + IMAGE_BRIGHT_SWING * np.sin(
        2 * np.pi * (slow_x * xx + slow_y * yy) + phases[0]
    )
    dark = (IMAGE_DARK_LEVEL
            + IMAGE_DARK_SWING * np.sin(2 * np.pi * fast_x * xx + phases[1])
            + 0.5 * IMAGE_DARK_SWING * np.sin(2 * np.pi * fast_y * yy + phases[2]))
    # 1 on the bright side, 0 on the dark side; centred between columns half-1 and half
    weight = 0.5 * (1.0 - np.tanh((xx - (half - 0.5)) / (2.0 * IMAGE_EDGE_WIDTH)))
    image = weight * bright + (1.0 - weight) * dark
    image = np.clip(image, 0.0, None)

    logger.debug(f"make_image: n={n}, seed={seed}")
    return Field.from_array(image)
