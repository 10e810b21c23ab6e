from typing import Union

import numpy as np
from scipy.linalg import subspace_angles

from ..models import Field
from ..baselines import total_variation as _tv

ArrayOrField = Union[np.ndarray, Field]


def _values(x: ArrayOrField) -> np.ndarray:
    if isinstance(x, Field):
        return x.to_array()
    return np.asarray(x, dtype=np.float64)


def inverse_participation_ratio(psi: np.ndarray) -> float:
    """sum psi^4 of the normalized vector; 1 = fully localized, 1/D = fully spread."""
    v = np.asarray(psi, dtype=np.float64).reshape(-1)
    v = v / np.linalg.norm(v)
    return float(np.sum(v ** 4))


def zero_crossing_rate(x: ArrayOrField, remove_mean: bool = False) -> float:
    """Sign changes per sample step of a 1D sequence (zeros do not count as a sign)."""
    v = _values(x).reshape(-1)
    if v.size < 2:
        return 0.0
    if remove_mean:
        v = v - v.mean()
    s = np.sign(v)
    s = s[s != 0]
    if s.size < 2:
        return 0.0
    return float(np.count_nonzero(s[1:] != s[:-1])) / (v.size - 1)


def total_variation(x: ArrayOrField) -> float:
    """Isotropic total variation of a signal or image."""
    return _tv(_values(x))


def principal_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Principal angles (radians, descending) between the column spans of a and b."""
    return subspace_angles(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))


def local_frequency(potential: ArrayOrField, energy: float, ratio: float) -> np.ndarray:
    """
    Local wave number sqrt((E - V)/ratio) in classically allowed cells, 0 elsewhere.
    Lower potential at fixed energy means faster local oscillation.
    """
    v = _values(potential)
    return np.sqrt(np.clip(energy - v, 0.0, None) / ratio)
