import os
from dataclasses import dataclass, field, asdict
from typing import Dict, List, Optional, Tuple

import math
import numpy as np
import scipy.sparse as sp

from .constants import (
    DEFAULT_IMAGE_SIDE, DEFAULT_SIGNAL_LENGTH, TARGET_SNR_DB, TV_ITERATIONS,
    GRID_RATIO_FACTORS, GRID_SIGMAS, GRID_S_FRACTIONS, GRID_RHO_FACTORS, GRID_TV_LAMBDA_FACTORS,
    FieldKind, BoundaryMode, EigenEnd, Ranking, NoiseModel, Method, EigenMode,
    BOUNDARY_MODES, RANKINGS, NOISE_MODELS, EIGEN_MODES,
)


class DimensionMismatchError(ValueError):
    """Raised when two operands do not share the same grid or dimension."""


@dataclass(frozen=True, eq=False)
class Field:
    """
    A 1D signal or 2D grayscale image.
    values are stored flat, row-major, length width*height (height is 1 for signals).
    """
    kind: FieldKind
    width: int
    height: int
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in ("signal_1d", "image_2d"):
            raise ValueError(f"Unknown field kind: {self.kind}")
        if self.width < 1 or self.height < 1:
            raise ValueError(f"Field dimensions must be positive, got {self.width}x{self.height}")
        if self.kind == "signal_1d" and self.height != 1:
            raise ValueError("A 1D signal has height 1")
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        if values.size != self.width * self.height:
            raise ValueError(
                f"values length {values.size} != width*height = {self.width * self.height}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("Field values must be finite (no NaN/Inf)")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_array(cls, array) -> "Field":
        """Build a Field from a 1D (signal) or 2D (rows x cols image) array."""
        arr = np.asarray(array, dtype=np.float64)
        if arr.ndim == 1:
            return cls("signal_1d", arr.size, 1, arr)
        if arr.ndim == 2:
            return cls("image_2d", arr.shape[1], arr.shape[0], arr.reshape(-1))
        raise ValueError(f"Only 1D or 2D arrays are supported, got ndim={arr.ndim}")

    @property
    def size(self) -> int:
        return self.width * self.height

    @property
    def shape(self) -> Tuple[int, ...]:
        if self.kind == "signal_1d":
            return (self.width,)
        return (self.height, self.width)

    def to_array(self) -> np.ndarray:
        """Writable copy shaped (width,) or (height, width)."""
        return self.values.reshape(self.shape).copy()

    def with_values(self, values) -> "Field":
        """Same grid, new samples."""
        return Field(self.kind, self.width, self.height, np.asarray(values, dtype=np.float64).reshape(-1))

    def transpose(self) -> "Field":
        if self.kind == "signal_1d":
            return self
        return Field.from_array(self.to_array().T)

    def same_grid(self, other: "Field") -> bool:
        return self.kind == other.kind and self.width == other.width and self.height == other.height


def require_same_grid(a: Field, b: Field) -> None:
    if not a.same_grid(b):
        raise DimensionMismatchError(f"Field shapes differ: {a.shape} vs {b.shape}")


@dataclass(frozen=True)
class GridIndexMap:
    """
    Row-major bijection between (i, j), 1 <= i <= n_rows, 1 <= j <= n_cols,
    and the linear Hamiltonian index k = (i-1)*n_cols + j.
    """
    n_rows: int
    n_cols: int

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError(f"Grid dimensions must be positive, got {self.n_rows}x{self.n_cols}")

    @property
    def size(self) -> int:
        return self.n_rows * self.n_cols


@dataclass(frozen=True)
class PlanckMassRatio:
    """The free parameter hbar^2/2m (intensity x squared grid spacing, spacing = 1)."""
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value <= 0:
            raise ValueError(f"hbar^2/2m must be positive and finite, got {self.value}")


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    """
    Sparse symmetric H = V + ratio * (-Laplacian).
    - dim: D = width for signals, n_rows*n_cols for images
    - matrix: CSR storage, read-only after assembly
    - grid: (n_rows, n_cols) of the source field
    """
    dim: int
    matrix: sp.csr_matrix
    ratio: PlanckMassRatio
    boundary: BoundaryMode
    grid: Tuple[int, int]

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()


@dataclass(frozen=True, eq=False)
class EigenBasis:
    """
    Orthonormal eigenvectors (columns of `vectors`, D x m) with their eigenvalues,
    sorted from the highest to the lowest eigenvalue.
    `end` tells which part of the spectrum a partial basis covers.
    """
    dim: int
    vectors: np.ndarray
    eigenvalues: np.ndarray
    end: EigenEnd = "full"

    def __post_init__(self):
        if self.vectors.shape != (self.dim, self.eigenvalues.size):
            raise DimensionMismatchError(
                f"vectors shape {self.vectors.shape} inconsistent with dim={self.dim}, "
                f"count={self.eigenvalues.size}"
            )
        if np.any(np.diff(self.eigenvalues) > 0):
            raise ValueError("Eigenvalues must be sorted non-increasing")
        if self.end == "full" and self.eigenvalues.size != self.dim:
            raise ValueError("A full basis holds dim eigenpairs")
        self.vectors.setflags(write=False)
        self.eigenvalues.setflags(write=False)

    @property
    def count(self) -> int:
        return int(self.eigenvalues.size)

    def vector(self, i: int) -> np.ndarray:
        """psi_i with the 1-based index of the stored (descending) order."""
        return self.vectors[:, i - 1]


@dataclass(frozen=True, eq=False)
class Coefficients:
    """alpha_i = psi_i . x, in the basis' stored order."""
    alpha: np.ndarray

    @property
    def count(self) -> int:
        return int(self.alpha.size)


@dataclass(frozen=True)
class ThresholdProfile:
    """
    Index ramp: tau_i = 1 for i <= s, 1 - (i-s)/rho while positive, 0 beyond.
    ranking decides which basis vector carries rank i (see transform.rank_order).
    """
    s: int
    rho: float
    ranking: Ranking = "ascending"

    def __post_init__(self):
        if self.s < 0:
            raise ValueError(f"s must be non-negative, got {self.s}")
        if not math.isfinite(self.rho) or self.rho <= 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.ranking not in RANKINGS:
            raise ValueError(f"Unknown ranking: {self.ranking}")
        object.__setattr__(self, "rho", float(self.rho))

    def support(self) -> int:
        """Number of ranks with tau > 0."""
        # 1 - k/rho > 0  <=>  k < rho, k = i - s >= 1
        return self.s + max(int(math.ceil(self.rho)) - 1, 0)


@dataclass(frozen=True)
class NoiseSpec:
    model: NoiseModel
    target_snr_db: float = TARGET_SNR_DB
    seed: int = 0

    def __post_init__(self):
        if self.model not in NOISE_MODELS:
            raise ValueError(f"Unknown noise model: {self.model}")
        if not math.isfinite(self.target_snr_db):
            raise ValueError("target_snr_db must be finite")


@dataclass(frozen=True)
class PipelineConfig:
    """
    Inputs of the denoising algorithm.
    - sigma = 0 disables smoothing
    - eigen_mode: 'full', 'partial' (partial_count or the profile support), or
      'auto' (partial whenever the profile support is below the dimension)
    """
    ratio: float
    sigma: float
    s: int
    rho: float
    boundary: BoundaryMode = "graph_laplacian"
    project_smoothed: bool = False
    eigen_mode: EigenMode = "full"
    partial_count: Optional[int] = None
    ranking: Ranking = "ascending"

    def __post_init__(self):
        PlanckMassRatio(self.ratio)
        if self.sigma < 0 or not math.isfinite(self.sigma):
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.boundary not in BOUNDARY_MODES:
            raise ValueError(f"Unknown boundary mode: {self.boundary}")
        if self.eigen_mode not in EIGEN_MODES:
            raise ValueError(f"Unknown eigen mode: {self.eigen_mode}")
        if self.partial_count is not None and self.partial_count < 1:
            raise ValueError("partial_count must be >= 1")
        self.profile()

    def profile(self) -> ThresholdProfile:
        return ThresholdProfile(s=int(self.s), rho=float(self.rho), ranking=self.ranking)

    def planck_ratio(self) -> PlanckMassRatio:
        return PlanckMassRatio(self.ratio)

    def as_dict(self) -> Dict[str, object]:
        return asdict(self)


@dataclass
class DenoiseReport:
    """
    Metrics of one denoised field against its clean reference.
    ssim is None for 1D data (reported as NA).
    """
    data_name: str
    noise: str
    method: Method
    psnr_db: float
    snr_db: float
    ssim: Optional[float]
    params: Dict[str, object] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    seed: Optional[int] = None
    input_snr_db: Optional[float] = None


@dataclass
class ExperimentDescriptor:
    """
    One comparison experiment: data source, noise, methods and either fixed
    parameters or search grids.
    source: 'synth_signal', 'synth_image' or a path to a PGM/CSV clean field.
    noisy: optional path to an already corrupted field; noise is then not
    generated and `source` (if any) is only the clean reference.
    """
    name: str = "experiment"
    source: Optional[str] = "synth_signal"
    noisy: Optional[str] = None
    n: Optional[int] = None
    data_seed: int = 0
    noise_model: NoiseModel = "poisson"
    target_snr_db: float = TARGET_SNR_DB
    seeds: List[int] = field(default_factory=lambda: [0])
    methods: List[Method] = field(default_factory=lambda: ["proposed", "fourier", "tv"])
    grid_search: bool = True
    boundary: BoundaryMode = "graph_laplacian"
    ranking: Ranking = "ascending"
    eigen_mode: EigenMode = "full"
    project_smoothed: bool = False
    # Fixed parameters (used when grid_search is False)
    ratio: Optional[float] = None
    sigma: float = 0.0
    s: Optional[int] = None
    rho: Optional[float] = None
    tv_lambda: Optional[float] = None
    # Search grids
    ratio_factors: List[float] = field(default_factory=lambda: list(GRID_RATIO_FACTORS))
    sigmas: List[float] = field(default_factory=lambda: list(GRID_SIGMAS))
    s_fractions: List[float] = field(default_factory=lambda: list(GRID_S_FRACTIONS))
    rho_factors: List[float] = field(default_factory=lambda: list(GRID_RHO_FACTORS))
    tv_lambda_factors: List[float] = field(default_factory=lambda: list(GRID_TV_LAMBDA_FACTORS))
    tv_iterations: int = TV_ITERATIONS
    peak: Optional[float] = None
    workers: int = 1

    def default_size(self) -> int:
        if self.n is not None:
            return int(self.n)
        return DEFAULT_IMAGE_SIDE if self.source == "synth_image" else DEFAULT_SIGNAL_LENGTH

    def data_label(self) -> str:
        """'Signal' / 'Image' for synthetic data, the file stem otherwise."""
        if self.source == "synth_signal":
            return "Signal"
        if self.source == "synth_image":
            return "Image"
        path = self.source or self.noisy or self.name
        return os.path.splitext(os.path.basename(path))[0]

    def noise_label(self) -> str:
        return "Poisson" if self.noise_model == "poisson" else "Gaussian"
