
from .models import (
    Field,
    GridIndexMap,
    PlanckMassRatio,
    HamiltonianMatrix,
    EigenBasis,
    Coefficients,
    ThresholdProfile,
    NoiseSpec,
    PipelineConfig,
    DenoiseReport,
    ExperimentDescriptor,
    DimensionMismatchError,
)
from .pipeline import denoise_pipeline, run_experiment, PipelineStageError

__all__ = [
    "Field",
    "GridIndexMap",
    "PlanckMassRatio",
    "HamiltonianMatrix",
    "EigenBasis",
    "Coefficients",
    "ThresholdProfile",
    "NoiseSpec",
    "PipelineConfig",
    "DenoiseReport",
    "ExperimentDescriptor",
    "DimensionMismatchError",
    "denoise_pipeline",
    "run_experiment",
    "PipelineStageError",
]
