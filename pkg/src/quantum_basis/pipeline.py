"""
End-to-end denoising: smooth -> build H -> eigenvectors -> project -> threshold
and reconstruct, plus the experiment runner with its hyperparameter grid search.
"""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np

from .config import load_table_config, split_list
from .constants import METHODS, Which
from .models import (
    Coefficients, DenoiseReport, EigenBasis, ExperimentDescriptor, Field, HamiltonianMatrix,
    NoiseSpec, PipelineConfig, PlanckMassRatio, ThresholdProfile,
)
from .grid import load_field
from .hamiltonian import build_hamiltonian
from .eigen import decompose
from .transform import project, reconstruct
from .smoothing import gaussian_smooth
from .noise import corrupt
from .metrics import evaluate, psnr_db
from .baselines import fourier_denoise, tv_denoise
from .synth import make_signal, make_image

logger = logging.getLogger(__name__)


class PipelineStageError(RuntimeError):
    """Failure inside a pipeline stage; `stage` names it (smooth, eigen, ...)."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@contextmanager
def _stage(name: str, timings: Dict[str, float]) -> Iterator[None]:
    start = time.perf_counter()
    try:
        yield
    except PipelineStageError:
        raise
    except Exception as e:
        raise PipelineStageError(name, str(e)) from e
    finally:
        timings[name] = timings.get(name, 0.0) + time.perf_counter() - start


@dataclass
class RunArtifacts:
    """Everything one proposed-method run produced (input of the plot-data emitters)."""
    noisy: Field
    potential: Field
    hamiltonian: HamiltonianMatrix
    basis: EigenBasis
    coefficients: Coefficients
    denoised: Field
    config: PipelineConfig
    timings: Dict[str, float] = field(default_factory=dict)
    clean: Optional[Field] = None


def _which(config: PipelineConfig) -> Which:
    return "lowest" if config.ranking == "ascending" else "highest"


def eigen_count(config: PipelineConfig, dim: int, support: Optional[int] = None) -> Optional[int]:
    """Number of eigenpairs to request (None = full decomposition)."""
    support = config.profile().support() if support is None else support
    if config.eigen_mode == "full":
        return None
    if config.eigen_mode == "partial":
        return min(max(config.partial_count or support, 1), dim)
    # auto
    return max(support, 1) if support < dim else None


def _potential(noisy: Field, sigma: float) -> Field:
    return gaussian_smooth(noisy, sigma) if sigma > 0 else noisy


def run_pipeline(x_noisy: Field, config: PipelineConfig, clean: Optional[Field] = None) -> RunArtifacts:
    timings: Dict[str, float] = {}

    with _stage("smooth", timings):
        potential = _potential(x_noisy, config.sigma)
    with _stage("hamiltonian", timings):
        H = build_hamiltonian(potential, config.planck_ratio(), config.boundary)
    with _stage("eigen", timings):
        basis = decompose(H, eigen_count(config, H.dim), _which(config))
    with _stage("project", timings):
        coeffs = project(basis, potential if config.project_smoothed else x_noisy)
    with _stage("reconstruct", timings):
        denoised = reconstruct(basis, coeffs, config.profile(), like=x_noisy)

    logger.debug(
        "Pipeline timings: " + ", ".join(f"{k}={v:.3f}s" for k, v in timings.items())
    )
    return RunArtifacts(
        noisy=x_noisy, potential=potential, hamiltonian=H, basis=basis, coefficients=coeffs,
        denoised=denoised, config=config, timings=timings, clean=clean,
    )


def denoise_pipeline(x_noisy: Field, config: PipelineConfig) -> Field:
    """Denoise one field with the adaptive basis."""
    return run_pipeline(x_noisy, config).denoised


# ============================================================================
# GRID SEARCH
# ============================================================================

def candidate_profiles(dim: int, s_fractions, rho_factors) -> List[Tuple[int, float]]:
    """(s, rho) pairs: s = fraction*dim (at least 1), rho = factor*s."""
    s_values = sorted({max(1, int(round(f * dim))) for f in s_fractions})
    pairs = []
    for s in s_values:
        for rho in sorted({float(f * s) for f in rho_factors if f * s > 0}):
            pairs.append((s, rho))
    return pairs


def _value_range(x: Field) -> float:
    spread = float(np.ptp(x.values))
    return spread if spread > 0 else 1.0


def _search_proposed_key(noisy: Field, clean: Field, ratio: float, sigma: float,
                         profiles: List[Tuple[int, float]], template: PipelineConfig,
                         peak: Optional[float]) -> List[Dict[str, Any]]:
    """All (s, rho) cells for one (ratio, sigma): a single decomposition shared by every cell."""
    config = replace(template, ratio=ratio, sigma=sigma, s=profiles[0][0], rho=profiles[0][1])
    potential = _potential(noisy, sigma)
    H = build_hamiltonian(potential, PlanckMassRatio(ratio), config.boundary)
    support = max(ThresholdProfile(s, rho).support() for s, rho in profiles)
    basis = decompose(H, eigen_count(config, H.dim, support), _which(config))
    coeffs = project(basis, potential if config.project_smoothed else noisy)

    rows = []
    for s, rho in profiles:
        denoised = reconstruct(basis, coeffs, ThresholdProfile(s, rho, config.ranking), like=noisy)
        rows.append({"method": "proposed", "ratio": ratio, "sigma": sigma, "s": s, "rho": rho,
                     "lambda": math.nan, "psnr_db": psnr_db(clean, denoised, peak)})
    return rows


def _run_cells(tasks, workers: int) -> List[List[Dict[str, Any]]]:
    """Run (label, callable) tasks; failing cells are logged and skipped."""
    def guarded(task):
        label, fn = task
        try:
            return fn()
        except Exception as e:
            logger.warning(f"Grid cell {label} failed: {e}")
            return []

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(guarded, tasks))
    return [guarded(t) for t in tasks]


def grid_search(noisy: Field, clean: Field, desc: ExperimentDescriptor) -> List[Dict[str, Any]]:
    """
    Exhaustive PSNR search for every method of the descriptor.
    Rows are sorted by (method, ratio, sigma, s, rho, lambda).
    """
    if clean is None:
        raise PipelineStageError("search", "grid search needs a clean reference")

    spread = _value_range(noisy)
    profiles = candidate_profiles(noisy.size, desc.s_fractions, desc.rho_factors)
    template = PipelineConfig(
        ratio=1.0, sigma=0.0, s=profiles[0][0], rho=profiles[0][1], boundary=desc.boundary,
        project_smoothed=desc.project_smoothed, eigen_mode=desc.eigen_mode, ranking=desc.ranking,
    )

    tasks = []
    if "proposed" in desc.methods:
        for factor in desc.ratio_factors:
            for sigma in desc.sigmas:
                ratio = float(factor) * spread
                tasks.append((
                    f"proposed ratio={ratio:.6g} sigma={sigma}",
                    lambda r=ratio, sg=float(sigma): _search_proposed_key(
                        noisy, clean, r, sg, profiles, template, desc.peak),
                ))
    if "fourier" in desc.methods:
        def fourier_cells():
            return [{"method": "fourier", "ratio": math.nan, "sigma": math.nan, "s": s, "rho": rho,
                     "lambda": math.nan,
                     "psnr_db": psnr_db(clean, fourier_denoise(noisy, ThresholdProfile(s, rho)), desc.peak)}
                    for s, rho in profiles]
        tasks.append(("fourier", fourier_cells))
    if "tv" in desc.methods:
        for factor in desc.tv_lambda_factors:
            lam = float(factor) * spread
            tasks.append((
                f"tv lambda={lam:.6g}",
                lambda lm=lam: [{"method": "tv", "ratio": math.nan, "sigma": math.nan, "s": math.nan,
                                 "rho": math.nan, "lambda": lm,
                                 "psnr_db": psnr_db(clean, tv_denoise(noisy, lm, desc.tv_iterations), desc.peak)}],
            ))

    rows = [row for cell in _run_cells(tasks, desc.workers) for row in cell]
    if not rows:
        raise PipelineStageError("search", "no grid cell succeeded")
    rows.sort(key=_row_key)
    logger.info(f"Grid search: {len(rows)} cells evaluated")
    return rows


def _row_key(row: Dict[str, Any]):
    def num(v):
        return -math.inf if v is None or (isinstance(v, float) and math.isnan(v)) else float(v)
    return (METHODS.index(row["method"]), num(row["ratio"]), num(row["sigma"]),
            num(row["s"]), num(row["rho"]), num(row["lambda"]))


def best_cells(rows: List[Dict[str, Any]]) -> Dict[str, Dict[str, Any]]:
    """Highest-PSNR row per method; ties go to the first row in sorted order."""
    best: Dict[str, Dict[str, Any]] = {}
    for row in rows:
        current = best.get(row["method"])
        if current is None or row["psnr_db"] > current["psnr_db"]:
            best[row["method"]] = row
    return best


# ============================================================================
# EXPERIMENTS
# ============================================================================

@dataclass
class ExperimentResult:
    descriptor: ExperimentDescriptor
    reports: List[DenoiseReport]
    grid: List[Dict[str, Any]]
    artifacts: Dict[int, RunArtifacts]
    outputs: Dict[Tuple[int, str], Field]
    clean: Optional[Field]


def load_data(desc: ExperimentDescriptor) -> Tuple[Optional[Field], Optional[Field]]:
    """(clean, pre-noised) fields named by the descriptor."""
    if desc.source == "synth_signal":
        clean = make_signal(desc.default_size(), desc.data_seed)
    elif desc.source == "synth_image":
        clean = make_image(desc.default_size(), desc.data_seed)
    elif desc.source:
        clean = load_field(desc.source)
    else:
        clean = None
    noisy = load_field(desc.noisy) if desc.noisy else None
    if clean is None and noisy is None:
        raise ValueError("Experiment needs a source or a noisy input")
    return clean, noisy


def _fixed_rows(noisy: Field, desc: ExperimentDescriptor) -> List[Dict[str, Any]]:
    """Parameters of a no-search run, with defaults relative to the data range."""
    spread = _value_range(noisy)
    s = desc.s if desc.s is not None else max(1, int(round(0.05 * noisy.size)))
    rho = desc.rho if desc.rho is not None else float(s)
    rows = []
    for method in desc.methods:
        row = {"method": method, "ratio": math.nan, "sigma": math.nan, "s": math.nan,
               "rho": math.nan, "lambda": math.nan, "psnr_db": math.nan}
        if method in ("proposed", "fourier"):
            row.update(s=s, rho=float(rho))
        if method == "proposed":
            row.update(ratio=desc.ratio if desc.ratio is not None else spread, sigma=float(desc.sigma))
        if method == "tv":
            row["lambda"] = desc.tv_lambda if desc.tv_lambda is not None else 0.02 * spread
        rows.append(row)
    return rows


def _report(desc: ExperimentDescriptor, method: str, clean: Optional[Field], output: Field,
            params: Dict[str, Any], seed: Optional[int], input_snr: Optional[float],
            timings: Dict[str, float]) -> DenoiseReport:
    timings = dict(timings)
    if clean is not None:
        with _stage("metrics", timings):
            scores = evaluate(clean, output, desc.peak)
    else:
        scores = {"psnr_db": math.nan, "snr_db": math.nan, "ssim": None}
    return DenoiseReport(
        data_name=desc.data_label(), noise=desc.noise_label(), method=method,
        psnr_db=scores["psnr_db"], snr_db=scores["snr_db"], ssim=scores["ssim"],
        params=params, timings=timings, seed=seed, input_snr_db=input_snr,
    )


def run_experiment(desc: ExperimentDescriptor) -> ExperimentResult:
    """
    For every seed: corrupt the clean data (unless a noisy input is given),
    pick parameters (grid search or fixed), run each method and score it.
    """
    unknown = [m for m in desc.methods if m not in METHODS]
    if unknown:
        raise ValueError(f"Unknown methods: {unknown}")

    timings: Dict[str, float] = {}
    with _stage("load", timings):
        clean, given_noisy = load_data(desc)
    if desc.grid_search and clean is None:
        raise PipelineStageError("search", "grid search needs a clean reference")

    seeds = [None] if given_noisy is not None else list(desc.seeds)
    reports: List[DenoiseReport] = []
    grid_rows: List[Dict[str, Any]] = []
    artifacts: Dict[int, RunArtifacts] = {}
    outputs: Dict[Tuple[int, str], Field] = {}

    for seed in seeds:
        run_timings = dict(timings)
        input_snr = None
        if given_noisy is not None:
            noisy = given_noisy
        else:
            with _stage("corrupt", run_timings):
                noisy, input_snr = corrupt(clean, NoiseSpec(desc.noise_model, desc.target_snr_db, int(seed)))
            logger.info(f"Seed {seed}: noisy input at {input_snr:.2f} dB SNR")

        if desc.grid_search:
            with _stage("search", run_timings):
                rows = grid_search(noisy, clean, desc)
            grid_rows.extend(dict(row, seed=seed) for row in rows)
            chosen = best_cells(rows)
        else:
            chosen = {row["method"]: row for row in _fixed_rows(noisy, desc)}

        for method in desc.methods:
            if method not in chosen:
                logger.warning(f"No successful configuration for method '{method}' (seed {seed})")
                continue
            row = chosen[method]
            if method == "proposed":
                config = PipelineConfig(
                    ratio=float(row["ratio"]), sigma=float(row["sigma"]), s=int(row["s"]), rho=float(row["rho"]),
                    boundary=desc.boundary, project_smoothed=desc.project_smoothed,
                    eigen_mode=desc.eigen_mode, ranking=desc.ranking,
                )
                run = run_pipeline(noisy, config, clean)
                artifacts[seed] = run
                output, params = run.denoised, config.as_dict()
                method_timings = {**run_timings, **run.timings}
            else:
                method_timings = dict(run_timings)
                with _stage(method, method_timings):
                    if method == "fourier":
                        output = fourier_denoise(noisy, ThresholdProfile(int(row["s"]), float(row["rho"])))
                        params = {"s": int(row["s"]), "rho": float(row["rho"])}
                    else:
                        output = tv_denoise(noisy, float(row["lambda"]), desc.tv_iterations)
                        params = {"lambda": float(row["lambda"]), "iterations": desc.tv_iterations}
            outputs[(seed, method)] = output
            reports.append(_report(desc, method, clean, output, params, seed, input_snr, method_timings))

    reports.sort(key=lambda r: (-1 if r.seed is None else r.seed, METHODS.index(r.method)))
    return ExperimentResult(descriptor=desc, reports=reports, grid=grid_rows, artifacts=artifacts,
                            outputs=outputs, clean=clean)


# ============================================================================
# DESCRIPTOR TABLES
# ============================================================================

_LIST_KEYS = {"seeds", "methods", "ratio_factors", "sigmas", "s_fractions", "rho_factors", "tv_lambda_factors"}


def descriptor_from_dict(values: Dict[str, Any], base: Optional[ExperimentDescriptor] = None) -> ExperimentDescriptor:
    """Build a descriptor from Key/Value pairs; keys are ExperimentDescriptor field names."""
    base = base or ExperimentDescriptor()
    known = {f.name for f in fields(ExperimentDescriptor)}
    updates: Dict[str, Any] = {}
    for key, value in values.items():
        name = str(key).strip().lower()
        if name not in known:
            logger.warning(f"Ignoring unknown experiment key '{key}'")
            continue
        if value is None or value == "":
            continue
        updates[name] = split_list(value) if name in _LIST_KEYS else value
    if "seeds" in updates:
        updates["seeds"] = [int(s) for s in updates["seeds"]]
    for key in ("source", "noisy", "name"):
        if key in updates:
            updates[key] = str(updates[key])
    return replace(base, **updates)


def load_descriptor(path: Optional[str], overrides: Optional[Dict[str, Any]] = None) -> ExperimentDescriptor:
    """Experiment table (CSV/XLSX Key/Value, optional) plus CLI overrides."""
    desc = descriptor_from_dict(load_table_config(path)) if path else ExperimentDescriptor()
    if overrides:
        desc = descriptor_from_dict({k: v for k, v in overrides.items() if v is not None}, base=desc)
    return desc
