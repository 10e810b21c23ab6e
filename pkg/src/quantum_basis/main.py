import argparse
import logging
import os
import sys
from datetime import datetime
from typing import List, Optional

import numpy as np

from .config import PROJECT_ROOT, split_list
from .constants import (
    BOUNDARY_MODES, EIGEN_MODES, NOISE_MODELS, RANKINGS, TARGET_SNR_DB, TV_ITERATIONS,
    DEFAULT_SIGNAL_LENGTH, DEFAULT_IMAGE_SIDE,
)
from .models import DenoiseReport, NoiseSpec, PipelineConfig, PlanckMassRatio
from .grid import load_field, save_field
from .hamiltonian import build_hamiltonian, dump_coordinates
from .eigen import decompose, dump_eigenpairs, EigenConvergenceError
from .smoothing import gaussian_smooth
from .noise import corrupt
from .metrics import evaluate
from .synth import make_signal, make_image
from .pipeline import PipelineStageError, run_pipeline, load_descriptor, run_experiment
from .reporting import write_reports, emit_plotdata
from .visualization import Visualizer
from .audit import audit_logger
from .logging_conf import setup_logging
from .utils.console import (
    print_header, print_report_table, reports_to_dataframe, format_and_clean_report_dataframe,
    C_SUCCESS, C_RESET,
)

logger = logging.getLogger(__name__)


def default_out_dir() -> str:
    return os.path.join(PROJECT_ROOT, "reports", datetime.now().strftime("%Y%m%d_%H%M%S"))


def _slug(text: str) -> str:
    return str(text).replace(" ", "_").lower()


# ============================================================================
# SUBCOMMANDS
# ============================================================================

def cmd_synth(args) -> int:
    f = make_signal(args.n or DEFAULT_SIGNAL_LENGTH, args.seed) if args.kind == "signal" \
        else make_image(args.n or DEFAULT_IMAGE_SIDE, args.seed)
    save_field(f, args.out, ascii=args.ascii)
    logger.info(f"Wrote synthetic {args.kind} {f.shape} to {args.out}")
    return 0


def cmd_corrupt(args) -> int:
    clean = load_field(args.input)
    noisy, achieved = corrupt(clean, NoiseSpec(args.model, args.snr, args.seed))
    save_field(noisy, args.out, ascii=args.ascii)
    print(f"{C_SUCCESS}Achieved SNR: {achieved:.4f} dB{C_RESET}")
    logger.info(f"Wrote noisy field to {args.out}")
    return 0


def cmd_metrics(args) -> int:
    clean = load_field(args.clean)
    test = load_field(args.test)
    scores = evaluate(clean, test, args.peak)
    report = DenoiseReport(
        data_name=os.path.basename(args.clean), noise="-", method=os.path.basename(args.test),
        psnr_db=scores["psnr_db"], snr_db=scores["snr_db"], ssim=scores["ssim"],
    )
    print_report_table(format_and_clean_report_dataframe(reports_to_dataframe([report])))
    return 0


def _pipeline_config(args, noisy) -> PipelineConfig:
    spread = float(np.ptp(noisy.values)) or 1.0
    s = args.s if args.s is not None else max(1, int(round(0.05 * noisy.size)))
    return PipelineConfig(
        ratio=args.ratio if args.ratio is not None else spread,
        sigma=args.sigma,
        s=s,
        rho=args.rho if args.rho is not None else float(s),
        boundary=args.boundary,
        project_smoothed=args.project_smoothed,
        eigen_mode=args.eigen_mode,
        partial_count=args.partial_count,
        ranking=args.ranking,
    )


def cmd_denoise(args) -> int:
    try:
        noisy = load_field(args.input)
        clean = load_field(args.clean) if args.clean else None
    except (ValueError, OSError) as e:
        raise PipelineStageError("load", str(e)) from e
    config = _pipeline_config(args, noisy)
    logger.info(f"Denoising {args.input} with ratio={config.ratio:.6g}, sigma={config.sigma}, "
                f"s={config.s}, rho={config.rho}")
    run = run_pipeline(noisy, config, clean)

    out_dir = args.out_dir or default_out_dir()
    os.makedirs(out_dir, exist_ok=True)
    output = args.output or os.path.join(out_dir, "denoised" + os.path.splitext(args.input)[1])
    save_field(run.denoised, output)
    logger.info(f"Wrote denoised field to {output}")

    if clean is not None:
        scores = evaluate(clean, run.denoised, args.peak)
        report = DenoiseReport(
            data_name=os.path.splitext(os.path.basename(args.clean))[0], noise="-", method="proposed",
            psnr_db=scores["psnr_db"], snr_db=scores["snr_db"], ssim=scores["ssim"],
            params=config.as_dict(), timings=run.timings,
        )
        write_reports([report], out_dir)
        print_report_table(format_and_clean_report_dataframe(reports_to_dataframe([report])))
    if args.emit_plotdata or args.plots:
        emit_plotdata(run, out_dir, prefix="denoise")
    if args.plots:
        Visualizer(out_dir).plot_run(run, prefix="denoise")
    return 0


def cmd_experiment(args) -> int:
    overrides = {
        "name": args.name, "source": args.source, "noisy": args.noisy, "n": args.n,
        "data_seed": args.data_seed, "noise_model": args.noise, "target_snr_db": args.snr,
        "seeds": args.seeds, "methods": args.methods, "boundary": args.boundary,
        "ranking": args.ranking, "eigen_mode": args.eigen_mode, "ratio": args.ratio,
        "sigma": args.sigma, "s": args.s, "rho": args.rho, "tv_lambda": args.tv_lambda,
        "tv_iterations": args.tv_iterations, "peak": args.peak, "workers": args.workers,
    }
    if args.no_grid:
        overrides["grid_search"] = False
    if args.project_smoothed:
        overrides["project_smoothed"] = True
    if args.config and not os.path.exists(args.config):
        raise PipelineStageError("load", f"experiment table not found: {args.config}")
    desc = load_descriptor(args.config, overrides)

    print_header(f"Experiment: {desc.name}")
    logger.info(f"Data {desc.data_label()}, noise {desc.noise_label()} at {desc.target_snr_db} dB, "
                f"methods {', '.join(desc.methods)}, seeds {desc.seeds}")
    result = run_experiment(desc)

    out_dir = args.out_dir or default_out_dir()
    write_reports(result.reports, out_dir, result.grid)
    df = format_and_clean_report_dataframe(reports_to_dataframe(result.reports))
    print_report_table(df)

    visualizer = Visualizer(out_dir) if args.plots else None
    for seed, run in sorted(result.artifacts.items(), key=lambda kv: -1 if kv[0] is None else kv[0]):
        prefix = f"{_slug(desc.data_label())}_{_slug(desc.noise_label())}_seed{seed}"
        emit_plotdata(run, out_dir, prefix=prefix)
        if visualizer:
            visualizer.plot_run(run, prefix=prefix)
    if visualizer:
        visualizer.plot_method_comparison(result.reports)
    logger.info(f"Results written to {out_dir}")
    return 0


def cmd_dump_eigs(args) -> int:
    field = load_field(args.input)
    potential = gaussian_smooth(field, args.sigma) if args.sigma > 0 else field
    ratio = args.ratio if args.ratio is not None else (float(np.ptp(field.values)) or 1.0)
    H = build_hamiltonian(potential, PlanckMassRatio(ratio), args.boundary)
    basis = decompose(H, args.count, args.which)
    dump_eigenpairs(basis, args.out)
    logger.info(f"Wrote {basis.count} eigenpairs to {args.out}")
    if args.hamiltonian:
        dump_coordinates(H, args.hamiltonian)
        logger.info(f"Wrote Hamiltonian coordinates to {args.hamiltonian}")
    return 0


# ============================================================================
# ARGUMENTS
# ============================================================================

def _add_pipeline_flags(p: argparse.ArgumentParser):
    p.add_argument("--ratio", type=float, help="hbar^2/2m (default: value range of the input)")
    p.add_argument("--sigma", type=float, default=0.0, help="Gaussian pre-smoothing std (0 = off)")
    p.add_argument("--s", type=int, help="fully kept coefficients (default: 5%% of the dimension)")
    p.add_argument("--rho", type=float, help="ramp length (default: s)")
    p.add_argument("--boundary", choices=BOUNDARY_MODES, default="graph_laplacian")
    p.add_argument("--ranking", choices=RANKINGS, default="ascending")
    p.add_argument("--eigen-mode", choices=EIGEN_MODES, default="full")
    p.add_argument("--project-smoothed", action="store_true", help="project the smoothed field instead of the raw one")
    p.add_argument("--peak", type=float, help="PSNR/SSIM peak (default: max of the clean field)")


def _list_arg(value: str) -> list:
    return split_list(value.replace(",", ";"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="Quantum_Denoise",
        description="Adaptive quantum-basis denoising of signals and images.",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="debug output on the console")
    parser.add_argument("--log-file", help="write a detailed log to this file")
    parser.add_argument("--audit", action="store_true", help="write a computation audit log to the output directory")
    parser.add_argument("--out-dir", help="output directory (default: reports/<timestamp>)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("denoise", help="denoise one field")
    p.add_argument("input")
    p.add_argument("--clean", help="clean reference for metrics")
    p.add_argument("--output", help="denoised field path (.csv or .pgm)")
    _add_pipeline_flags(p)
    p.add_argument("--partial-count", type=int, help="eigenpairs for --eigen-mode partial")
    p.add_argument("--emit-plotdata", action="store_true")
    p.add_argument("--plots", action="store_true", help="also render PNG plots")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("experiment", help="run a method comparison experiment")
    p.add_argument("--config", help="experiment Key/Value table (.csv or .xlsx)")
    p.add_argument("--name")
    p.add_argument("--source", help="synth_signal, synth_image or a clean field path")
    p.add_argument("--noisy", help="already corrupted input (skips noise generation)")
    p.add_argument("--n", type=int, help="synthetic length / image side")
    p.add_argument("--data-seed", type=int)
    p.add_argument("--noise", choices=NOISE_MODELS)
    p.add_argument("--snr", type=float, help=f"target SNR in dB (default {TARGET_SNR_DB})")
    p.add_argument("--seeds", type=_list_arg, help="noise seeds, e.g. 0,1,2")
    p.add_argument("--methods", type=_list_arg, help="proposed,fourier,tv")
    p.add_argument("--no-grid", action="store_true", help="use fixed parameters instead of grid search")
    p.add_argument("--ratio", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--s", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--tv-lambda", type=float)
    p.add_argument("--tv-iterations", type=int, help=f"default {TV_ITERATIONS}")
    p.add_argument("--boundary", choices=BOUNDARY_MODES)
    p.add_argument("--ranking", choices=RANKINGS)
    p.add_argument("--eigen-mode", choices=EIGEN_MODES)
    p.add_argument("--project-smoothed", action="store_true")
    p.add_argument("--peak", type=float)
    p.add_argument("--workers", type=int, help="parallel grid-search workers")
    p.add_argument("--plots", action="store_true", help="also render PNG plots")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("synth", help="generate synthetic data")
    p.add_argument("--kind", choices=["signal", "image"], default="signal")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--ascii", action="store_true", help="plain (P2) PGM")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("corrupt", help="add signal-dependent noise")
    p.add_argument("input")
    p.add_argument("--model", choices=NOISE_MODELS, default="poisson")
    p.add_argument("--snr", type=float, default=TARGET_SNR_DB)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--ascii", action="store_true", help="plain (P2) PGM")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("metrics", help="PSNR / SNR / SSIM of a field against a clean reference")
    p.add_argument("clean")
    p.add_argument("test")
    p.add_argument("--peak", type=float)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("dump-eigs", help="write eigenpairs (and optionally H) for external checks")
    p.add_argument("input")
    p.add_argument("--ratio", type=float)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--boundary", choices=BOUNDARY_MODES, default="graph_laplacian")
    p.add_argument("--count", type=int, help="number of eigenpairs (default: all)")
    p.add_argument("--which", choices=["lowest", "highest"], default="lowest")
    p.add_argument("--out", required=True, help="eigenpair CSV path")
    p.add_argument("--hamiltonian", help="also write 'row col value' coordinates here")
    p.set_defaults(func=cmd_dump_eigs)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    setup_logging(console_level=logging.DEBUG if args.verbose else logging.INFO, file_path=args.log_file)
    if args.audit:
        if not args.out_dir:
            args.out_dir = default_out_dir()
        audit_logger.start(args.out_dir)

    try:
        return args.func(args)
    except PipelineStageError as e:
        logger.error(str(e))
        return 1
    except (ValueError, OSError, EigenConvergenceError) as e:
        logger.error(f"[{args.command}] {e}")
        return 1
    finally:
        audit_logger.stop()


if __name__ == "__main__":
    sys.exit(main())
