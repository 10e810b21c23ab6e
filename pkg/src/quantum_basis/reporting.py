import os
import logging
from datetime import datetime
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from .constants import CSV_FLOAT_FORMAT, DECIMALS
from .models import DenoiseReport, EigenBasis, Field
from .transform import coefficient_table
from .utils.console import reports_to_dataframe, format_and_clean_report_dataframe, METHOD_LABELS

logger = logging.getLogger(__name__)


def _to_csv(frame: pd.DataFrame, path: str, float_format: str = CSV_FLOAT_FORMAT) -> str:
    frame.to_csv(path, index=False, float_format=float_format, lineterminator="\n")
    logger.debug(f"Wrote {path}")
    return path


def _slug(text: str) -> str:
    return str(text).replace(" ", "_").lower()


# ============================================================================
# REPORTS
# ============================================================================

def write_reports(reports: List[DenoiseReport], out_dir: str, grid_rows: Optional[List[Dict]] = None) -> Dict[str, str]:
    """
    reports.csv (comparison columns + parameter echo), grid.csv (every searched cell)
    and one markdown breakdown per data/noise pair with the stage timings.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = {}
    df = format_and_clean_report_dataframe(reports_to_dataframe(reports))
    # already rounded to DECIMALS
    written["reports"] = _to_csv(df, os.path.join(out_dir, "reports.csv"), float_format=f"%.{DECIMALS}f")

    if grid_rows:
        grid = pd.DataFrame(grid_rows)
        columns = ["seed", "method", "ratio", "sigma", "s", "rho", "lambda", "psnr_db"]
        grid = grid[[c for c in columns if c in grid.columns]]
        written["grid"] = _to_csv(grid, os.path.join(out_dir, "grid.csv"))

    groups: Dict[tuple, List[DenoiseReport]] = {}
    for r in reports:
        groups.setdefault((r.data_name, r.noise), []).append(r)
    for (data_name, noise), group in groups.items():
        written[f"breakdown_{data_name}_{noise}"] = save_breakdown_md(group, out_dir)
    return written


def save_breakdown_md(reports: List[DenoiseReport], output_dir: str) -> str:
    """
    Save a per-method summary with stage timings to a Markdown file.
    """
    os.makedirs(output_dir, exist_ok=True)
    first = reports[0]
    filepath = os.path.join(output_dir, f"breakdown_{_slug(first.data_name)}_{_slug(first.noise)}.md")

    with open(filepath, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# Denoising Breakdown: {first.data_name} / {first.noise}\n")
        f.write(f"**Date**: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n\n")

        f.write("## Summary\n")
        f.write("| Method | Seed | Input SNR (dB) | PSNR (dB) | SNR (dB) | SSIM |\n")
        f.write("| :--- | :--- | :--- | :--- | :--- | :--- |\n")
        for r in reports:
            ssim = "NA" if r.ssim is None else f"{r.ssim:.4f}"
            in_snr = "-" if r.input_snr_db is None else f"{r.input_snr_db:.2f}"
            f.write(f"| {METHOD_LABELS.get(r.method, r.method)} | {r.seed} | {in_snr} | "
                    f"{r.psnr_db:.4f} | {r.snr_db:.4f} | {ssim} |\n")

        f.write("\n## Stage Timings\n")
        for r in reports:
            total = sum(r.timings.values())
            f.write(f"\n### {METHOD_LABELS.get(r.method, r.method)} (seed {r.seed})\n")
            f.write("| Stage | Time (s) | Share (%) |\n")
            f.write("| :--- | :--- | :--- |\n")
            for stage, val in sorted(r.timings.items(), key=lambda x: x[1], reverse=True):
                pct = (val / total * 100.0) if total > 0 else 0.0
                f.write(f"| {stage} | {val:.4f} | {pct:.1f}% |\n")
            f.write(f"| **TOTAL** | **{total:.4f}** | **100.0%** |\n")

        f.write("\n## Parameters\n")
        for r in reports:
            params = ", ".join(f"{k}={v}" for k, v in r.params.items())
            f.write(f"- **{METHOD_LABELS.get(r.method, r.method)}**: {params}\n")

        f.write("\n---\n")
        f.write("*Generated by Quantum Basis Denoising Tool*\n")

    logger.info(f"[Report] Saved Markdown breakdown to: {filepath}")
    return filepath


# ============================================================================
# PLOT DATA
# ============================================================================

def spectrum_frame(basis: EigenBasis) -> pd.DataFrame:
    return pd.DataFrame({"index": np.arange(1, basis.count + 1), "eigenvalue": basis.eigenvalues})


def select_mid_eigenvector(basis: EigenBasis, potential: Field) -> int:
    """1-based stored index of the eigenvalue closest to the middle of the potential range."""
    target = 0.5 * (float(potential.values.min()) + float(potential.values.max()))
    return int(np.argmin(np.abs(basis.eigenvalues - target))) + 1


def eigenvector_frame(basis: EigenBasis, potential: Field, index: Optional[int] = None) -> pd.DataFrame:
    """Potential and one eigenvector on the flattened grid (row/col 1-based)."""
    index = select_mid_eigenvector(basis, potential) if index is None else index
    rows, cols = np.divmod(np.arange(potential.size), potential.width)
    return pd.DataFrame({
        "k": np.arange(1, potential.size + 1),
        "row": rows + 1,
        "col": cols + 1,
        "potential": potential.values,
        "eigenvector": basis.vector(index),
        "eigenvalue": np.full(potential.size, basis.eigenvalues[index - 1]),
        "eigen_index": np.full(potential.size, index),
    })


def fields_frame(noisy: Field, denoised: Field, clean: Optional[Field] = None) -> pd.DataFrame:
    rows, cols = np.divmod(np.arange(noisy.size), noisy.width)
    frame = pd.DataFrame({"k": np.arange(1, noisy.size + 1), "row": rows + 1, "col": cols + 1})
    if clean is not None:
        frame["clean"] = clean.values
    frame["noisy"] = noisy.values
    frame["denoised"] = denoised.values
    return frame


def emit_plotdata(artifacts, out_dir: str, prefix: str = "run") -> Dict[str, str]:
    """
    CSV plot data of one proposed-method run:
    <prefix>_spectrum.csv, <prefix>_eigenvector.csv, <prefix>_coefficients.csv, <prefix>_fields.csv
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "spectrum": os.path.join(out_dir, f"{prefix}_spectrum.csv"),
        "eigenvector": os.path.join(out_dir, f"{prefix}_eigenvector.csv"),
        "coefficients": os.path.join(out_dir, f"{prefix}_coefficients.csv"),
        "fields": os.path.join(out_dir, f"{prefix}_fields.csv"),
    }
    _to_csv(spectrum_frame(artifacts.basis), paths["spectrum"])
    _to_csv(eigenvector_frame(artifacts.basis, artifacts.potential), paths["eigenvector"])
    _to_csv(
        coefficient_table(artifacts.basis, artifacts.coefficients, artifacts.config.profile()),
        paths["coefficients"],
    )
    _to_csv(fields_frame(artifacts.noisy, artifacts.denoised, artifacts.clean), paths["fields"])
    logger.info(f"[Plot data] Wrote {len(paths)} files with prefix '{prefix}' to {out_dir}")
    return paths
