from typing import Dict, List

import pandas as pd

from ..constants import DECIMALS
from ..models import DenoiseReport

# COLORAMA SETUP
try:
    import colorama
    from colorama import Fore, Style
    colorama.init(autoreset=True)
except ImportError:

    class Fore:
        CYAN = GREEN = ""

    class Style:
        BRIGHT = RESET_ALL = ""

# Style Constants
C_HEADER = Fore.CYAN + Style.BRIGHT
C_SUCCESS = Fore.GREEN
C_RESET = Style.RESET_ALL

# Column order of the comparison table
REPORT_COLUMNS: List[str] = ["Data", "Noise", "Method", "PSNR (dB)", "SNR (dB)", "SSIM"]
METHOD_LABELS: Dict[str, str] = {"proposed": "Proposed", "fourier": "Fourier", "tv": "TV"}


def print_header(text: str):
    """Print a styled header."""
    print(f"\n{C_HEADER}{'='*60}")
    print(f"{text.center(60)}")
    print(f"{'='*60}{C_RESET}")


def reports_to_dataframe(reports: List[DenoiseReport]) -> pd.DataFrame:
    """One row per report: comparison columns, seed, then the parameter echo (param_*)."""
    rows = []
    for r in reports:
        row = {
            "Data": r.data_name,
            "Noise": r.noise,
            "Method": METHOD_LABELS.get(r.method, r.method),
            "PSNR (dB)": r.psnr_db,
            "SNR (dB)": r.snr_db,
            "SSIM": r.ssim,
            "Seed": r.seed,
            "Input SNR (dB)": r.input_snr_db,
        }
        for key, value in r.params.items():
            row[f"param_{key}"] = value
        rows.append(row)
    return pd.DataFrame(rows)


def format_and_clean_report_dataframe(df: pd.DataFrame) -> pd.DataFrame:
    """
    Refine the report DataFrame for display and export:
     - Comparison columns first, any extra columns after
     - SSIM of 1D data shown as NA
     - Round numerics
    """
    df = df.copy()
    for col in REPORT_COLUMNS:
        if col not in df.columns:
            df[col] = None
    extra_cols = [c for c in df.columns if c not in REPORT_COLUMNS]
    df = df[REPORT_COLUMNS + extra_cols]

    df["SSIM"] = pd.to_numeric(df["SSIM"], errors="coerce")
    numeric_cols = df.select_dtypes(include=['float', 'int']).columns
    df[numeric_cols] = df[numeric_cols].round(DECIMALS)
    df["SSIM"] = df["SSIM"].astype(object).where(df["SSIM"].notna(), "NA")
    return df


def print_report_table(df: pd.DataFrame):
    """Print the comparison columns of a formatted report table."""
    print(f"\n{C_HEADER}Quantitative denoising results:{C_RESET}")
    print(df[REPORT_COLUMNS].to_string(index=False))
    print(f"{'-'*60}")
