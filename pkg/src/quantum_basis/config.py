import os
import logging
from typing import Dict, Any

import pandas as pd

logger = logging.getLogger(__name__)

# Path to the parameter table (relative to project root usually)
# Since this code is in <root>/src/quantum_basis/config.py the project root is two levels up.
PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
DEFAULT_CONFIG_PATH = os.path.join(PROJECT_ROOT, "data", "parameters_config", "project_parameters.csv")


def _read_table(path: str) -> pd.DataFrame:
    if path.lower().endswith((".xlsx", ".xls")):
        return pd.read_excel(path)
    return pd.read_csv(path, comment="#", skipinitialspace=True, dtype=str, keep_default_na=False)


def _coerce(value: Any) -> Any:
    """Best-effort type inference for cells read as text."""
    if not isinstance(value, str):
        return value
    text = value.strip()
    lowered = text.lower()
    if lowered in ("true", "yes"):
        return True
    if lowered in ("false", "no"):
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def load_table_config(path: str = DEFAULT_CONFIG_PATH) -> Dict[str, Any]:
    """
    Load a Key/Value parameter table (CSV or Excel).
    Expected columns: Key, Value, Unit, Description
    Returns a dictionary of Key -> Value
    """
    config: Dict[str, Any] = {}
    if not os.path.exists(path):
        logger.warning(f"Config file not found at {path}. Using defaults.")
        return config

    try:
        df = _read_table(path)
    except Exception as e:
        logger.error(f"Failed to load config from {path}: {e}")
        return config

    if "Key" not in df.columns or "Value" not in df.columns:
        logger.warning(f"Parameter table {path} missing 'Key' or 'Value' columns.")
        return config

    for _, row in df.iterrows():
        key = str(row["Key"]).strip()
        if not key:
            continue
        config[key] = _coerce(row["Value"])
    logger.debug(f"Loaded {len(config)} parameters from {path}")
    return config


def split_list(value: Any) -> list:
    """Split a ';'-separated table cell into typed items."""
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return list(value)
    if isinstance(value, (int, float)):
        return [value]
    return [_coerce(part) for part in str(value).split(";") if part.strip()]
