import os
import logging
from datetime import datetime
from typing import Dict, Any, Optional

import numpy as np

logger = logging.getLogger(__name__)


def _summarize(value: Any) -> str:
    """Short text for audit entries; arrays become shape and value range."""
    if isinstance(value, np.ndarray):
        if value.size == 0:
            return f"array{value.shape}"
        return f"array{value.shape} [{value.min():.6g}, {value.max():.6g}]"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    return str(value)


class ComputationAudit:
    """
    Session-wide trace of the numerical stages (assembly, eigendecomposition,
    projection, ...). Disabled until start() is called with an output directory.
    """
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(ComputationAudit, cls).__new__(cls)
            cls._instance.initialized = False
        return cls._instance

    def __init__(self):
        if self.initialized:
            return
        self.enabled = False
        self.session_id: Optional[str] = None
        self.log_dir: Optional[str] = None
        self.log_file: Optional[str] = None
        self.initialized = True

    def start(self, output_dir: str) -> str:
        """Open a new audit file under <output_dir>/audit_logs and enable logging."""
        self.session_id = datetime.now().strftime("%Y%m%d_%H%M%S")
        self.log_dir = os.path.join(output_dir, "audit_logs")
        os.makedirs(self.log_dir, exist_ok=True)
        self.log_file = os.path.join(self.log_dir, f"audit_{self.session_id}.txt")

        with open(self.log_file, "w", encoding="utf-8") as f:
            f.write("=== COMPUTATION AUDIT LOG ===\n")
            f.write(f"Session: {self.session_id}\n")
            f.write("=============================\n\n")
        self.enabled = True
        logger.debug(f"Audit log started at {self.log_file}")
        return self.log_file

    def stop(self) -> None:
        self.enabled = False

    def log_calculation(self, context: str, formula: str, variables: Dict[str, Any], result: Any, unit: str = ""):
        """
        Log a computation step to the audit file.

        Args:
            context: What is being computed (e.g., "Hamiltonian assembly")
            formula: Text form of the operation (e.g., "H = diag(V + c*r) - r*A")
            variables: Inputs that drive it (e.g., {"dim": 256, "ratio": 1.0})
            result: Summary of the outcome
            unit: Unit of the result
        """
        if not self.enabled or not self.log_file:
            return

        try:
            with open(self.log_file, "a", encoding="utf-8") as f:
                f.write(f"[{datetime.now().strftime('%H:%M:%S')}] {context}\n")
                f.write(f"  Formula: {formula}\n")
                vars_str = ", ".join(f"{k}={_summarize(v)}" for k, v in variables.items())
                f.write(f"  Inputs:  {vars_str}\n")
                f.write(f"  Result:  {_summarize(result)} {unit}".rstrip() + "\n")
                f.write("-" * 40 + "\n")
        except Exception as e:
            logger.error(f"Failed to write to audit log: {e}")


# Global Accessor
audit_logger = ComputationAudit()
