import os
import logging
from typing import List, Optional

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .models import DenoiseReport
from .reporting import select_mid_eigenvector
from .transform import weights
from .utils.console import METHOD_LABELS

logger = logging.getLogger(__name__)

# ============================================================================
# VISUALIZER CLASS
# ============================================================================


class Visualizer:
    def __init__(self, output_dir: str):
        """
        Render plot data of a run as PNG files under <output_dir>/plots.
        """
        self.session_dir = os.path.join(output_dir, "plots")
        os.makedirs(self.session_dir, exist_ok=True)
        self._setup_style()

    def _setup_style(self):
        """Configure matplotlib for clean, publication-quality plots."""
        plt.rcParams.update(plt.rcParamsDefault)

        # Typography
        plt.rcParams.update({
            'font.family': 'sans-serif',
            'font.sans-serif': ['Arial', 'Helvetica', 'Calibri', 'DejaVu Sans'],
            'font.size': 12,
            'axes.titlesize': 15,
            'axes.titleweight': 'bold',
            'axes.labelsize': 13,
            'xtick.labelsize': 11,
            'ytick.labelsize': 11,
            'legend.fontsize': 11,
            'text.color': '#2C3E50',
            'axes.labelcolor': '#2C3E50',
            'xtick.color': '#2C3E50',
            'ytick.color': '#2C3E50'
        })

        # Layout & Lines
        plt.rcParams.update({
            'axes.spines.top': False,
            'axes.spines.right': False,
            'axes.linewidth': 1.2,
            'grid.color': '#E0E0E0',
            'grid.linestyle': ':',
            'grid.linewidth': 1.0,
            'axes.grid': True,
            'axes.axisbelow': True
        })

        self.colors = {
            'clean': '#388E3C',
            'noisy': '#B0BEC5',
            'denoised': '#D32F2F',
            'potential': '#5D6D7E',
            'eigen': '#1565C0',
            'tau': '#FF8A65',
            'text': '#2C3E50',
        }

    def get_save_path(self, filename: str) -> str:
        return os.path.join(self.session_dir, filename)

    def _save(self, fig, filename: str) -> str:
        filepath = self.get_save_path(filename)
        fig.tight_layout()
        fig.savefig(filepath, dpi=150, bbox_inches='tight')
        plt.close(fig)
        logger.info(f"   [Plot] Saved {filepath}")
        return filepath

    # ============================================================================
    # RUN PLOTS
    # ============================================================================

    def plot_spectrum(self, artifacts, prefix: str = "run") -> str:
        """Eigenvalues in stored (descending) order."""
        basis = artifacts.basis
        fig, ax = plt.subplots(figsize=(9, 5), dpi=150)
        ax.plot(np.arange(1, basis.count + 1), basis.eigenvalues, color=self.colors['eigen'], linewidth=2)
        ax.set_xlabel("Index i", fontweight='bold')
        ax.set_ylabel("Eigenvalue", fontweight='bold')
        ax.set_title("Hamiltonian spectrum", loc='left', pad=15)
        return self._save(fig, f"{prefix}_spectrum.png")

    def plot_eigenvector(self, artifacts, prefix: str = "run", index: Optional[int] = None) -> str:
        """Potential with one eigenvector; the dashed line marks its eigenvalue (1D data)."""
        potential = artifacts.potential
        basis = artifacts.basis
        index = select_mid_eigenvector(basis, potential) if index is None else index
        psi = basis.vector(index)
        energy = basis.eigenvalues[index - 1]

        if potential.kind == "image_2d":
            fig, axes = plt.subplots(1, 2, figsize=(11, 5), dpi=150)
            axes[0].imshow(potential.to_array(), cmap='gray')
            axes[0].set_title("Potential", loc='left')
            im = axes[1].imshow(psi.reshape(potential.shape), cmap='RdBu_r')
            axes[1].set_title(f"Eigenvector {index} (E={energy:.3g})", loc='left')
            fig.colorbar(im, ax=axes[1], fraction=0.046)
            for ax in axes:
                ax.grid(False)
                ax.set_xticks([])
                ax.set_yticks([])
            return self._save(fig, f"{prefix}_eigenvector.png")

        x = np.arange(1, potential.size + 1)
        fig, ax1 = plt.subplots(figsize=(10, 5), dpi=150)
        ax1.plot(x, potential.values, color=self.colors['potential'], linewidth=2, label='Smoothed potential')
        ax1.axhline(energy, color=self.colors['potential'], linestyle='--', linewidth=1.5, label='Eigenvalue')
        ax1.set_xlabel("Sample", fontweight='bold')
        ax1.set_ylabel("Potential", color=self.colors['potential'], fontweight='bold')

        ax2 = ax1.twinx()
        ax2.plot(x, psi, color=self.colors['eigen'], linewidth=1.5, label=f'Eigenvector {index}')
        ax2.set_ylabel("Eigenvector", color=self.colors['eigen'], fontweight='bold')
        ax2.grid(False)
        ax1.set_title("Local frequency of an eigenvector", loc='left', pad=15)
        fig.legend(loc='upper right', frameon=False)
        return self._save(fig, f"{prefix}_eigenvector.png")

    def plot_coefficients(self, artifacts, prefix: str = "run") -> str:
        """|alpha_i| (log scale) and the threshold weights by stored index."""
        basis = artifacts.basis
        x = np.arange(1, basis.count + 1)
        fig, ax1 = plt.subplots(figsize=(10, 5), dpi=150)
        ax1.semilogy(x, np.abs(artifacts.coefficients.alpha) + 1e-300, '.', color=self.colors['eigen'], markersize=4)
        ax1.set_xlabel("Index i (descending eigenvalue)", fontweight='bold')
        ax1.set_ylabel("|alpha_i|", color=self.colors['eigen'], fontweight='bold')

        ax2 = ax1.twinx()
        ax2.plot(x, weights(basis, artifacts.config.profile()), color=self.colors['tau'], linewidth=2)
        ax2.set_ylabel("tau_i", color=self.colors['tau'], fontweight='bold')
        ax2.set_ylim(-0.05, 1.1)
        ax2.grid(False)
        ax1.set_title("Coefficients and threshold", loc='left', pad=15)
        return self._save(fig, f"{prefix}_coefficients.png")

    def plot_fields(self, artifacts, prefix: str = "run") -> str:
        """Clean / noisy / denoised panels (images) or overlaid curves (signals)."""
        panels = [("Noisy", artifacts.noisy), ("Denoised", artifacts.denoised)]
        if artifacts.clean is not None:
            panels.insert(0, ("Clean", artifacts.clean))

        if artifacts.noisy.kind == "image_2d":
            fig, axes = plt.subplots(1, len(panels), figsize=(4.5 * len(panels), 4.5), dpi=150)
            vmax = max(float(f.values.max()) for _, f in panels)
            for ax, (title, f) in zip(axes, panels):
                ax.imshow(f.to_array(), cmap='gray', vmin=0, vmax=vmax)
                ax.set_title(title, loc='left')
                ax.grid(False)
                ax.set_xticks([])
                ax.set_yticks([])
            return self._save(fig, f"{prefix}_fields.png")

        fig, ax = plt.subplots(figsize=(11, 5), dpi=150)
        x = np.arange(1, artifacts.noisy.size + 1)
        for title, f in panels:
            ax.plot(x, f.values, color=self.colors[title.lower()], linewidth=1.2 if title == "Noisy" else 2,
                    label=title)
        ax.set_xlabel("Sample", fontweight='bold')
        ax.set_ylabel("Value", fontweight='bold')
        ax.set_title("Denoising result", loc='left', pad=15)
        ax.legend(frameon=False)
        return self._save(fig, f"{prefix}_fields.png")

    def plot_run(self, artifacts, prefix: str = "run") -> List[str]:
        return [
            self.plot_spectrum(artifacts, prefix),
            self.plot_eigenvector(artifacts, prefix),
            self.plot_coefficients(artifacts, prefix),
            self.plot_fields(artifacts, prefix),
        ]

    # ============================================================================
    # COMPARISON PLOTS
    # ============================================================================

    def plot_method_comparison(self, reports: List[DenoiseReport], filename: str = "method_comparison.png") -> Optional[str]:
        """Mean PSNR per method (bars) with the per-seed values as points."""
        if not reports:
            return None
        methods = [m for m in METHOD_LABELS if any(r.method == m for r in reports)]
        values = [[r.psnr_db for r in reports if r.method == m and np.isfinite(r.psnr_db)] for m in methods]
        means = [float(np.mean(v)) if v else 0.0 for v in values]

        fig, ax = plt.subplots(figsize=(8, 5), dpi=150)
        bars = ax.bar([METHOD_LABELS[m] for m in methods], means, color=self.colors['potential'],
                      alpha=0.85, width=0.5, edgecolor='none')
        for i, v in enumerate(values):
            ax.scatter([i] * len(v), v, color=self.colors['denoised'], zorder=3, s=25)
        for bar in bars:
            height = bar.get_height()
            ax.text(bar.get_x() + bar.get_width() / 2., height, f'{height:.2f}',
                    ha='center', va='bottom', fontsize=10, fontweight='bold', color=self.colors['text'])
        ax.set_ylabel("PSNR (dB)", fontweight='bold')
        first = reports[0]
        ax.set_title(f"Method comparison\n{first.data_name} / {first.noise}", loc='left', pad=15)
        return self._save(fig, filename)

