"""SVG rendering of HOM curves and fit overlays.

Plots are deterministic: fixed hash salt, no embedded creation date, so
re-running a pipeline reproduces the output byte for byte.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .experiment import HomCurve  # noqa: E402
from .fitting import SIGMA_TO_FWHM, gaussian_dip_model  # noqa: E402

__all__ = ["plot_curve"]


def plot_curve(
    curve: HomCurve,
    fit_report: Optional[dict] = None,
    out: Union[str, Path] = "hom_curve.svg",
) -> None:
    """Render the curve (and optional fit) to a standalone SVG file."""
    plt.rcParams["svg.hashsalt"] = "homsim"
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    try:
        y = curve.counts if curve.counts is not None else curve.expected
        label = "counts" if curve.counts is not None else "expected"
        if curve.counts is not None:
            ax.errorbar(
                curve.delays, y, yerr=np.sqrt(np.maximum(y, 1.0)),
                fmt="o", ms=3.5, lw=1, capsize=2, label=label,
            )
        else:
            ax.plot(curve.delays, y, "o", ms=3.5, label=label)

        if fit_report is not None:
            theta = np.array([
                fit_report["baseline_counts"],
                fit_report["visibility"],
                fit_report["center_ps"],
                fit_report["dip_fwhm_ps"] / SIGMA_TO_FWHM,
            ])
            tau = np.linspace(curve.delays[0], curve.delays[-1], 400)
            ax.plot(tau, gaussian_dip_model(theta, tau), "-", lw=1.5, label="fit")
            # annotate the FWHM at half depth
            b, v, c, d = (fit_report["baseline_counts"], fit_report["visibility"],
                          fit_report["center_ps"], fit_report["dip_fwhm_ps"])
            half_level = b * (1.0 - 0.5 * v)
            ax.annotate(
                "", xy=(c - d / 2.0, half_level), xytext=(c + d / 2.0, half_level),
                arrowprops=dict(arrowstyle="<->", lw=1.0),
            )
            ax.text(c, half_level, f" FWHM = {d:.4g} ps", va="bottom", ha="left", fontsize=9)

        ax.set_xlabel("relative delay (ps)")
        ax.set_ylabel("coincidences per point")
        ax.legend(loc="lower right")
        fig.tight_layout()
        fig.savefig(out, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
