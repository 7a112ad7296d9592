"""Figure rendering for sweep reports and scaling fits.

Uses the Agg backend so figures render headlessly to files next to the CSV
output. Plots are diagnostic, not publication-tuned: log-log scaling panels
with the fitted power law, and per-algorithm summary panels.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_fit_figure", "render_sweep_figures"]

# (y column, log-log?) panels per algorithm; columns absent from a sweep are skipped.
_PANELS = {
    "hitting": [("ht", True), ("ht_plus", True)],
    "cg_prime": [("t1", True), ("nu_final", False), ("mu", True)],
    "interpolated": [("T", True), ("success_probability", False), ("dephasing_error", False)],
}


def render_fit_figure(xs, ys, exponent, r_squared, x_label, y_label, path) -> str:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(xs, ys, "o", label="data")
    grid = np.geomspace(xs.min(), xs.max(), 64)
    anchor = ys[0] / xs[0] ** exponent
    ax.loglog(grid, anchor * grid**exponent, "--",
              label=f"slope {exponent:.3f} (R$^2$={r_squared:.4f})")
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def _column(rows, name):
    return [row.get(name) for row in rows]


def render_sweep_figures(rows, algorithm: str, out_stem: str) -> list[str]:
    """One PNG per configured panel, written as <out_stem>_<column>.png."""
    written = []
    ns = _column(rows, "n")
    for column, log_scale in _PANELS.get(algorithm, []):
        ys = _column(rows, column)
        pairs = [(x, y) for x, y in zip(ns, ys) if x is not None and y is not None]
        if len(pairs) < 2:
            continue
        xs = [p[0] for p in pairs]
        vals = [p[1] for p in pairs]
        fig, ax = plt.subplots(figsize=(5, 4))
        if log_scale and min(vals) > 0:
            ax.loglog(xs, vals, "o-")
        else:
            ax.semilogx(xs, vals, "o-")
        ax.set_xlabel("n")
        ax.set_ylabel(column)
        fig.tight_layout()
        path = f"{out_stem}_{column}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
