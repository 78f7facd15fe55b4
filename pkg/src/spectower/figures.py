"""Figure rendering for verification reports and spectrum sweeps.

Everything is written to files through the Agg backend; no interactive
windows are ever opened.
"""

from __future__ import annotations

import math
import re
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spectra import Interval, Lattice, Point, RayDown, RayUp, SpectrumSpec
from .symmetric import eigh_dense
from .tower import Tower, assemble_truncation
from .verify import Report

__all__ = [
    "render_tower_figures",
    "render_spectrum_figure",
]

_FIGSIZE = (6.4, 4.0)
_DIST_FLOOR = 1e-17  # keeps exact zeros visible on log axes


def _tidy(ax):
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)


def _shade_set(ax, spec: SpectrumSpec, lo: float, hi: float, axis: str = "x"):
    """Shade the parts of the set inside [lo, hi] on the chosen axis."""
    span = ax.axvspan if axis == "x" else ax.axhspan
    line = ax.axvline if axis == "x" else ax.axhline
    band = dict(color="tab:green", alpha=0.18, linewidth=0, zorder=0)
    tick = dict(color="tab:green", alpha=0.45, linewidth=1.0, zorder=0)
    for piece in spec.pieces:
        if isinstance(piece, Interval) and piece.b >= lo and piece.a <= hi:
            span(max(piece.a, lo), min(piece.b, hi), **band)
        elif isinstance(piece, RayUp) and piece.a <= hi:
            span(max(piece.a, lo), hi, **band)
        elif isinstance(piece, RayDown) and piece.b >= lo:
            span(lo, min(piece.b, hi), **band)
        elif isinstance(piece, Point) and lo <= piece.a <= hi:
            line(piece.a, **tick)
        elif isinstance(piece, Lattice):
            k = max(0, math.ceil((lo - piece.c) / piece.d))
            shown = 0
            while piece.c + k * piece.d <= hi and shown < 200:
                line(piece.c + k * piece.d, **tick)
                k += 1
                shown += 1


def _series_from_report(report: Report, pattern: str):
    rx = re.compile(pattern)
    pairs = []
    for c in report.checks:
        m = rx.fullmatch(c.name)
        if m:
            pairs.append((int(m.group(1)), c.measured, c.bound))
    pairs.sort()
    return pairs


def render_tower_figures(tower: Tower, report: Report, outdir, k_extra: int = 10):
    """Write the standard verification figures; returns the created paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    created = []

    closeness = _series_from_report(report, r"closeness\[(\d+)\]")
    if closeness:
        ns = [p[0] for p in closeness]
        fig, ax = plt.subplots(figsize=_FIGSIZE)
        ax.semilogy(ns, [max(p[1], _DIST_FLOOR) for p in closeness], "o-",
                    label="step distance from direct sum")
        ax.semilogy(ns, [p[2] for p in closeness], "k--", label="budget")
        ax.set_xlabel("step n")
        ax.set_ylabel("operator norm")
        ax.legend(frameon=False)
        _tidy(ax)
        path = outdir / "closeness.png"
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        created.append(path)

    residuals = _series_from_report(report, r"spectrum\[(\d+)\]")
    floors = _series_from_report(report, r"edge_floor\[(\d+)\]")
    if residuals:
        fig, axes = plt.subplots(2 if floors else 1, 1, figsize=(6.4, 6.0 if floors else 4.0),
                                 squeeze=False)
        ax = axes[0][0]
        ax.semilogy([p[0] for p in residuals],
                    [max(p[1], _DIST_FLOOR) for p in residuals], "o-",
                    label="spectrum residual")
        ax.axhline(residuals[0][2], color="k", linestyle="--", label="tolerance")
        ax.set_ylabel("max |eigenvalue - target|")
        ax.legend(frameon=False)
        _tidy(ax)
        if floors:
            ax2 = axes[1][0]
            ax2.semilogy([p[0] for p in floors], [p[1] for p in floors], "o-",
                         label="smallest edge magnitude")
            ax2.axhline(floors[0][2], color="k", linestyle="--", label="edge floor")
            ax2.set_ylabel("|entry|")
            ax2.legend(frameon=False)
            _tidy(ax2)
        axes[-1][0].set_xlabel("step n")
        path = outdir / "residuals.png"
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        created.append(path)

    n = tower.n_steps
    order = n + k_extra
    values = eigh_dense(assemble_truncation(tower, n, order).to_dense()).values
    from .spectra import distance_to_set

    dists = np.maximum(distance_to_set(tower.spec, values), _DIST_FLOOR)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    _shade_set(ax, tower.spec, float(values.min()) - 0.5, float(values.max()) + 0.5)
    ax.semilogy(values, dists, "o", markersize=4)
    ax.set_xlabel(f"eigenvalues of the order-{order} truncation")
    ax.set_ylabel("distance to the target set")
    _tidy(ax)
    path = outdir / "truncation_spectrum.png"
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    created.append(path)
    return created


def render_spectrum_figure(tower: Tower, rows, outpath):
    """Scatter of truncation eigenvalues per step, shaded by the target set.

    rows are (n, order, index, eigenvalue, distance) tuples as emitted in the
    spectrum CSV.
    """
    outpath = Path(outpath)
    outpath.parent.mkdir(parents=True, exist_ok=True)
    ns = np.array([r[0] for r in rows], dtype=float)
    vals = np.array([r[3] for r in rows], dtype=float)
    dists = np.array([r[4] for r in rows], dtype=float)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    _shade_set(ax, tower.spec, float(vals.min()) - 0.5, float(vals.max()) + 0.5, axis="y")
    sc = ax.scatter(ns, vals, c=np.log10(np.maximum(dists, _DIST_FLOOR)),
                    s=14, cmap="viridis")
    fig.colorbar(sc, ax=ax, label="log10 distance to the target set")
    ax.set_xlabel("step n")
    ax.set_ylabel("truncation eigenvalues")
    _tidy(ax)
    fig.savefig(outpath, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return outpath
