"""Figure builders (pure: data in, matplotlib Figure out)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .readers import COMPONENTS, SweepData, TraceData, VtkFields

__all__ = ["trace_figure", "sweep_figure", "slice_figure", "slice_planes"]

COMPONENT_LABELS = {
    "e_bulk": "bulk",
    "e_perimeter": "perimeter",
    "e_anchor_outer": "outer anchoring",
    "e_inner_isotropic": "inner boundary",
    "e_inner_anchor": "inner anchoring",
}


def trace_figure(data: TraceData, log_y: bool = False):
    it = data["iter"]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    positive_parts = [data[c] for c in COMPONENTS]
    if log_y:
        # stacked areas need positive values; fall back to lines on log axes
        for name in COMPONENTS:
            ax.plot(it, data[name], label=COMPONENT_LABELS[name], lw=1.0)
        ax.set_yscale("log")
    else:
        ax.stackplot(it, positive_parts, labels=[COMPONENT_LABELS[c] for c in COMPONENTS], alpha=0.55)
    ax.plot(it, data["e_total"], "k-", lw=1.8, label="total")
    ax.set_xlabel("iteration")
    ax.set_ylabel("energy")
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title("energy decay")
    fig.tight_layout()
    return fig


def sweep_figure(data: SweepData, asymptote: float | None = None):
    lam = data["lambda"]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.5, 4.0))
    ax1.semilogx(lam, data["e_total"], "o-", lw=1.4)
    if asymptote is not None:
        ax1.axhline(asymptote, color="crimson", ls="--", lw=1.0, label="tangential limit")
        ax1.legend(fontsize=8)
    ax1.set_xlabel("anchoring strength")
    ax1.set_ylabel("final total energy")
    ax1.set_title("penalization ladder")
    ax2.loglog(lam, np.maximum(data["max_n_dot_nu"], 1e-16), "s-", lw=1.4, color="darkgreen")
    ax2.set_xlabel("anchoring strength")
    ax2.set_ylabel("max |n . nu|")
    ax2.set_title("interface residual")
    fig.tight_layout()
    return fig


def slice_planes(fields: VtkFields, axis: int, index: int):
    """Extract the 2D slice arrays (phi, v, in-plane director, axes extents)."""
    if axis not in (0, 1, 2):
        raise ValueError(f"axis must be 0, 1 or 2, got {axis}")
    n = fields.dims[axis]
    if not 0 <= index < n:
        raise ValueError(f"slice index {index} out of range [0, {n}) along axis {axis}")
    sl = [slice(None)] * 3
    sl[axis] = index
    sl = tuple(sl)
    phi = fields.phi[sl]
    v = fields.v[sl]
    keep = [a for a in range(3) if a != axis]
    director = fields.director[sl][..., keep]
    extents = []
    for a in keep:
        h = fields.spacing[a]
        extents.append((fields.origin[a], fields.origin[a] + h * (fields.dims[a] - 1)))
    return phi, v, director, keep, extents


def slice_figure(fields: VtkFields, axis: int, index: int, subsample: int = 2):
    if subsample < 1:
        raise ValueError("subsample factor must be >= 1")
    phi, v, director, keep, extents = slice_planes(fields, axis, index)
    names = "xyz"
    fig, ax = plt.subplots(figsize=(6.0, 5.4))
    extent = (*extents[0], *extents[1])
    # v shading: dark bands mark open inner boundaries
    ax.imshow(
        v.T,
        origin="lower",
        extent=extent,
        cmap="gray",
        vmin=0.0,
        vmax=1.0,
        alpha=0.9,
        interpolation="nearest",
    )
    h0 = (extents[0][1] - extents[0][0]) / max(1, phi.shape[0] - 1)
    h1 = (extents[1][1] - extents[1][0]) / max(1, phi.shape[1] - 1)
    x0 = extents[0][0] + np.arange(phi.shape[0]) * h0
    x1 = extents[1][0] + np.arange(phi.shape[1]) * h1
    ax.contour(x0, x1, phi.T, levels=[0.5], colors="crimson", linewidths=1.6)
    ax.contourf(x0, x1, phi.T, levels=[0.5, 1.01], colors=["tab:blue"], alpha=0.18)
    ss = subsample
    qx, qy = np.meshgrid(x0[::ss], x1[::ss], indexing="ij")
    ax.quiver(
        qx,
        qy,
        director[::ss, ::ss, 0],
        director[::ss, ::ss, 1],
        angles="xy",
        scale_units="xy",
        scale=1.2 / max(h0, h1) / ss,
        width=0.0035,
        color="k",
        alpha=0.75,
    )
    ax.set_xlabel(names[keep[0]])
    ax.set_ylabel(names[keep[1]])
    ax.set_title(f"slice {names[axis]} = {index}")
    ax.set_aspect("equal")
    fig.tight_layout()
    return fig
