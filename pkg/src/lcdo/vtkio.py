"""Legacy ASCII VTK output (STRUCTURED_POINTS) for the field state.

One VECTORS block for the director and two SCALARS blocks for phi and v,
points in x-fastest order, values formatted with round-trip precision so a
written file is grep-able and byte-deterministic.
"""

from __future__ import annotations

import numpy as np

from .grid import FieldState

__all__ = ["write_vtk"]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_vtk(path: str, state: FieldState, title: str = "lcdo fields") -> None:
    grid = state.grid
    hx, hy, hz = grid.spacing
    npoints = grid.nx * grid.ny * grid.nz
    n_wire = state.n.transpose(2, 1, 0, 3).reshape(-1, 3)
    phi_wire = state.phi.transpose(2, 1, 0).reshape(-1)
    v_wire = state.v.transpose(2, 1, 0).reshape(-1)
    lines = [
        "# vtk DataFile Version 3.0",
        title,
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        f"DIMENSIONS {grid.nx} {grid.ny} {grid.nz}",
        f"ORIGIN {_fmt(hx / 2)} {_fmt(hy / 2)} {_fmt(hz / 2)}",
        f"SPACING {_fmt(hx)} {_fmt(hy)} {_fmt(hz)}",
        f"POINT_DATA {npoints}",
        "VECTORS director double",
    ]
    lines.extend(" ".join(_fmt(c) for c in row) for row in n_wire)
    lines.append("SCALARS phi double 1")
    lines.append("LOOKUP_TABLE default")
    lines.extend(_fmt(val) for val in phi_wire)
    lines.append("SCALARS v double 1")
    lines.append("LOOKUP_TABLE default")
    lines.extend(_fmt(val) for val in v_wire)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
