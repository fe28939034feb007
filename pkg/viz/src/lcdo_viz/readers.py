"""Readers for the solver's file formats: trace.csv, sweep.csv, legacy VTK.

Readers re-validate the writer-side invariants (component sum, energy
monotonicity within an interface-width rung, strict sweep ladder) and fail
loudly on violation, so plots never silently mask solver bugs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TraceData",
    "SweepData",
    "VtkFields",
    "TraceFormatError",
    "SweepFormatError",
    "VtkFormatError",
    "read_trace",
    "read_sweep",
    "read_vtk",
]

TRACE_COLUMNS = (
    "iter",
    "e_total",
    "e_bulk",
    "e_perimeter",
    "e_anchor_outer",
    "e_inner_isotropic",
    "e_inner_anchor",
    "volume",
    "grad_norm_n",
    "grad_norm_phi",
    "grad_norm_v",
    "tau_n",
    "tau_phi",
    "tau_v",
    "eps_phi",
    "eps_v",
)

SWEEP_COLUMNS = (
    "lambda",
    "e_total",
    "e_bulk",
    "e_perimeter",
    "e_anchor_outer",
    "e_inner_isotropic",
    "e_inner_anchor",
    "volume",
    "max_n_dot_nu",
    "nondecreasing",
)

COMPONENTS = ("e_bulk", "e_perimeter", "e_anchor_outer", "e_inner_isotropic", "e_inner_anchor")

SUM_TOL = 1e-9
MONOTONE_TOL = 1e-10


class TraceFormatError(ValueError):
    pass


class SweepFormatError(ValueError):
    pass


class VtkFormatError(ValueError):
    pass


@dataclass
class TraceData:
    columns: dict[str, np.ndarray]

    def __getitem__(self, key: str) -> np.ndarray:
        return self.columns[key]


@dataclass
class SweepData:
    columns: dict[str, np.ndarray]

    def __getitem__(self, key: str) -> np.ndarray:
        return self.columns[key]


@dataclass
class VtkFields:
    dims: tuple[int, int, int]
    origin: tuple[float, float, float]
    spacing: tuple[float, float, float]
    director: np.ndarray  # (nx, ny, nz, 3)
    phi: np.ndarray       # (nx, ny, nz)
    v: np.ndarray


def _read_csv(path: str, expected: tuple[str, ...], error: type) -> dict[str, np.ndarray]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise error(f"{path}: empty file") from None
        if tuple(header) != expected:
            missing = [c for c in expected if c not in header]
            extra = [c for c in header if c not in expected]
            detail = []
            if missing:
                detail.append("missing columns: " + ", ".join(missing))
            if extra:
                detail.append("unexpected columns: " + ", ".join(extra))
            if not detail:
                detail.append("columns out of order")
            raise error(f"{path}: " + "; ".join(detail))
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(expected):
                raise error(f"{path}:{lineno}: expected {len(expected)} fields, got {len(row)}")
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise error(f"{path}:{lineno}: non-numeric value ({exc})") from None
    if not rows:
        raise error(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    return {name: data[:, i] for i, name in enumerate(expected)}


def _check_component_sum(cols: dict[str, np.ndarray], path: str, error: type) -> None:
    total = cols["e_total"]
    parts = sum(cols[c] for c in COMPONENTS)
    worst = float(np.max(np.abs(parts - total) / np.maximum(1.0, np.abs(total))))
    if worst > SUM_TOL:
        raise error(f"{path}: component sum deviates from e_total by {worst:.2e} (> {SUM_TOL})")


def read_trace(path: str) -> TraceData:
    cols = _read_csv(path, TRACE_COLUMNS, TraceFormatError)
    _check_component_sum(cols, path, TraceFormatError)
    e = cols["e_total"]
    rung = np.stack([cols["eps_phi"], cols["eps_v"]], axis=1)
    same_rung = np.all(rung[1:] == rung[:-1], axis=1)
    rises = (np.diff(e) > MONOTONE_TOL * np.maximum(1.0, np.abs(e[:-1]))) & same_rung
    if np.any(rises):
        i = int(np.argmax(rises))
        raise TraceFormatError(
            f"{path}: energy increases at iter {int(cols['iter'][i + 1])} "
            f"({e[i]:.12g} -> {e[i + 1]:.12g}) within one eps rung"
        )
    return TraceData(cols)


def read_sweep(path: str) -> SweepData:
    cols = _read_csv(path, SWEEP_COLUMNS, SweepFormatError)
    _check_component_sum(cols, path, SweepFormatError)
    lam = cols["lambda"]
    if len(lam) == 0:
        raise SweepFormatError(f"{path}: empty ladder")
    if len(np.unique(lam)) != len(lam):
        raise SweepFormatError(f"{path}: duplicate lambda rows (ladder must be strict)")
    if np.any(np.diff(lam) <= 0):
        raise SweepFormatError(f"{path}: lambda column must increase strictly")
    return SweepData(cols)


class _OffsetReader:
    """Line reader that tracks the byte offset of the current line."""

    def __init__(self, path: str):
        self.path = path
        with open(path, "rb") as fh:
            self.blob = fh.read()
        self.pos = 0
        self.line_start = 0

    def next_line(self) -> str:
        if self.pos >= len(self.blob):
            raise VtkFormatError(f"{self.path}: unexpected end of file at offset {self.pos}")
        self.line_start = self.pos
        end = self.blob.find(b"\n", self.pos)
        if end == -1:
            end = len(self.blob)
        line = self.blob[self.pos : end].decode("utf-8", errors="replace")
        self.pos = end + 1
        return line

    def fail(self, expected: str, got: str) -> VtkFormatError:
        return VtkFormatError(
            f"{self.path}: offset {self.line_start}: expected {expected}, got {got!r}"
        )


def read_vtk(path: str) -> VtkFields:
    r = _OffsetReader(path)
    line = r.next_line()
    if not line.startswith("# vtk DataFile Version"):
        raise r.fail("legacy VTK header", line)
    r.next_line()  # title, free-form
    line = r.next_line()
    if line != "ASCII":
        raise r.fail("'ASCII'", line)
    line = r.next_line()
    if line != "DATASET STRUCTURED_POINTS":
        raise r.fail("'DATASET STRUCTURED_POINTS'", line)

    def keyword_values(keyword: str, count: int, caster):
        text = r.next_line()
        parts = text.split()
        if len(parts) != count + 1 or parts[0] != keyword:
            raise r.fail(f"'{keyword}' with {count} values", text)
        try:
            return tuple(caster(p) for p in parts[1:])
        except ValueError:
            raise r.fail(f"numeric {keyword} values", text) from None

    dims = keyword_values("DIMENSIONS", 3, int)
    origin = keyword_values("ORIGIN", 3, float)
    spacing = keyword_values("SPACING", 3, float)
    (npoints,) = keyword_values("POINT_DATA", 1, int)
    nx, ny, nz = dims
    if npoints != nx * ny * nz:
        raise VtkFormatError(
            f"{path}: offset {r.line_start}: POINT_DATA {npoints} != nx ny nz = {nx * ny * nz}"
        )

    line = r.next_line()
    if line.split() != ["VECTORS", "director", "double"]:
        raise r.fail("'VECTORS director double'", line)
    director = np.empty((npoints, 3))
    for i in range(npoints):
        text = r.next_line()
        parts = text.split()
        if len(parts) != 3:
            raise r.fail("3 vector components", text)
        try:
            director[i] = [float(p) for p in parts]
        except ValueError:
            raise r.fail("numeric vector components", text) from None

    def scalar_block(name: str) -> np.ndarray:
        text = r.next_line()
        if text.split() != ["SCALARS", name, "double", "1"]:
            raise r.fail(f"'SCALARS {name} double 1'", text)
        text = r.next_line()
        if text != "LOOKUP_TABLE default":
            raise r.fail("'LOOKUP_TABLE default'", text)
        values = np.empty(npoints)
        for i in range(npoints):
            raw = r.next_line()
            try:
                values[i] = float(raw)
            except ValueError:
                raise r.fail(f"one {name} value", raw) from None
        return values

    phi = scalar_block("phi")
    v = scalar_block("v")

    # x-fastest wire order -> (nx, ny, nz[, 3]) arrays
    director = np.ascontiguousarray(director.reshape(nz, ny, nx, 3).transpose(2, 1, 0, 3))
    phi = np.ascontiguousarray(phi.reshape(nz, ny, nx).transpose(2, 1, 0))
    v = np.ascontiguousarray(v.reshape(nz, ny, nx).transpose(2, 1, 0))
    return VtkFields(dims=dims, origin=origin, spacing=spacing, director=director, phi=phi, v=v)
