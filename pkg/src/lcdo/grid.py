"""Uniform cell-centered Cartesian grids and finite-difference vector calculus.

Fields are plain numpy arrays: scalars of shape (nx, ny, nz), vectors of
shape (nx, ny, nz, 3), with axis order (x, y, z) and cell centers at
(i + 1/2) h.  Derivatives are second-order central in the interior and
second-order one-sided on the box faces; exact adjoints of the derivative
operators are provided so that discrete energy gradients can be assembled
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridSpec",
    "FieldState",
    "gradient_fd",
    "jacobian_fd",
    "divergence",
    "curl",
    "diffuse_normal",
    "integrate",
    "normalize_director",
    "deriv",
    "deriv_adjoint",
]

MIN_CELLS = 8
ZERO_NORM_TOL = 1e-14
FALLBACK_AXIS = np.array([0.0, 0.0, 1.0])  # deterministic unit fallback for zero vectors


@dataclass(frozen=True)
class GridSpec:
    """Cell counts and box lengths of a uniform grid; spacing h_i = L_i / n_i."""

    nx: int
    ny: int
    nz: int
    lx: float
    ly: float
    lz: float

    def __post_init__(self) -> None:
        for name in ("nx", "ny", "nz"):
            n = getattr(self, name)
            if int(n) != n or n < MIN_CELLS:
                raise ValueError(f"{name} = {n} must be an integer >= {MIN_CELLS}")
        for name in ("lx", "ly", "lz"):
            length = getattr(self, name)
            if not (np.isfinite(length) and length > 0.0):
                raise ValueError(f"{name} = {length} must be positive and finite")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def spacing(self) -> tuple[float, float, float]:
        return (self.lx / self.nx, self.ly / self.ny, self.lz / self.nz)

    @property
    def max_spacing(self) -> float:
        return max(self.spacing)

    @property
    def cell_volume(self) -> float:
        hx, hy, hz = self.spacing
        return hx * hy * hz

    @property
    def box_volume(self) -> float:
        return self.lx * self.ly * self.lz

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Coordinate arrays broadcastable to the scalar field shape."""
        hx, hy, hz = self.spacing
        x = (np.arange(self.nx) + 0.5) * hx
        y = (np.arange(self.ny) + 0.5) * hy
        z = (np.arange(self.nz) + 0.5) * hz
        return (
            x[:, None, None],
            y[None, :, None],
            z[None, None, :],
        )

    def scalar_like(self, value: float = 0.0) -> np.ndarray:
        return np.full(self.shape, value, dtype=float)

    def vector_like(self, value: tuple[float, float, float] = (0.0, 0.0, 0.0)) -> np.ndarray:
        out = np.empty(self.shape + (3,), dtype=float)
        out[...] = np.asarray(value, dtype=float)
        return out

    def check_scalar(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape != self.shape:
            raise ValueError(f"scalar field shape {f.shape} does not match grid {self.shape}")
        if not np.all(np.isfinite(f)):
            raise ValueError("scalar field contains non-finite entries")
        return f

    def check_vector(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != self.shape + (3,):
            raise ValueError(f"vector field shape {u.shape} does not match grid {self.shape}")
        if not np.all(np.isfinite(u)):
            raise ValueError("vector field contains non-finite entries")
        return u


@dataclass
class FieldState:
    """Director n, shape phase field phi and inner-boundary field v on one grid.

    phi and v live in [0, 1]; n is unit wherever the state is used (the
    optimizer renormalizes after every director update).
    """

    grid: GridSpec
    n: np.ndarray
    phi: np.ndarray
    v: np.ndarray

    def validate(self, cutoff: float = 0.5, unit_tol: float = 1e-9) -> None:
        self.grid.check_vector(self.n)
        self.grid.check_scalar(self.phi)
        self.grid.check_scalar(self.v)
        for name, f in (("phi", self.phi), ("v", self.v)):
            if f.min() < -1e-12 or f.max() > 1.0 + 1e-12:
                raise ValueError(f"{name} leaves [0,1]: range [{f.min()}, {f.max()}]")
        mask = self.phi > cutoff
        if np.any(mask):
            norms = np.sqrt(np.sum(self.n[mask] ** 2, axis=-1))
            worst = float(np.max(np.abs(norms - 1.0)))
            if worst > unit_tol:
                raise ValueError(f"director norm deviates by {worst:.3e} where phi > {cutoff}")

    def copy(self) -> "FieldState":
        return FieldState(self.grid, self.n.copy(), self.phi.copy(), self.v.copy())


def _axis_slices(ndim: int, axis: int, s: slice | int) -> tuple:
    idx: list = [slice(None)] * ndim
    idx[axis] = s
    return tuple(idx)


def deriv(f: np.ndarray, axis: int, h: float) -> np.ndarray:
    """d/dx_axis with central interior stencil and one-sided face closures."""
    n = f.shape[axis]
    if n < 3:
        raise ValueError(f"axis {axis} has {n} cells; need >= 3 for second-order differences")
    sl = lambda s: _axis_slices(f.ndim, axis, s)
    out = np.empty_like(f)
    out[sl(slice(1, -1))] = (f[sl(slice(2, None))] - f[sl(slice(0, -2))]) / (2.0 * h)
    out[sl(0)] = (-3.0 * f[sl(0)] + 4.0 * f[sl(1)] - f[sl(2)]) / (2.0 * h)
    out[sl(-1)] = (3.0 * f[sl(-1)] - 4.0 * f[sl(-2)] + f[sl(-3)]) / (2.0 * h)
    return out


def deriv_adjoint(w: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Exact transpose of :func:`deriv`: <deriv(f), w> = <f, deriv_adjoint(w)>."""
    n = w.shape[axis]
    if n < 3:
        raise ValueError(f"axis {axis} has {n} cells; need >= 3")
    sl = lambda s: _axis_slices(w.ndim, axis, s)
    out = np.zeros_like(w)
    inv = 1.0 / (2.0 * h)
    # interior rows scatter +/- onto their neighbours
    out[sl(slice(2, None))] += w[sl(slice(1, -1))] * inv
    out[sl(slice(0, -2))] -= w[sl(slice(1, -1))] * inv
    # one-sided row at the low face
    out[sl(0)] += -3.0 * inv * w[sl(0)]
    out[sl(1)] += 4.0 * inv * w[sl(0)]
    out[sl(2)] += -inv * w[sl(0)]
    # one-sided row at the high face
    out[sl(-1)] += 3.0 * inv * w[sl(-1)]
    out[sl(-2)] += -4.0 * inv * w[sl(-1)]
    out[sl(-3)] += inv * w[sl(-1)]
    return out


def gradient_fd(grid: GridSpec, f: np.ndarray) -> np.ndarray:
    """Gradient of a scalar field, shape (nx, ny, nz, 3)."""
    f = grid.check_scalar(f)
    h = grid.spacing
    return np.stack([deriv(f, a, h[a]) for a in range(3)], axis=-1)


def jacobian_fd(grid: GridSpec, u: np.ndarray) -> np.ndarray:
    """Per-cell gradient tensor J[..., i, k] = du_i/dx_k, shape (nx, ny, nz, 3, 3)."""
    u = grid.check_vector(u)
    h = grid.spacing
    cols = [deriv(u, a, h[a]) for a in range(3)]  # each (..., 3) = du_i/dx_a
    return np.stack(cols, axis=-1)


def divergence(grid: GridSpec, u: np.ndarray) -> np.ndarray:
    jac = jacobian_fd(grid, u)
    return np.einsum("...ii->...", jac)


def curl(grid: GridSpec, u: np.ndarray) -> np.ndarray:
    jac = jacobian_fd(grid, u)
    out = np.empty(u.shape, dtype=float)
    out[..., 0] = jac[..., 2, 1] - jac[..., 1, 2]
    out[..., 1] = jac[..., 0, 2] - jac[..., 2, 0]
    out[..., 2] = jac[..., 1, 0] - jac[..., 0, 1]
    return out


def diffuse_normal(grid: GridSpec, phi: np.ndarray, eta: float) -> np.ndarray:
    """Regularized outward normal -grad(phi) / (|grad(phi)| + eta).

    Points from the droplet interior (phi ~ 1) to the exterior (phi ~ 0);
    |nu| <= 1 everywhere and nu = 0 where phi is flat.
    """
    if not eta > 0.0:
        raise ValueError(f"eta must be positive, got {eta}")
    g = gradient_fd(grid, phi)
    mag = np.sqrt(np.einsum("...j,...j->...", g, g))
    return -g / (mag + eta)[..., None]


def integrate(grid: GridSpec, f: np.ndarray) -> float:
    """Midpoint-rule integral: cell sum times cell volume."""
    f = grid.check_scalar(f)
    return float(np.sum(f) * grid.cell_volume)


def normalize_director(
    n: np.ndarray,
    phi: np.ndarray | None = None,
    cutoff: float | None = None,
) -> np.ndarray:
    """Map cell vectors to unit length; zero-norm cells get the +z fallback.

    With phi and cutoff given, only cells with phi > cutoff are touched;
    otherwise every cell is normalized.  Never mutates its input.
    """
    n = np.asarray(n, dtype=float)
    norms = np.sqrt(np.sum(n * n, axis=-1))
    safe = np.where(norms > ZERO_NORM_TOL, norms, 1.0)
    unit = n / safe[..., None]
    unit = np.where((norms > ZERO_NORM_TOL)[..., None], unit, FALLBACK_AXIS)
    if phi is None or cutoff is None:
        return unit
    mask = (np.asarray(phi) > cutoff)[..., None]
    return np.where(mask, unit, n)
