"""Initial field construction from shape/director descriptors.

Shapes produce a phase field with a Modica-Mortola-matched tanh profile of
width eps_phi; directors come from the closed-form reference fields or a
seeded random draw.  The inner-boundary field always starts closed (v = 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import reference_field
from .grid import FieldState, GridSpec, normalize_director

__all__ = ["ShapeInit", "DirectorInit", "build_phi", "build_director", "build_state"]


def _obstacle_profile(signed_distance, eps_phi):
    """Optimal planar profile of the obstacle-well interface functional.

    phi = (1 + sin(d/eps)) / 2 across the layer |d| <= pi eps / 2, exactly 0
    outside and 1 inside; the compact support keeps far-field tails off the
    box faces.
    """
    t = np.clip(signed_distance / eps_phi, -np.pi / 2.0, np.pi / 2.0)
    return 0.5 * (1.0 + np.sin(t))


# second moment of the planar profile, int z (phi - step) dz = C2 * eps^2
_PROFILE_C2 = np.pi**2 / 8.0 - 1.0


def _volume_matched_radius(radius: float, eps_phi: float) -> float:
    """Profile radius whose diffuse ball volume equals (4 pi/3) radius^3.

    The spherical profile volume is exactly (4 pi/3) Rp^3 + 8 pi C2 Rp eps^2
    (odd moments cancel by symmetry), so matching the nominal ball volume
    keeps the exact-volume projection shift at lattice-noise level instead of
    dropping the interior plateau below 1, which would leak well energy over
    the whole droplet.
    """
    target = 4.0 / 3.0 * np.pi * radius**3
    rp = radius
    for _ in range(60):
        val = 4.0 / 3.0 * np.pi * rp**3 + 8.0 * np.pi * _PROFILE_C2 * rp * eps_phi**2
        deriv = 4.0 * np.pi * rp**2 + 8.0 * np.pi * _PROFILE_C2 * eps_phi**2
        step = (target - val) / deriv
        rp += step
        if abs(step) < 1e-15 * radius:
            break
    return max(rp, 0.75 * np.pi * eps_phi)


@dataclass(frozen=True)
class ShapeInit:
    """ball(r[,center]) | ellipsoid(a,b,c[,center]) | random-blob"""

    kind: str
    radius: float | None = None
    semi_axes: tuple[float, float, float] | None = None
    center: tuple[float, float, float] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("ball", "ellipsoid", "random-blob"):
            raise ValueError(f"unknown shape kind {self.kind!r}")
        if self.kind == "ball" and not (self.radius and self.radius > 0.0):
            raise ValueError("ball shape requires a positive radius")
        if self.kind == "ellipsoid":
            if self.semi_axes is None or any(a <= 0.0 for a in self.semi_axes):
                raise ValueError("ellipsoid shape requires three positive semi-axes")


@dataclass(frozen=True)
class DirectorInit:
    """uniform(axis) | hedgehog | twist(q) | random"""

    kind: str
    axis: tuple[float, float, float] = (0.0, 0.0, 1.0)
    q: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "hedgehog", "twist", "random"):
            raise ValueError(f"unknown director kind {self.kind!r}")


def _center(grid: GridSpec, center: tuple[float, float, float] | None) -> np.ndarray:
    if center is None:
        return np.array([grid.lx / 2.0, grid.ly / 2.0, grid.lz / 2.0])
    return np.asarray(center, dtype=float)


def build_phi(grid: GridSpec, shape: ShapeInit, eps_phi: float, rng: np.random.Generator) -> np.ndarray:
    x, y, z = grid.cell_centers()
    c = _center(grid, shape.center)
    if shape.kind == "ball":
        r = np.sqrt((x - c[0]) ** 2 + (y - c[1]) ** 2 + (z - c[2]) ** 2)
        rp = _volume_matched_radius(shape.radius, eps_phi)
        phi = _obstacle_profile(rp - r, eps_phi)
    elif shape.kind == "ellipsoid":
        a, b, cc = shape.semi_axes
        rho = np.sqrt(((x - c[0]) / a) ** 2 + ((y - c[1]) / b) ** 2 + ((z - c[2]) / cc) ** 2)
        # approximate signed distance: level offset scaled by the smallest axis
        d = (1.0 - rho) * min(a, b, cc)
        phi = _obstacle_profile(d, eps_phi)
    else:  # random-blob: a few seeded Gaussian bumps, kept off the box faces
        phi = np.zeros(grid.shape)
        span = min(grid.lx, grid.ly, grid.lz)
        for _ in range(6):
            p = c + rng.uniform(-0.15, 0.15, size=3) * span
            width = rng.uniform(0.10, 0.22) * span
            r2 = (x - p[0]) ** 2 + (y - p[1]) ** 2 + (z - p[2]) ** 2
            phi = phi + np.exp(-r2 / (2.0 * width**2))
        phi = np.clip(phi / max(1e-12, float(np.max(phi))), 0.0, 1.0)
    return np.ascontiguousarray(np.broadcast_to(phi, grid.shape), dtype=float)


def build_director(grid: GridSpec, director: DirectorInit, rng: np.random.Generator) -> np.ndarray:
    if director.kind == "uniform":
        return reference_field("uniform", grid, axis=np.asarray(director.axis)).values
    if director.kind == "hedgehog":
        return reference_field("hedgehog", grid).values
    if director.kind == "twist":
        return reference_field("twist", grid, q=director.q).values
    return normalize_director(rng.normal(size=grid.shape + (3,)))


def build_state(
    grid: GridSpec,
    shape: ShapeInit,
    director: DirectorInit,
    eps_phi: float,
    seed: int,
) -> FieldState:
    rng = np.random.default_rng(seed)
    phi = build_phi(grid, shape, eps_phi, rng)
    n = build_director(grid, director, rng)
    v = np.ones(grid.shape)
    return FieldState(grid, n, phi, v)
