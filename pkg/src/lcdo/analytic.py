"""Closed-form reference fields, droplet energies and a quadrature oracle.

Everything here is independent of the diffuse-interface machinery: reference
director fields are sampled from exact formulas, droplet energies for the
uniform and hedgehog ansatze on a ball come from closed-form integrals, and
the quadrature oracle recomputes those integrals by composite midpoint or
Simpson rules with a Richardson order estimate.  Derived constants enter the
test suites only after this module has certified them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .elastic import ElasticConstants, SurfaceParams
from .grid import GridSpec, normalize_director

__all__ = [
    "reference_field",
    "ReferenceField",
    "ball_energy_closed_form",
    "ClosedFormBreakdown",
    "crossover_radius",
    "quadrature_oracle",
    "QuadratureResult",
]

SINGULAR_RADIUS_FACTOR = 1e-6  # cells closer to a field singularity are flagged


@dataclass(frozen=True)
class ReferenceField:
    values: np.ndarray                 # (nx, ny, nz, 3) unit vectors
    singular_cells: tuple[tuple[int, int, int], ...]  # cells on a field singularity


def _axis_vector(axis: np.ndarray | str) -> np.ndarray:
    if isinstance(axis, str):
        try:
            axis = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}[axis]
        except KeyError:
            raise ValueError(f"unknown axis name {axis!r}") from None
    a = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(a)
    if norm <= 0.0:
        raise ValueError("axis vector must be nonzero")
    return a / norm


def reference_field(kind: str, grid: GridSpec, **params) -> ReferenceField:
    """Sample a closed-form director field on the grid.

    kinds:
      uniform(axis)        constant unit field
      hedgehog(center)     radial x/|x| around center (default box center)
      twist(q, axis)       helix (cos q s, sin q s, 0) in the frame of axis
      bipolar(poles)       dipole-like field tangent to circles through two poles
    """
    x, y, z = grid.cell_centers()
    shape = grid.shape
    if kind == "uniform":
        axis = _axis_vector(params.get("axis", "z"))
        vals = np.empty(shape + (3,))
        vals[...] = axis
        return ReferenceField(vals, ())

    if kind == "hedgehog":
        cx, cy, cz = params.get("center", (grid.lx / 2.0, grid.ly / 2.0, grid.lz / 2.0))
        dx = np.broadcast_to(x - cx, shape)
        dy = np.broadcast_to(y - cy, shape)
        dz = np.broadcast_to(z - cz, shape)
        r = np.sqrt(dx * dx + dy * dy + dz * dz)
        raw = np.stack([dx, dy, dz], axis=-1)
        vals = normalize_director(raw)
        r_min = SINGULAR_RADIUS_FACTOR * grid.max_spacing
        singular = tuple(map(tuple, np.argwhere(r < r_min)))
        return ReferenceField(vals, singular)

    if kind == "twist":
        q = float(params["q"])
        axis = _axis_vector(params.get("axis", "z"))
        if not np.allclose(axis, (0.0, 0.0, 1.0)):
            raise ValueError("twist reference field supports the z axis only")
        zz = np.broadcast_to(z, shape)
        vals = np.stack([np.cos(q * zz), np.sin(q * zz), np.zeros(shape)], axis=-1)
        return ReferenceField(vals, ())

    if kind == "bipolar":
        (p1, p2) = params.get(
            "poles",
            (
                (grid.lx / 2.0, grid.ly / 2.0, 0.25 * grid.lz),
                (grid.lx / 2.0, grid.ly / 2.0, 0.75 * grid.lz),
            ),
        )
        p1 = np.asarray(p1, dtype=float)
        p2 = np.asarray(p2, dtype=float)
        rel1 = np.stack(
            [np.broadcast_to(x - p1[0], shape), np.broadcast_to(y - p1[1], shape), np.broadcast_to(z - p1[2], shape)],
            axis=-1,
        )
        rel2 = np.stack(
            [np.broadcast_to(p2[0] - x, shape), np.broadcast_to(p2[1] - y, shape), np.broadcast_to(p2[2] - z, shape)],
            axis=-1,
        )
        n1 = np.sqrt(np.einsum("...j,...j->...", rel1, rel1))
        n2 = np.sqrt(np.einsum("...j,...j->...", rel2, rel2))
        # tangent of the circle through both poles: bisector of the two rays
        raw = rel1 / np.maximum(n1, 1e-300)[..., None] + rel2 / np.maximum(n2, 1e-300)[..., None]
        vals = normalize_director(raw)
        r_min = SINGULAR_RADIUS_FACTOR * grid.max_spacing
        raw_norm = np.sqrt(np.einsum("...j,...j->...", raw, raw))
        singular = tuple(map(tuple, np.argwhere((n1 < r_min) | (n2 < r_min) | (raw_norm < 1e-12))))
        return ReferenceField(vals, singular)

    raise ValueError(f"unknown reference field kind {kind!r}")


@dataclass(frozen=True)
class ClosedFormBreakdown:
    e_bulk: float
    e_perimeter: float
    e_anchor_outer: float

    @property
    def e_surface(self) -> float:
        return self.e_perimeter + self.e_anchor_outer

    @property
    def e_total(self) -> float:
        return self.e_bulk + self.e_surface


def ball_energy_closed_form(
    ansatz: str, radius: float, K: ElasticConstants, S: SurfaceParams
) -> ClosedFormBreakdown:
    """Exact droplet energy of a ball with a uniform or hedgehog director.

    uniform:  bulk = (k22/2) q0^2 (4/3) pi R^3,
              surface = 4 pi gamma R^2 (1 + lambda/3)
    hedgehog: bulk = (2 k11 - k24) 4 pi R + (k22/2) q0^2 (4/3) pi R^3,
              surface = 4 pi gamma R^2 (1 + lambda)
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    sphere = 4.0 * np.pi * radius**2
    twist_bulk = 0.5 * K.k22 * K.q0**2 * (4.0 / 3.0) * np.pi * radius**3
    if ansatz == "uniform":
        return ClosedFormBreakdown(
            e_bulk=twist_bulk,
            e_perimeter=S.gamma * sphere,
            e_anchor_outer=S.gamma * S.lam * sphere / 3.0,
        )
    if ansatz == "hedgehog":
        return ClosedFormBreakdown(
            e_bulk=(2.0 * K.k11 - K.k24) * 4.0 * np.pi * radius + twist_bulk,
            e_perimeter=S.gamma * sphere,
            e_anchor_outer=S.gamma * S.lam * sphere,
        )
    raise ValueError(f"unsupported ansatz {ansatz!r}; expected 'uniform' or 'hedgehog'")


def crossover_radius(k: float, gamma: float, lam: float) -> float:
    """Radius where uniform and hedgehog ball totals cross (one-constant, q0=0).

    Equating 4 pi gamma R^2 (1 + lam/3) with 4 pi k R + 4 pi gamma R^2 (1 + lam)
    gives R* = 3k / (2 gamma |lam|), defined for homeotropic-favoring lam < 0.
    """
    if lam >= 0.0:
        raise ValueError("crossover is defined for lambda < 0 only")
    if k <= 0.0 or gamma <= 0.0:
        raise ValueError("k and gamma must be positive")
    return 3.0 * k / (2.0 * gamma * abs(lam))


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    order: float
    values: tuple[float, ...]
    ok: bool


def _simpson(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, n: int) -> float:
    if n % 2 == 1:
        n += 1
    s = np.linspace(a, b, n + 1)
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float((b - a) / n / 3.0 * np.sum(w * f(s)))


def _midpoint_box(f: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray], lo, hi, n: int) -> float:
    axes = [np.linspace(lo[d] + 0.5 * (hi[d] - lo[d]) / n, hi[d] - 0.5 * (hi[d] - lo[d]) / n, n) for d in range(3)]
    xg = axes[0][:, None, None]
    yg = axes[1][None, :, None]
    zg = axes[2][None, None, :]
    cell = np.prod([(hi[d] - lo[d]) / n for d in range(3)])
    vals = np.broadcast_to(f(xg, yg, zg), (n, n, n))
    return float(np.sum(vals) * cell)


def _sphere_quadrature(f: Callable[[np.ndarray], np.ndarray], n: int) -> float:
    """int over S^2 of f(nu) dA: Gauss-Legendre in cos(theta), periodic in phi.

    Exact for polynomial integrands of degree < 2n in the normal components,
    so the low-order sphere averages used by the closed forms certify to
    roundoff already on coarse ladders.
    """
    u, wu = np.polynomial.legendre.leggauss(n)
    ph = (np.arange(2 * n) + 0.5) * np.pi / n
    st = np.sqrt(np.maximum(0.0, 1.0 - u**2))[:, None]
    pp = ph[None, :]
    nu = np.stack(
        [st * np.cos(pp), st * np.sin(pp), np.broadcast_to(u[:, None], (n, 2 * n)).copy()],
        axis=-1,
    )
    vals = f(nu.reshape(-1, 3)).reshape(n, 2 * n)
    return float(np.sum(vals * wu[:, None]) * (np.pi / n))


def quadrature_oracle(
    integrand: Callable,
    region: str,
    resolutions: tuple[int, ...] = (32, 64, 128),
    **region_params,
) -> QuadratureResult:
    """Recompute an integral on a resolution ladder and estimate its order.

    regions:
      'interval'    Simpson on [a, b], integrand f(t) vectorized
      'ball_radial' Simpson of f(r) * 4 pi r^2 on [0, R]
      'sphere'      product midpoint over unit normals, integrand f(nu: (...,3))
      'box'         3D midpoint over [lo, hi]^3, integrand f(x, y, z)

    The ladder must show a measured order >= 1, otherwise the result is
    flagged not-ok and must not certify any derived constant.
    """
    if len(resolutions) < 3:
        raise ValueError("need at least three resolutions for an order estimate")
    values = []
    for n in resolutions:
        if region == "interval":
            a, b = region_params["a"], region_params["b"]
            values.append(_simpson(integrand, a, b, n))
        elif region == "ball_radial":
            radius = region_params["radius"]
            floor = 1e-8 * radius  # keeps integrable 1/r^2-type singularities finite at r = 0
            values.append(
                _simpson(
                    lambda r: integrand(np.maximum(r, floor)) * 4.0 * np.pi * np.maximum(r, floor) ** 2,
                    0.0,
                    radius,
                    n,
                )
            )
        elif region == "sphere":
            values.append(_sphere_quadrature(integrand, n))
        elif region == "box":
            lo = region_params.get("lo", (0.0, 0.0, 0.0))
            hi = region_params.get("hi", (1.0, 1.0, 1.0))
            values.append(_midpoint_box(integrand, lo, hi, n))
        else:
            raise ValueError(f"unknown region {region!r}")

    v1, v2, v3 = values[-3], values[-2], values[-1]
    d1, d2 = abs(v2 - v1), abs(v3 - v2)
    if d2 == 0.0:
        order = np.inf if d1 == 0.0 else 16.0  # converged to roundoff
    elif d1 == 0.0:
        order = 0.0
    else:
        step = resolutions[-1] / resolutions[-2]
        order = float(np.log(d1 / d2) / np.log(step))
    ok = bool(order >= 1.0 or d2 <= 1e-12 * (1.0 + abs(v3)))
    return QuadratureResult(value=float(v3), order=float(order), values=tuple(values), ok=ok)
