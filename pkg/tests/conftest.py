"""Shared fixtures.

The oracle gate runs once per session before any other test: every derived
constant the suites rely on (sphere averages, radial integrals, closed-form
crossings, the hedgehog density) is recomputed by the independent quadrature
oracle, and a mismatch aborts the session with the offending check named.
"""

from __future__ import annotations

import numpy as np
import pytest

from lcdo.analytic import ball_energy_closed_form, crossover_radius, quadrature_oracle
from lcdo.elastic import ElasticConstants, SurfaceParams
from lcdo.grid import FieldState, GridSpec, normalize_director
from lcdo.initialize import DirectorInit, ShapeInit, build_state
from lcdo.optimize import project_volume


@pytest.fixture(scope="session", autouse=True)
def certify_derived_constants():
    failures = []

    sphere = quadrature_oracle(lambda nu: nu[:, 2] ** 2, "sphere", (8, 16, 32))
    if abs(sphere.value / (4 * np.pi) - 1.0 / 3.0) > 1e-6:
        failures.append(f"sphere mean (e3.nu)^2 = {sphere.value / (4 * np.pi)} != 1/3")

    ball = quadrature_oracle(lambda r: 1.0 / r**2, "ball_radial", (64, 128, 256), radius=1.0)
    if abs(ball.value - 4 * np.pi) > 1e-4:
        failures.append(f"int_ball 1/r^2 = {ball.value} != 4 pi")

    vol = quadrature_oracle(lambda r: np.ones_like(r), "ball_radial", (16, 32, 64), radius=1.0)
    if abs(vol.value - 4 * np.pi / 3) > 1e-10:
        failures.append(f"ball volume = {vol.value} != 4 pi / 3")

    K = ElasticConstants.one_constant(1.0)
    S = SurfaceParams(1.0, -0.5)
    cf_u = ball_energy_closed_form("uniform", 3.0, K, S)
    cf_h = ball_energy_closed_form("hedgehog", 3.0, K, S)
    if abs(cf_u.e_total - cf_h.e_total) / cf_u.e_total > 1e-12:
        failures.append("closed-form totals do not cross at R* = 3k/(2 gamma |lambda|)")
    if abs(crossover_radius(1.0, 1.0, -0.5) - 3.0) > 1e-12:
        failures.append("crossover radius formula broken")

    bulk = quadrature_oracle(lambda r: 1.5 / r**2, "ball_radial", (64, 128, 256), radius=0.8)
    if abs(bulk.value - (2 * 1.0 - 0.5) * 4 * np.pi * 0.8) > 1e-4:
        failures.append(f"hedgehog bulk quadrature {bulk.value} != (2k11-k24) 4 pi R")

    if failures:
        pytest.exit("oracle certification failed:\n  " + "\n  ".join(failures), returncode=3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240809)


def tanh_ball_state(
    n_cells: int,
    box: float,
    radius: float,
    director: str = "uniform",
    eps: float | None = None,
    project_to: float | None = None,
    seed: int = 0,
) -> tuple[FieldState, float]:
    """Ball-shaped droplet state plus the interface width actually used."""
    grid = GridSpec(n_cells, n_cells, n_cells, box, box, box)
    eps = 2.0 * grid.max_spacing if eps is None else eps
    state = build_state(grid, ShapeInit("ball", radius=radius), DirectorInit(director), eps, seed)
    if project_to is not None:
        state.phi = project_volume(grid, state.phi, project_to)
    return state, eps


def random_unit_field(grid: GridSpec, rng: np.random.Generator) -> np.ndarray:
    return normalize_director(rng.normal(size=grid.shape + (3,)))
