"""Analytic oracles: reference fields, closed forms, quadrature."""

import numpy as np
import pytest

from lcdo.analytic import (
    ball_energy_closed_form,
    crossover_radius,
    quadrature_oracle,
    reference_field,
)
from lcdo.elastic import ElasticConstants, SurfaceParams
from lcdo.grid import GridSpec, curl


@pytest.fixture
def grid():
    return GridSpec(16, 16, 16, 2.0, 2.0, 2.0)


class TestReferenceFields:
    def test_uniform(self, grid):
        f = reference_field("uniform", grid, axis="z")
        assert np.all(f.values[..., 2] == 1.0)
        assert f.singular_cells == ()

    def test_twist_helicity_closed_form(self, grid):
        q = 1.5
        f = reference_field("twist", grid, q=q)
        tw = np.einsum("...j,...j->...", f.values, curl(grid, f.values))
        assert np.max(np.abs(tw[2:-2, 2:-2, 2:-2] + q)) < 0.02

    def test_hedgehog_no_singular_cells_off_node(self, grid):
        f = reference_field("hedgehog", grid)
        assert f.singular_cells == ()
        norms = np.sqrt(np.einsum("...j,...j->...", f.values, f.values))
        assert np.max(np.abs(norms - 1.0)) < 1e-12

    def test_hedgehog_flags_on_node_singularity(self):
        g = GridSpec(16, 16, 16, 2.0, 2.0, 2.0)
        hx = g.spacing[0]
        center = ((7 + 0.5) * hx, (7 + 0.5) * hx, (7 + 0.5) * hx)  # exactly a cell center
        f = reference_field("hedgehog", g, center=center)
        assert (7, 7, 7) in f.singular_cells

    def test_bipolar_unit_and_tangent_at_equator(self, grid):
        f = reference_field("bipolar", grid)
        norms = np.sqrt(np.einsum("...j,...j->...", f.values, f.values))
        assert np.max(np.abs(norms - 1.0)) < 1e-12
        # near the midpoint between the poles the field is nearly axial
        mid = f.values[8, 8, 8]
        assert abs(abs(mid[2]) - 1.0) < 5e-3

    def test_unknown_kind_rejected(self, grid):
        with pytest.raises(ValueError):
            reference_field("boojum", grid)


class TestClosedForms:
    def test_uniform_pure_perimeter(self):
        cf = ball_energy_closed_form("uniform", 1.0, ElasticConstants.one_constant(1.0), SurfaceParams(1.0, 0.0))
        assert cf.e_total == pytest.approx(4 * np.pi, rel=1e-14)
        assert cf.e_bulk == 0.0

    def test_hedgehog_one_constant_unit_ball(self):
        cf = ball_energy_closed_form("hedgehog", 1.0, ElasticConstants.one_constant(1.0), SurfaceParams(1.0, 0.0))
        assert cf.e_bulk == pytest.approx(4 * np.pi, rel=1e-14)
        assert cf.e_total == pytest.approx(8 * np.pi, rel=1e-14)

    def test_uniform_anchoring_third(self):
        cf = ball_energy_closed_form("uniform", 0.5, ElasticConstants.one_constant(1.0), SurfaceParams(2.0, 0.9))
        # surface = 4 pi gamma R^2 (1 + lambda/3)
        assert cf.e_surface == pytest.approx(4 * np.pi * 2.0 * 0.25 * (1 + 0.3), rel=1e-14)

    def test_chiral_twist_term(self):
        K = ElasticConstants(1, 2, 1, 0.5, q0=1.5)
        cf = ball_energy_closed_form("uniform", 0.7, K, SurfaceParams(1.0, 0.0))
        assert cf.e_bulk == pytest.approx(0.5 * 2 * 1.5**2 * 4 / 3 * np.pi * 0.7**3, rel=1e-14)

    def test_unsupported_ansatz(self):
        with pytest.raises(ValueError):
            ball_energy_closed_form("boojum", 1.0, ElasticConstants.one_constant(1.0), SurfaceParams(1.0, 0.0))


class TestCrossover:
    def test_reference_value(self):
        assert crossover_radius(1.0, 1.0, -0.5) == pytest.approx(3.0, abs=1e-15)

    def test_linear_in_k(self):
        assert crossover_radius(2.0, 1.0, -0.5) == pytest.approx(2 * crossover_radius(1.0, 1.0, -0.5))

    def test_totals_cross_at_rstar(self):
        k, gamma, lam = 1.3, 0.8, -0.35
        rstar = crossover_radius(k, gamma, lam)
        K = ElasticConstants.one_constant(k)
        S = SurfaceParams(gamma, lam)
        eu = ball_energy_closed_form("uniform", rstar, K, S).e_total
        eh = ball_energy_closed_form("hedgehog", rstar, K, S).e_total
        assert abs(eu - eh) / eu < 1e-12

    def test_defined_only_for_negative_lambda(self):
        with pytest.raises(ValueError):
            crossover_radius(1.0, 1.0, 0.5)


class TestQuadratureOracle:
    def test_sphere_mean_third(self):
        res = quadrature_oracle(lambda nu: nu[:, 2] ** 2, "sphere", (8, 16, 32))
        assert res.ok
        assert res.value / (4 * np.pi) == pytest.approx(1 / 3, abs=1e-6)

    def test_radial_inverse_square(self):
        res = quadrature_oracle(lambda r: 1.0 / r**2, "ball_radial", (64, 128, 256), radius=1.0)
        assert abs(res.value - 4 * np.pi) < 1e-4

    def test_ball_volume_anchor(self):
        res = quadrature_oracle(lambda r: np.ones_like(r), "ball_radial", (16, 32, 64), radius=1.0)
        assert res.value == pytest.approx(4 * np.pi / 3, abs=1e-12)

    def test_interval_order_estimate(self):
        res = quadrature_oracle(np.exp, "interval", (8, 16, 32), a=0.0, b=1.0)
        assert res.ok
        assert res.value == pytest.approx(np.e - 1.0, rel=1e-8)
        assert res.order > 3.0  # Simpson converges at fourth order

    def test_box_region(self):
        res = quadrature_oracle(lambda x, y, z: x * 0 + 1.0, "box", (4, 8, 16), lo=(0, 0, 0), hi=(2, 1, 1))
        assert res.value == pytest.approx(2.0, rel=1e-12)

    def test_nonconvergent_ladder_flagged(self):
        gen = np.random.default_rng(0)
        res = quadrature_oracle(lambda t: gen.normal(size=t.shape), "interval", (8, 16, 32), a=0.0, b=1.0)
        assert not res.ok

    def test_requires_three_resolutions(self):
        with pytest.raises(ValueError):
            quadrature_oracle(np.exp, "interval", (8, 16), a=0.0, b=1.0)
