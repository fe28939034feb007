"""Diffuse-interface shape optimization for liquid-crystal droplets.

A droplet of nematic or cholesteric liquid crystal is described by a unit
director field together with a phase field for its free shape and an
auxiliary field for diffuse inner boundaries carrying director jumps.  The
package assembles the four-constant distortion energy with quadratic
anchoring on both boundary families, minimizes it by alternating projected
gradient descent under an exact volume constraint, and ships closed-form
oracles plus property suites that certify every derived constant used in
the tests.
"""

from .analytic import ball_energy_closed_form, crossover_radius, quadrature_oracle, reference_field
from .elastic import (
    ElasticConstants,
    SurfaceParams,
    PointDirector,
    coercivity_check,
    frank_density,
    g_hat,
    one_constant_density,
    rapini_papoular,
    validate_ericksen,
)
from .energy import (
    DiffuseParams,
    EnergyBreakdown,
    anchoring_outer,
    bulk_energy,
    inner_boundary_energy,
    perimeter_energy,
    total_energy,
    variational_gradients,
)
from .grid import FieldState, GridSpec, curl, divergence, diffuse_normal, gradient_fd, integrate, jacobian_fd, normalize_director
from .optimize import Schedule, at_step, director_step, minimize_director_only, minimize_full, shape_step, sweep_lambda

__version__ = "0.1.0"
