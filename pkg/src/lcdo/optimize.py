"""Alternating projected-gradient descent for the droplet energy.

One outer iteration relaxes the director (projected back to unit length),
the inner-boundary field (clipped to [0, 1]) and the shape field (clipped
and shifted so the droplet volume matches its target exactly), each with a
backtracking line search that never accepts an energy increase.  Interface
widths follow an annealing ladder: wide interfaces move fast, the final rung
runs at the configured resolution.

Step sizes act on gradient densities (raw gradient / cell volume), so the
same tau works across grid resolutions; after each accepted step the next
trial grows by the inverse backtracking factor.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .elastic import ElasticConstants, SurfaceParams
from .energy import (
    DiffuseParams,
    EnergyBreakdown,
    normal_residual,
    total_energy,
    variational_gradients,
)
from .grid import FieldState, GridSpec, deriv, normalize_director

__all__ = [
    "Schedule",
    "TraceRow",
    "RunReport",
    "SweepRow",
    "ProjectionError",
    "project_volume",
    "solve_volume_shift",
    "project_tangential",
    "director_step",
    "shape_step",
    "at_step",
    "minimize_director_only",
    "minimize_full",
    "sweep_lambda",
]

TAU_MIN = 1e-14
MODES = ("free", "box", "tangential-projection", "tangential-continuation")


class ProjectionError(RuntimeError):
    """The volume projection could not meet its tolerance."""


@dataclass(frozen=True)
class Schedule:
    """Optimizer controls: budgets, tolerances, step sizes and annealing."""

    max_outer_iters: int = 400
    tol_rel_energy: float = 1e-8
    tau_n: float | None = None      # None: h^2 / (6 max constant)
    tau_phi: float | None = None
    tau_v: float | None = None
    backtrack: float = 0.5
    # Extra director relaxations per outer iteration.  The director is the
    # stiff field under strong anchoring penalization; block-coordinate
    # substeps let it keep pace with the shape without extra shape
    # projections.
    director_substeps: int = 1
    # Annealing multipliers of the diffuse widths.  Default: single rung at the
    # configured widths -- wide rungs sit below the phase-mixing threshold
    # w(m/V) V / (c eps) < gamma A at desk-scale grids and evaporate the
    # droplet instead of accelerating it.
    eps_ladder: tuple[float, ...] = (1.0,)
    rung_iters: tuple[int, ...] | None = None          # per-rung budgets (default: even split)
    mode: str = "free"
    lambda_ladder: tuple[float, ...] = (1.0, 4.0, 16.0, 64.0, 256.0, 1024.0)

    def __post_init__(self) -> None:
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be >= 1")
        if not self.tol_rel_energy > 0.0:
            raise ValueError("tol_rel_energy must be positive")
        if not 0.0 < self.backtrack < 1.0:
            raise ValueError("backtracking factor must lie in (0, 1)")
        for name in ("tau_n", "tau_phi", "tau_v"):
            tau = getattr(self, name)
            if tau is not None and not tau > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.director_substeps < 1:
            raise ValueError("director_substeps must be >= 1")
        if len(self.eps_ladder) == 0:
            raise ValueError("eps ladder must not be empty")
        if list(self.eps_ladder) != sorted(self.eps_ladder, reverse=True) or len(set(self.eps_ladder)) != len(self.eps_ladder):
            raise ValueError("eps ladder must be strictly decreasing")
        if self.rung_iters is not None and len(self.rung_iters) != len(self.eps_ladder):
            raise ValueError("rung_iters must match the eps ladder length")
        if self.rung_iters is not None and any(r < 1 for r in self.rung_iters):
            raise ValueError("rung budgets must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if len(self.lambda_ladder) == 0 or list(self.lambda_ladder) != sorted(set(self.lambda_ladder)):
            raise ValueError("lambda ladder must be strictly increasing and nonempty")

    def rungs(self) -> tuple[tuple[float, int], ...]:
        k = len(self.eps_ladder)
        if self.rung_iters is not None:
            budgets = list(self.rung_iters)
        else:
            base = self.max_outer_iters // k
            budgets = [base] * k
            budgets[-1] += self.max_outer_iters - base * k
            budgets = [max(1, b) for b in budgets]
        return tuple(zip(self.eps_ladder, budgets))


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    energy: EnergyBreakdown
    volume: float
    grad_norm_n: float
    grad_norm_phi: float
    grad_norm_v: float
    tau_n: float
    tau_phi: float
    tau_v: float
    eps_phi: float
    eps_v: float


@dataclass
class RunReport:
    rows: list[TraceRow] = field(default_factory=list)
    termination: str = "budget"
    wall_clock: float = 0.0

    @property
    def final_energy(self) -> EnergyBreakdown:
        if not self.rows:
            raise ValueError("empty report")
        return self.rows[-1].energy

    @property
    def converged(self) -> bool:
        return self.termination == "converged"


@dataclass(frozen=True)
class SweepRow:
    lam: float
    energy: EnergyBreakdown
    volume: float
    residual: float


def _default_tau(grid: GridSpec, K: ElasticConstants, S: SurfaceParams) -> float:
    h = min(grid.spacing)
    scale = max(K.k11, K.k22, K.k33, K.k24, S.gamma, 1e-12)
    return h * h / (6.0 * scale)


def _l2_norm(raw_grad: np.ndarray, grid: GridSpec) -> float:
    """Discrete L2 norm of the gradient density."""
    vol = grid.cell_volume
    dens = raw_grad / vol
    return float(np.sqrt(np.sum(dens * dens) * vol))


def solve_volume_shift(
    grid: GridSpec, phi: np.ndarray, m: float, rel_tol: float = 1e-12, max_iter: int = 200
) -> float:
    """Bisect the uniform shift mu with volume(clip(phi + mu)) = m.

    volume is continuous and nondecreasing in mu, so the initial bracket
    [-max(phi), 1 - min(phi)] always contains a solution for 0 < m < box
    volume.
    """
    if not 0.0 < m < grid.box_volume:
        raise ProjectionError(f"target volume {m} outside (0, {grid.box_volume})")
    target = m / grid.cell_volume
    lo = -float(np.max(phi))
    hi = 1.0 - float(np.min(phi))
    mu = 0.0
    for _ in range(max_iter):
        mu = 0.5 * (lo + hi)
        vol = float(np.sum(np.clip(phi + mu, 0.0, 1.0)))
        if abs(vol - target) <= rel_tol * target:
            return mu
        if vol < target:
            lo = mu
        else:
            hi = mu
    vol = float(np.sum(np.clip(phi + mu, 0.0, 1.0)))
    if abs(vol - target) <= 1e-10 * target:
        return mu
    raise ProjectionError(
        f"volume bisection did not converge: |vol - m|/m = {abs(vol - target) / target:.3e}"
    )


def project_volume(grid: GridSpec, phi: np.ndarray, m: float) -> np.ndarray:
    mu = solve_volume_shift(grid, phi, m)
    return np.clip(phi + mu, 0.0, 1.0)


def project_tangential(grid: GridSpec, n: np.ndarray, phi: np.ndarray, D: DiffuseParams) -> np.ndarray:
    """Remove the normal component of n across the interface layer.

    The projection weight is 1 wherever 4 phi (1 - phi) >= 1/2 (which covers
    the reporting band phi in [0.2, 0.8]) and tapers linearly outside, so the
    constrained region carries exactly tangential directors while the far
    field is left alone.  Cells with n parallel to the normal fall back to
    the tangentialized coordinate axis least aligned with the normal.
    """
    h = grid.spacing
    gphi = np.stack([deriv(phi, a, h[a]) for a in range(3)], axis=-1)
    mag = np.sqrt(np.einsum("...j,...j->...", gphi, gphi))
    has_normal = mag > 1e-12
    nu = np.where(has_normal[..., None], gphi / np.where(has_normal, mag, 1.0)[..., None], 0.0)
    w = np.clip(4.0 * phi * (1.0 - phi) / 0.5, 0.0, 1.0)
    dot = np.einsum("...j,...j->...", n, nu)
    n_t = n - (w * dot)[..., None] * nu

    norms = np.sqrt(np.einsum("...j,...j->...", n_t, n_t))
    degenerate = (norms < 1e-7) & has_normal & (w >= 1.0)
    if np.any(degenerate):
        axes = np.abs(nu[degenerate])                  # |nu . e_a| per axis
        pick = np.argmin(axes, axis=-1)
        basis = np.eye(3)[pick]
        t = basis - np.einsum("ij,ij->i", basis, nu[degenerate])[:, None] * nu[degenerate]
        n_t[degenerate] = t
    return normalize_director(n_t)


@dataclass
class _StepResult:
    state: FieldState
    energy: EnergyBreakdown
    tau: float
    grad_norm: float
    stalled: bool


def _line_search(state, e0, make_candidate, energy_of, tau, backtrack, tau_cap):
    """Grow tau once (capped), then shrink until the energy does not increase.

    The cap matters: across flat stretches any step size "succeeds", so an
    uncapped growth rule inflates tau geometrically and the next stiff
    iteration pays for it with dozens of rejected trials.
    """
    tau_try = min(tau / backtrack, tau_cap)
    while tau_try >= TAU_MIN:
        cand = make_candidate(tau_try)
        eb = energy_of(cand)
        if eb.e_total <= e0.e_total:
            return cand, eb, tau_try, False
        tau_try *= backtrack
    # floor the step size so the next search does not replay the whole ladder
    return state, e0, TAU_MIN / backtrack, True


def director_step(
    state: FieldState,
    K: ElasticConstants,
    S: SurfaceParams,
    D: DiffuseParams,
    tau: float,
    e0: EnergyBreakdown | None = None,
    tangential: bool = False,
    backtrack: float = 0.5,
    tau_cap: float = np.inf,
) -> _StepResult:
    """Projected-gradient update of the director only."""
    grid = state.grid
    if e0 is None:
        e0 = total_energy(state, K, S, D)
    g_n, _, _ = variational_gradients(state, K, S, D, which=("n",))
    dens = g_n / grid.cell_volume
    gnorm = _l2_norm(g_n, grid)
    if gnorm == 0.0 and not tangential:
        return _StepResult(state, e0, tau, gnorm, False)

    def make(t: float) -> FieldState:
        n_new = normalize_director(state.n - t * dens)
        if tangential:
            n_new = project_tangential(grid, n_new, state.phi, D)
        return FieldState(grid, n_new, state.phi, state.v)

    new_state, eb, tau_new, stalled = _line_search(
        state, e0, make, lambda s: total_energy(s, K, S, D), tau, backtrack, tau_cap
    )
    return _StepResult(new_state, eb, tau_new, gnorm, stalled)


def shape_step(
    state: FieldState,
    K: ElasticConstants,
    S: SurfaceParams,
    D: DiffuseParams,
    tau: float,
    m: float,
    e0: EnergyBreakdown | None = None,
    backtrack: float = 0.5,
    tau_cap: float = np.inf,
    tangential: bool = False,
) -> _StepResult:
    """Volume-preserving update of the shape field.

    In tangential mode the director is re-projected onto the tangent plane
    of the candidate shape, so the line search compares constrained states
    with each other and the hard constraint survives shape motion.
    """
    grid = state.grid
    if e0 is None:
        e0 = total_energy(state, K, S, D)
    _, g_phi, _ = variational_gradients(state, K, S, D, which=("phi",))
    dens = g_phi / grid.cell_volume
    gnorm = _l2_norm(g_phi, grid)

    def make(t: float) -> FieldState:
        phi_new = project_volume(grid, state.phi - t * dens, m)
        n_new = project_tangential(grid, state.n, phi_new, D) if tangential else state.n
        return FieldState(grid, n_new, phi_new, state.v)

    new_state, eb, tau_new, stalled = _line_search(
        state, e0, make, lambda s: total_energy(s, K, S, D), tau, backtrack, tau_cap
    )
    return _StepResult(new_state, eb, tau_new, gnorm, stalled)


def at_step(
    state: FieldState,
    K: ElasticConstants,
    S: SurfaceParams,
    D: DiffuseParams,
    tau: float,
    e0: EnergyBreakdown | None = None,
    backtrack: float = 0.5,
    tau_cap: float = np.inf,
) -> _StepResult:
    """Clipped gradient update of the inner-boundary field."""
    grid = state.grid
    if e0 is None:
        e0 = total_energy(state, K, S, D)
    _, _, g_v = variational_gradients(state, K, S, D, which=("v",))
    dens = g_v / grid.cell_volume
    gnorm = _l2_norm(g_v, grid)

    def make(t: float) -> FieldState:
        v_new = np.clip(state.v - t * dens, 0.0, 1.0)
        return FieldState(grid, state.n, state.phi, v_new)

    new_state, eb, tau_new, stalled = _line_search(
        state, e0, make, lambda s: total_energy(s, K, S, D), tau, backtrack, tau_cap
    )
    return _StepResult(new_state, eb, tau_new, gnorm, stalled)


def _run(
    state: FieldState,
    K: ElasticConstants,
    S: SurfaceParams,
    D: DiffuseParams,
    sched: Schedule,
    m: float | None,
    move_phi: bool,
    move_v: bool,
    rungs: tuple[tuple[float, int], ...],
) -> tuple[RunReport, FieldState]:
    t_start = time.perf_counter()
    grid = state.grid
    state = state.copy()
    tangential = sched.mode == "tangential-projection"

    tau0 = _default_tau(grid, K, S)
    tau_n = sched.tau_n if sched.tau_n is not None else tau0
    tau_phi = sched.tau_phi if sched.tau_phi is not None else tau0
    tau_v = sched.tau_v if sched.tau_v is not None else tau0
    tau_cap = 1e6 * tau0

    if move_phi:
        assert m is not None
        state.phi = project_volume(grid, state.phi, m)
    if tangential:
        state.n = project_tangential(grid, state.n, state.phi, D)

    report = RunReport()
    iteration = 0
    final_rung_converged = False
    for rung_idx, (mult, budget) in enumerate(rungs):
        Dr = D.scaled(mult)
        eb = total_energy(state, K, S, Dr)
        for _ in range(budget):
            if iteration >= sched.max_outer_iters:
                break
            e_prev = eb.e_total

            res_n = director_step(state, K, S, Dr, tau_n, eb, tangential, sched.backtrack, tau_cap)
            state, eb, tau_n = res_n.state, res_n.energy, res_n.tau
            for _ in range(sched.director_substeps - 1):
                res_n = director_step(state, K, S, Dr, tau_n, eb, tangential, sched.backtrack, tau_cap)
                state, eb, tau_n = res_n.state, res_n.energy, res_n.tau
            if move_v:
                res_v = at_step(state, K, S, Dr, tau_v, eb, sched.backtrack, tau_cap)
                state, eb, tau_v = res_v.state, res_v.energy, res_v.tau
                gn_v, st_v = res_v.grad_norm, res_v.stalled
            else:
                gn_v, st_v = 0.0, True
            if move_phi:
                res_p = shape_step(state, K, S, Dr, tau_phi, m, eb, sched.backtrack, tau_cap, tangential)
                state, eb, tau_phi = res_p.state, res_p.energy, res_p.tau
                gn_p, st_p = res_p.grad_norm, res_p.stalled
            else:
                gn_p, st_p = 0.0, True

            iteration += 1
            report.rows.append(
                TraceRow(
                    iteration=iteration,
                    energy=eb,
                    volume=float(np.sum(state.phi) * grid.cell_volume),
                    grad_norm_n=res_n.grad_norm,
                    grad_norm_phi=gn_p,
                    grad_norm_v=gn_v,
                    tau_n=tau_n,
                    tau_phi=tau_phi,
                    tau_v=tau_v,
                    eps_phi=Dr.eps_phi,
                    eps_v=Dr.eps_v,
                )
            )

            if res_n.stalled and st_v and st_p:
                report.termination = "stationary"
                report.wall_clock = time.perf_counter() - t_start
                return report, state
            rel = abs(e_prev - eb.e_total) / max(abs(eb.e_total), 1e-300)
            if rel < sched.tol_rel_energy:
                if rung_idx == len(rungs) - 1:
                    final_rung_converged = True
                break
        if iteration >= sched.max_outer_iters:
            break

    report.termination = "converged" if final_rung_converged else "budget"
    report.wall_clock = time.perf_counter() - t_start
    return report, state


def minimize_director_only(
    state: FieldState,
    K: ElasticConstants,
    S: SurfaceParams,
    D: DiffuseParams,
    sched: Schedule,
    relax_v: bool = False,
) -> tuple[RunReport, FieldState]:
    """Relax the director (optionally also v) with phi frozen, at fixed widths."""
    rungs = ((1.0, sched.max_outer_iters),)
    return _run(state, K, S, D, sched, m=None, move_phi=False, move_v=relax_v, rungs=rungs)


def minimize_full(
    state: FieldState,
    m: float,
    K: ElasticConstants,
    S: SurfaceParams,
    D: DiffuseParams,
    sched: Schedule,
) -> tuple[RunReport, FieldState]:
    """Alternate director/inner-boundary/shape descent under the eps ladder."""
    if not 0.0 < m < state.grid.box_volume:
        raise ValueError(f"volume target {m} outside (0, box volume)")
    D.check_resolved(state.grid)
    return _run(state, K, S, D, sched, m=m, move_phi=True, move_v=True, rungs=sched.rungs())


def sweep_lambda(
    state: FieldState,
    m: float,
    K: ElasticConstants,
    S: SurfaceParams,
    D: DiffuseParams,
    sched: Schedule,
    ladder: tuple[float, ...] | None = None,
    frozen_shape: bool = False,
) -> tuple[list[SweepRow], FieldState, list[RunReport]]:
    """Warm-started minimization along an increasing anchoring-strength ladder.

    With frozen_shape the director alone relaxes on the given droplet.  In
    tangential-continuation mode each rung starts from the tangentially
    projected warm state (feasibility restoration between penalty
    increments), so the penalty never has to pay down misalignment that the
    rung's own descent is too stiff to reach.
    """
    lams = tuple(ladder) if ladder is not None else sched.lambda_ladder
    if len(lams) == 0 or list(lams) != sorted(set(lams)):
        raise ValueError("lambda ladder must be strictly increasing and nonempty")
    continuation = sched.mode == "tangential-continuation"
    inner_sched = replace(sched, mode="free") if continuation else sched
    rows: list[SweepRow] = []
    reports: list[RunReport] = []
    current = state
    for lam in lams:
        S_lam = SurfaceParams(S.gamma, lam)
        if continuation:
            current = current.copy()
            current.n = project_tangential(current.grid, current.n, current.phi, D)
        if frozen_shape:
            report, current = minimize_director_only(current, K, S_lam, D, inner_sched)
        else:
            report, current = minimize_full(current, m, K, S_lam, D, inner_sched)
        rows.append(
            SweepRow(
                lam=lam,
                energy=report.final_energy,
                volume=report.rows[-1].volume,
                residual=normal_residual(current, D),
            )
        )
        reports.append(report)
    return rows, current, reports
