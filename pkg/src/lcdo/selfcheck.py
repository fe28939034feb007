"""Built-in certification suites behind the ``lcdo validate`` command.

Each suite returns a list of named pass/fail results.  The oracle suite
certifies the derived constants (sphere averages, radial integrals, closed
forms) before anything else relies on them; the kernel suite accepts an
injectable density so a deliberately broken kernel provably fails it.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .analytic import ball_energy_closed_form, crossover_radius, quadrature_oracle
from .elastic import (
    ElasticConstants,
    SurfaceParams,
    coercivity_check,
    frank_density_raw,
    g_hat,
)
from .energy import DiffuseParams, anchoring_outer, perimeter_energy, total_energy, variational_gradients
from .grid import FieldState, GridSpec, deriv, deriv_adjoint, gradient_fd, integrate, normalize_director
from .initialize import DirectorInit, ShapeInit, build_state
from .optimize import project_volume
from .runtime import worker_count

__all__ = ["CheckResult", "run_all", "SUITES"]


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str


def _res(suite: str, name: str, passed: bool, detail: str) -> CheckResult:
    return CheckResult(suite, name, bool(passed), detail)


def _random_rotations(rng: np.random.Generator, count: int) -> np.ndarray:
    a = rng.normal(size=(count, 3, 3))
    q, r = np.linalg.qr(a)
    det = np.linalg.det(q)
    q[det < 0, :, 0] *= -1.0
    return q


def oracle_suite() -> list[CheckResult]:
    out = []
    sphere = quadrature_oracle(lambda nu: nu[:, 2] ** 2, "sphere", (16, 32, 64))
    out.append(
        _res(
            "oracle",
            "sphere mean of (e3.nu)^2 equals 1/3",
            sphere.ok and abs(sphere.value / (4.0 * np.pi) - 1.0 / 3.0) < 1e-6,
            f"value/area = {sphere.value / (4 * np.pi):.9f}, order {sphere.order:.2f}",
        )
    )
    ball = quadrature_oracle(lambda r: 1.0 / r**2, "ball_radial", (64, 128, 256), radius=1.0)
    out.append(
        _res(
            "oracle",
            "radial integral of 1/r^2 over unit ball equals 4 pi",
            abs(ball.value - 4.0 * np.pi) < 1e-4,
            f"value = {ball.value:.8f}",
        )
    )
    vol = quadrature_oracle(lambda r: np.ones_like(r), "ball_radial", (16, 32, 64), radius=1.0)
    out.append(
        _res(
            "oracle",
            "unit ball volume equals 4 pi / 3",
            abs(vol.value - 4.0 * np.pi / 3.0) < 1e-10,
            f"value = {vol.value:.12f}",
        )
    )

    # hedgehog density from finite differences of the closed-form field
    K = ElasticConstants(1.0, 1.0, 1.0, 0.5)
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(20):
        p = rng.normal(size=3)
        p *= rng.uniform(0.5, 3.0) / np.linalg.norm(p)
        h = 1e-6
        G = np.empty((3, 3))
        for k in range(3):
            dp = np.zeros(3)
            dp[k] = h
            np_p = (p + dp) / np.linalg.norm(p + dp)
            np_m = (p - dp) / np.linalg.norm(p - dp)
            G[:, k] = (np_p - np_m) / (2 * h)
        w_fd = frank_density_raw(K, p / np.linalg.norm(p), G)
        w_cf = (2.0 * K.k11 - K.k24) / np.dot(p, p)
        worst = max(worst, abs(w_fd / w_cf - 1.0))
    out.append(_res("oracle", "hedgehog density matches (2 k11 - k24)/r^2", worst < 1e-6, f"worst rel err {worst:.2e}"))

    # closed-form ball energies against quadrature
    S = SurfaceParams(1.0, 0.7)
    R = 0.9
    cf = ball_energy_closed_form("hedgehog", R, K, S)
    bulk_quad = quadrature_oracle(
        lambda r: (2.0 * K.k11 - K.k24) / r**2, "ball_radial", (64, 128, 256), radius=R
    )
    anch_quad = quadrature_oracle(lambda nu: np.full(nu.shape[0], S.gamma * S.lam), "sphere", (16, 32, 64))
    out.append(
        _res(
            "oracle",
            "hedgehog ball bulk closed form certified by quadrature",
            abs(bulk_quad.value / cf.e_bulk - 1.0) < 1e-6,
            f"quad {bulk_quad.value:.6f} vs closed {cf.e_bulk:.6f}",
        )
    )
    out.append(
        _res(
            "oracle",
            "hedgehog ball anchoring closed form certified by quadrature",
            abs(anch_quad.value * R**2 / cf.e_anchor_outer - 1.0) < 1e-6,
            f"quad {anch_quad.value * R**2:.6f} vs closed {cf.e_anchor_outer:.6f}",
        )
    )
    cfu = ball_energy_closed_form("uniform", R, K, S)
    anch_u = quadrature_oracle(lambda nu: S.gamma * S.lam * nu[:, 2] ** 2, "sphere", (16, 32, 64))
    out.append(
        _res(
            "oracle",
            "uniform ball anchoring closed form certified by quadrature",
            abs(anch_u.value * R**2 / cfu.e_anchor_outer - 1.0) < 1e-6,
            f"quad {anch_u.value * R**2:.6f} vs closed {cfu.e_anchor_outer:.6f}",
        )
    )

    rstar = crossover_radius(1.0, 1.0, -0.5)
    eu = ball_energy_closed_form("uniform", rstar, ElasticConstants.one_constant(1.0), SurfaceParams(1.0, -0.5))
    eh = ball_energy_closed_form("hedgehog", rstar, ElasticConstants.one_constant(1.0), SurfaceParams(1.0, -0.5))
    out.append(
        _res(
            "oracle",
            "uniform and hedgehog totals cross at R* = 3k/(2 gamma |lambda|)",
            abs(rstar - 3.0) < 1e-12 and abs(eu.e_total - eh.e_total) / eu.e_total < 1e-12,
            f"R* = {rstar}, |dE|/E = {abs(eu.e_total - eh.e_total) / eu.e_total:.2e}",
        )
    )
    return out


def convexity_suite(n_triples: int = 100_000, seed: int = 2024) -> list[CheckResult]:
    out = []
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n_triples, 3))
    p = rng.normal(size=(n_triples, 3))
    q = rng.normal(size=(n_triples, 3))
    for lam in (-0.5, -0.25, 0.0, 0.5, 1.0):
        S = SurfaceParams(1.0, lam)
        mid = g_hat(S, v, 0.5 * (p + q))
        avg = 0.5 * (g_hat(S, v, p) + g_hat(S, v, q))
        worst = float(np.max(mid - avg - 1e-12 * (1.0 + np.abs(avg))))
        out.append(
            _res(
                "convexity",
                f"midpoint convexity of g_hat at lambda={lam}",
                worst <= 0.0,
                f"max excess {worst:.2e} over {n_triples} triples",
            )
        )

    # witnesses outside the safe range, guided by the Hessian factor
    e1 = np.array([1.0, 0.0, 0.0])
    witness_found = {}
    for lam, make in (
        (1.5, lambda d: (np.array([1.0, d, 0.0]), np.array([1.0, -d, 0.0]))),
        (-0.8, lambda d: (np.array([d, 1.0, 0.0]), np.array([-d, 1.0, 0.0]))),
    ):
        S = SurfaceParams(1.0, lam)
        found = False
        for d in (0.01, 0.05, 0.1, 0.2):
            pp, qq = make(d)
            mid = g_hat(S, e1, 0.5 * (pp + qq))
            avg = 0.5 * (g_hat(S, e1, pp) + g_hat(S, e1, qq))
            if mid > avg + 1e-12:
                found = True
                break
        witness_found[lam] = found
        out.append(
            _res(
                "convexity",
                f"non-convexity witness exists at lambda={lam}",
                found,
                "perturbations " + ("parallel" if lam > 1 else "orthogonal") + " to v",
            )
        )
    return out


def kernel_suite(
    frank_fn: Callable[[ElasticConstants, np.ndarray, np.ndarray], np.ndarray] = frank_density_raw,
    n_samples: int = 1000,
    seed: int = 5,
) -> list[CheckResult]:
    out = []
    rng = np.random.default_rng(seed)
    K = ElasticConstants(1.1, 2.3, 3.7, 0.6, q0=0.0)
    s = rng.normal(size=(n_samples, 3))
    M = rng.normal(size=(n_samples, 3, 3))
    rots = _random_rotations(rng, n_samples)
    w0 = frank_fn(K, s, M)
    w_rot = frank_fn(K, np.einsum("nij,nj->ni", rots, s), np.einsum("nij,njk,nlk->nil", rots, M, rots))
    worst = float(np.max(np.abs(w_rot - w0) / (1.0 + np.abs(w0))))
    out.append(_res("kernel", "frame indifference under proper rotations", worst < 1e-10, f"worst {worst:.2e}"))

    Kq = ElasticConstants(1.1, 2.3, 3.7, 0.6, q0=1.3)
    w_even = frank_fn(Kq, -s, -M)
    w_base = frank_fn(Kq, s, M)
    exact = bool(np.all(w_even == w_base))
    out.append(_res("kernel", "evenness (-n, -G) is exact", exact, "bitwise equality"))

    # one-constant identity on unit-consistent samples
    k = 1.7
    Kone = ElasticConstants.one_constant(k)
    n = s / np.linalg.norm(s, axis=1, keepdims=True)
    B = rng.normal(size=(n_samples, 3, 3))
    proj = np.eye(3)[None] - n[:, :, None] * n[:, None, :]
    G = np.einsum("nij,njk->nik", proj, B)
    w_full = frank_fn(Kone, n, G)
    w_one = 0.5 * k * np.einsum("nij,nij->n", G, G)
    worst = float(np.max(np.abs(w_full - w_one) / (1.0 + np.abs(w_one))))
    out.append(_res("kernel", "one-constant identity (k/2)|G|^2", worst < 1e-10, f"worst {worst:.2e}"))

    K_good = ElasticConstants(2.0, 1.5, 1.0, 0.4, q0=0.0)
    w_unit = frank_fn(K_good, n, G)
    out.append(
        _res(
            "kernel",
            "nonnegativity on unit-consistent samples (q0=0)",
            bool(np.all(w_unit >= -1e-13)),
            f"min {float(np.min(w_unit)):.2e}",
        )
    )
    return out


def coercivity_suite(n_samples: int = 10_000, seed: int = 6) -> list[CheckResult]:
    out = []
    rng = np.random.default_rng(seed)
    for K in (
        ElasticConstants(1.0, 2.0, 3.0, 0.5, q0=1.0),
        ElasticConstants(2.0, 1.5, 1.0, 0.4, q0=0.0),
        ElasticConstants(3.0, 3.0, 0.5, 1.0, q0=-2.0),
    ):
        s = rng.normal(size=(n_samples, 3)) * rng.uniform(0.1, 2.0, size=(n_samples, 1))
        M = rng.normal(size=(n_samples, 3, 3)) * rng.uniform(0.1, 3.0, size=(n_samples, 1, 1))
        fit = coercivity_check(K, (s, M))
        out.append(
            _res(
                "coercivity",
                f"finite sandwich constants for K=({K.k11},{K.k22},{K.k33},{K.k24},q0={K.q0})",
                fit.ok,
                f"c=({fit.c1:.3g},{fit.c2:.3g},{fit.c3:.3g},{fit.c4:.3g})",
            )
        )
    return out


def grid_suite() -> list[CheckResult]:
    out = []
    rng = np.random.default_rng(3)
    g = GridSpec(16, 12, 14, 1.6, 1.2, 1.4)

    f = rng.normal(size=g.shape)
    w = rng.normal(size=g.shape)
    worst = 0.0
    for a in range(3):
        lhs = float(np.sum(deriv(f, a, g.spacing[a]) * w))
        rhs = float(np.sum(f * deriv_adjoint(w, a, g.spacing[a])))
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
    out.append(_res("grid", "derivative adjoint identity", worst < 1e-12, f"worst {worst:.2e}"))

    x, y, z = g.cell_centers()
    lin = np.ascontiguousarray(np.broadcast_to(1.5 * x + 2.5 * y - 0.5 * z, g.shape))
    gr = gradient_fd(g, lin)
    err = max(
        float(np.max(np.abs(gr[..., 0] - 1.5))),
        float(np.max(np.abs(gr[..., 1] - 2.5))),
        float(np.max(np.abs(gr[..., 2] + 0.5))),
    )
    out.append(_res("grid", "central differences exact on affine fields", err < 1e-12, f"max err {err:.2e}"))

    errs = []
    for nn in (16, 32, 64):
        gg = GridSpec(nn, 8, 8, 2.0, 1.0, 1.0)
        xx, _, _ = gg.cell_centers()
        ff = np.ascontiguousarray(np.broadcast_to(np.sin(2 * np.pi * xx / 2.0), gg.shape))
        d = gradient_fd(gg, ff)[..., 0]
        exact = np.broadcast_to(np.pi * np.cos(2 * np.pi * xx / 2.0), gg.shape)
        errs.append(float(np.sqrt(np.mean((d - exact) ** 2))))
    hs = [2.0 / 16, 2.0 / 32, 2.0 / 64]
    slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    out.append(_res("grid", "derivative convergence order >= 1.9", slope >= 1.9, f"order {slope:.3f}"))

    from .grid import curl

    cg = curl(g, gradient_fd(g, f))
    worst = float(np.max(np.abs(cg)))
    out.append(_res("grid", "curl of gradient vanishes", worst < 1e-10, f"max {worst:.2e}"))

    box = integrate(g, np.ones(g.shape))
    out.append(
        _res(
            "grid",
            "integrate(1) recovers the box volume",
            abs(box / g.box_volume - 1.0) < 1e-14,
            f"{box} vs {g.box_volume}",
        )
    )
    return out


def calibration_suite(n_cells: int = 48) -> list[CheckResult]:
    out = []
    R, L = 0.8, 2.0
    g = GridSpec(n_cells, n_cells, n_cells, L, L, L)
    eps = 2.0 * g.max_spacing
    D = DiffuseParams(eps_phi=eps, eps_v=eps)
    S = SurfaceParams(1.0, 0.5)
    m = 4.0 / 3.0 * np.pi * R**3
    state = build_state(g, ShapeInit("ball", radius=R), DirectorInit("uniform"), eps, seed=0)
    state.phi = project_volume(g, state.phi, m)

    vol = integrate(g, state.phi)
    out.append(_res("calibration", "projected ball volume within 1%", abs(vol / m - 1.0) < 0.01, f"rel err {vol / m - 1:+.2e}"))
    pe = perimeter_energy(g, state.phi, S, D)
    out.append(
        _res("calibration", "ball perimeter within 3%", abs(pe / (4 * np.pi * R**2) - 1.0) < 0.03, f"rel err {pe / (4 * np.pi * R**2) - 1:+.3f}")
    )
    ao = anchoring_outer(state, S, D)
    expect = S.lam * 4 * np.pi * R**2 / 3.0
    out.append(
        _res("calibration", "uniform-director anchoring within 5%", abs(ao / expect - 1.0) < 0.05, f"rel err {ao / expect - 1:+.3f}")
    )
    return out


def gradient_suite(seed: int = 9) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    g = GridSpec(10, 9, 11, 1.0, 0.9, 1.1)
    state = FieldState(
        g,
        normalize_director(rng.normal(size=g.shape + (3,))),
        rng.uniform(0.05, 0.95, size=g.shape),
        rng.uniform(0.1, 1.0, size=g.shape),
    )
    K = ElasticConstants(1.2, 2.0, 3.0, 0.4, q0=1.5)
    S = SurfaceParams(1.3, 0.7)
    D = DiffuseParams(eps_phi=2.1 * g.max_spacing, eps_v=2.5 * g.max_spacing, inner_anchoring_mode="penalized")
    grads = variational_gradients(state, K, S, D)
    worst = 0.0
    h = 1e-6
    for name, grad in zip(("n", "phi", "v"), grads):
        for _ in range(6):
            direction = rng.normal(size=getattr(state, name).shape)
            sp, sm = state.copy(), state.copy()
            getattr(sp, name)[...] = getattr(state, name) + h * direction
            getattr(sm, name)[...] = getattr(state, name) - h * direction
            num = (total_energy(sp, K, S, D).e_total - total_energy(sm, K, S, D).e_total) / (2 * h)
            ana = float(np.sum(grad * direction))
            worst = max(worst, abs(num - ana) / max(1e-300, abs(ana)))
    return [_res("gradient", "analytic field gradients match finite differences", worst < 1e-5, f"worst rel err {worst:.2e}")]


SUITES: dict[str, Callable[[], list[CheckResult]]] = {
    "oracle": oracle_suite,
    "convexity": convexity_suite,
    "kernel": kernel_suite,
    "coercivity": coercivity_suite,
    "grid": grid_suite,
    "calibration": calibration_suite,
    "gradient": gradient_suite,
}


def run_all(names: Sequence[str] | None = None) -> list[CheckResult]:
    """Run the requested suites on a worker pool, results in declaration order."""
    picked = list(SUITES) if names is None else list(names)
    for name in picked:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}")
    with ThreadPoolExecutor(max_workers=min(worker_count(), len(picked))) as pool:
        futures = [pool.submit(SUITES[name]) for name in picked]
        results: list[CheckResult] = []
        for fut in futures:
            results.extend(fut.result())
    return results
