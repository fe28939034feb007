"""Pointwise elastic and surface energy densities.

The bulk density is the four-constant distortion energy of a unit director
field n with gradient G (G[i, k] = dn_i/dx_k):

    W = (k11/2)(div n)^2 + (k22/2)(n . curl n + q0)^2
      + (k33/2)|n x curl n|^2 + (k24/2)[tr(G^2) - (div n)^2]

and the surface density is the quadratic anchoring formula

    g(n, nu) = gamma * (1 + lambda * (n . nu)^2),

together with its extension g_hat, convex and positively one-homogeneous in
the second argument for lambda in [-1/2, 1].

All densities are vectorized: the director/gradient arguments accept leading
batch axes, e.g. n of shape (..., 3) and G of shape (..., 3, 3).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ElasticConstants",
    "SurfaceParams",
    "PointDirector",
    "EricksenError",
    "ConsistencyError",
    "validate_ericksen",
    "validate_ericksen_closed",
    "frank_density",
    "frank_density_raw",
    "frank_density_grads",
    "one_constant_density",
    "rapini_papoular",
    "g_hat",
    "coercivity_check",
]

UNIT_TOL_CONSTRUCT = 1e-12   # unit-norm tolerance at construction
UNIT_TOL_OPERATION = 1e-9    # unit-norm tolerance at operation boundaries

# Levi-Civita tensor, used for curl extraction from the gradient tensor.
_EPS = np.zeros((3, 3, 3))
_EPS[0, 1, 2] = _EPS[1, 2, 0] = _EPS[2, 0, 1] = 1.0
_EPS[0, 2, 1] = _EPS[2, 1, 0] = _EPS[1, 0, 2] = -1.0

_ID3 = np.eye(3)


class EricksenError(ValueError):
    """Elastic constants violate the strict Ericksen inequalities."""


class ConsistencyError(ValueError):
    """A geometric precondition (unit norm, unit-field consistency) fails."""


@dataclass(frozen=True)
class ElasticConstants:
    """Splay, twist, bend and saddle-splay constants plus the natural twist q0."""

    k11: float
    k22: float
    k33: float
    k24: float
    q0: float = 0.0

    def __post_init__(self) -> None:
        vals = (self.k11, self.k22, self.k33, self.k24, self.q0)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError(f"non-finite elastic constants: {vals}")

    @classmethod
    def one_constant(cls, k: float, q0: float = 0.0) -> "ElasticConstants":
        return cls(k11=k, k22=k, k33=k, k24=k, q0=q0)

    def validated(self) -> "ElasticConstants":
        """Return self if the Ericksen inequalities hold, else raise."""
        violations = validate_ericksen(self)
        if violations:
            raise EricksenError("Ericksen inequalities violated: " + ", ".join(violations))
        return self


@dataclass(frozen=True)
class SurfaceParams:
    """Isotropic tension gamma > 0 and anchoring strength lambda > -1."""

    gamma: float
    lam: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.gamma) and np.isfinite(self.lam)):
            raise ValueError("non-finite surface parameters")
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.lam <= -1.0:
            raise ValueError(f"lambda must exceed -1, got {self.lam}")

    @property
    def convexity_safe(self) -> bool:
        """True iff lambda lies in [-1/2, 1], where g_hat is convex in p."""
        return -0.5 <= self.lam <= 1.0


def validate_ericksen(K: ElasticConstants) -> list[str]:
    """Check the four strict inequalities; return the names of any violations.

    An empty list means the constants are admissible.  Non-finite input is
    rejected at :class:`ElasticConstants` construction.
    """
    violations = []
    if not K.k11 - K.k24 > 0.0:
        violations.append("k11-k24>0")
    if not K.k22 - K.k24 > 0.0:
        violations.append("k22-k24>0")
    if not K.k33 > 0.0:
        violations.append("k33>0")
    if not K.k24 > 0.0:
        violations.append("k24>0")
    return violations


def validate_ericksen_closed(K: ElasticConstants) -> list[str]:
    """Non-strict variant admitting the boundary of the Ericksen cone.

    The equal-constants reduction k11 = k22 = k33 = k24 sits exactly on that
    boundary, so energy assembly and run configs gate on this check while
    :func:`validate_ericksen` reports the strict inequalities as stated.
    """
    violations = []
    if K.k11 - K.k24 < 0.0:
        violations.append("k11-k24>=0")
    if K.k22 - K.k24 < 0.0:
        violations.append("k22-k24>=0")
    if not K.k33 > 0.0:
        violations.append("k33>0")
    if K.k24 < 0.0:
        violations.append("k24>=0")
    return violations


@dataclass(frozen=True)
class PointDirector:
    """A single director sample: unit vector n and gradient tensor G.

    G[i, k] = dn_i/dx_k.  The unit norm is enforced at construction; the
    unit-field consistency G^T n = 0 is *checked* on demand only (it holds
    for exact unit fields but drifts under discretization).
    """

    n: np.ndarray
    G: np.ndarray

    def __post_init__(self) -> None:
        n = np.asarray(self.n, dtype=float)
        G = np.asarray(self.G, dtype=float)
        if n.shape != (3,) or G.shape != (3, 3):
            raise ValueError("PointDirector expects n of shape (3,), G of shape (3,3)")
        if abs(np.linalg.norm(n) - 1.0) > UNIT_TOL_CONSTRUCT:
            raise ConsistencyError(f"|n| = {np.linalg.norm(n)!r} is not 1 within {UNIT_TOL_CONSTRUCT}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "G", G)

    def consistency_defect(self) -> float:
        """max |(G^T n)_k|, zero for exact unit fields."""
        return float(np.max(np.abs(self.G.T @ self.n)))


def frank_density_raw(K: ElasticConstants, s: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Four-constant density evaluated on arbitrary (s, M), vectorized.

    No unit-norm or consistency assumptions; this is the kernel used both for
    field-level energies and for the coercivity sampling, where (s, M) range
    over all of R^3 x R^{3x3}.
    """
    s = np.asarray(s, dtype=float)
    M = np.asarray(M, dtype=float)
    div = np.einsum("...ii->...", M)
    curl = np.einsum("jab,...ba->...j", _EPS, M)
    tw = np.einsum("...j,...j->...", s, curl) + K.q0
    bend = np.cross(s, curl)
    tr_m2 = np.einsum("...ij,...ji->...", M, M)
    return 0.5 * (
        K.k11 * div**2
        + K.k22 * tw**2
        + K.k33 * np.einsum("...j,...j->...", bend, bend)
        + K.k24 * (tr_m2 - div**2)
    )


def frank_density(K: ElasticConstants, p: PointDirector) -> float:
    """Distortion energy density at a single well-formed director sample."""
    return float(frank_density_raw(K, p.n, p.G))


def frank_density_grads(
    K: ElasticConstants, s: np.ndarray, M: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Density W plus its exact partial derivatives (dW/ds, dW/dM).

    Derivatives are taken treating s and M as independent; they are the
    building blocks for the discrete field gradients of the bulk energy.
    """
    s = np.asarray(s, dtype=float)
    M = np.asarray(M, dtype=float)
    div = np.einsum("...ii->...", M)
    curl = np.einsum("jab,...ba->...j", _EPS, M)
    tw = np.einsum("...j,...j->...", s, curl) + K.q0
    bend = np.cross(s, curl)
    tr_m2 = np.einsum("...ij,...ji->...", M, M)
    w = 0.5 * (
        K.k11 * div**2
        + K.k22 * tw**2
        + K.k33 * np.einsum("...j,...j->...", bend, bend)
        + K.k24 * (tr_m2 - div**2)
    )
    dw_ds = K.k22 * tw[..., None] * curl + K.k33 * np.cross(curl, bend)
    dw_dcurl = K.k22 * tw[..., None] * s + K.k33 * np.cross(bend, s)
    dw_dm = (
        (K.k11 - K.k24) * div[..., None, None] * _ID3
        + K.k24 * np.swapaxes(M, -1, -2)
        + np.einsum("...j,jki->...ik", dw_dcurl, _EPS)
    )
    return w, dw_ds, dw_dm


def one_constant_density(k: float, p: PointDirector, tol: float = UNIT_TOL_OPERATION) -> float:
    """(k/2) |G|^2, the equal-constants reduction of the four-constant density.

    Requires the unit-field consistency G^T n = 0; under it this equals
    frank_density with k11 = k22 = k33 = k24 = k and q0 = 0.
    """
    defect = p.consistency_defect()
    if defect > tol:
        raise ConsistencyError(f"G^T n = {defect:.3e} exceeds tolerance {tol:.1e}")
    return 0.5 * k * float(np.sum(p.G * p.G))


def _require_unit(v: np.ndarray, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    norms = np.sqrt(np.sum(v * v, axis=-1))
    if np.any(np.abs(norms - 1.0) > UNIT_TOL_OPERATION):
        worst = float(np.max(np.abs(norms - 1.0)))
        raise ConsistencyError(f"|{name}| deviates from 1 by {worst:.3e}")
    return v


def rapini_papoular(S: SurfaceParams, n: np.ndarray, nu: np.ndarray) -> np.ndarray:
    """gamma * (1 + lambda (n . nu)^2) for unit n, nu; vectorized over batches."""
    n = _require_unit(n, "n")
    nu = _require_unit(nu, "nu")
    dot = np.einsum("...j,...j->...", n, nu)
    out = S.gamma * (1.0 + S.lam * dot**2)
    return out if out.ndim else float(out)


def g_hat(S: SurfaceParams, v: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Positively one-homogeneous surface density gamma(|p||v|^2 + lambda (v.p)^2/|p|).

    Evaluates for any lambda > -1; the convexity guarantee only holds on the
    convexity-safe range (see SurfaceParams.convexity_safe).  p = 0 maps to 0.
    """
    v = np.asarray(v, dtype=float)
    p = np.asarray(p, dtype=float)
    pn = np.sqrt(np.einsum("...j,...j->...", p, p))
    vp = np.einsum("...j,...j->...", v, p)
    v2 = np.einsum("...j,...j->...", v, v)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = S.gamma * (pn * v2 + S.lam * np.where(pn > 0.0, vp**2 / np.where(pn > 0.0, pn, 1.0), 0.0))
    out = np.where(pn > 0.0, out, 0.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class CoercivityFit:
    """Empirical sandwich constants c1 min(|s|^2,1)|M|^2 - c2 <= W <= c3 max(1,|s|^2)|M|^2 + c4."""

    c1: float
    c2: float
    c3: float
    c4: float
    ok: bool
    n_samples: int

    def holds(self, K: ElasticConstants, s: np.ndarray, M: np.ndarray, slack: float = 1e-9) -> bool:
        w = frank_density_raw(K, s, M)
        m2 = np.einsum("...ij,...ij->...", M, M)
        s2 = np.einsum("...j,...j->...", s, s)
        lower = self.c1 * np.minimum(s2, 1.0) * m2 - self.c2
        upper = self.c3 * np.maximum(s2, 1.0) * m2 + self.c4
        scale = 1.0 + np.abs(w)
        return bool(np.all(lower <= w + slack * scale) and np.all(w <= upper + slack * scale))


def coercivity_check(K: ElasticConstants, samples: list[tuple[np.ndarray, np.ndarray]] | tuple[np.ndarray, np.ndarray]) -> CoercivityFit:
    """Fit the tightest sandwich constants over a finite sample of (s, M) pairs.

    Convention: the additive constants c2, c4 are the smallest values that any
    slope permits, then c1 is the largest lower slope and c3 the smallest
    upper slope compatible with them.  For the one-constant density on unit
    s this recovers c1 = c3 = 1/2, c2 = c4 = 0 exactly.
    """
    closed = validate_ericksen_closed(K)
    if closed:
        raise EricksenError("coercivity_check requires admissible constants: " + ", ".join(closed))
    if isinstance(samples, tuple) and len(samples) == 2 and isinstance(samples[0], np.ndarray):
        s_arr, m_arr = samples
    else:
        if len(samples) == 0:
            raise ValueError("coercivity_check requires at least one sample")
        s_arr = np.stack([np.asarray(s, dtype=float) for s, _ in samples])
        m_arr = np.stack([np.asarray(m, dtype=float) for _, m in samples])
    if s_arr.shape[0] == 0:
        raise ValueError("coercivity_check requires at least one sample")

    w = frank_density_raw(K, s_arr, m_arr)
    m2 = np.einsum("...ij,...ij->...", m_arr, m_arr)
    s2 = np.einsum("...j,...j->...", s_arr, s_arr)
    low_q = np.minimum(s2, 1.0) * m2
    up_q = np.maximum(s2, 1.0) * m2

    c2 = max(0.0, float(-np.min(w)))
    pos = low_q > 0.0
    c1 = float(np.min((w[pos] + c2) / low_q[pos])) if np.any(pos) else 0.0
    c1 = max(c1, 0.0)

    zero_up = up_q <= 0.0
    c4 = max(0.0, float(np.max(w[zero_up]))) if np.any(zero_up) else 0.0
    pos_up = ~zero_up
    c3 = float(np.max((w[pos_up] - c4) / up_q[pos_up])) if np.any(pos_up) else 0.0
    c3 = max(c3, 0.0)

    fit = CoercivityFit(c1=c1, c2=c2, c3=c3, c4=c4, ok=True, n_samples=int(s_arr.shape[0]))
    finite = all(np.isfinite(c) for c in (c1, c2, c3, c4))
    ok = finite and fit.holds(K, s_arr, m_arr)
    if ok:
        return fit
    return CoercivityFit(c1=c1, c2=c2, c3=c3, c4=c4, ok=False, n_samples=int(s_arr.shape[0]))
