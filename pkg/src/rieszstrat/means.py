"""Spherical mean S, spherical max M, volume mean V, and Laplacian mass."""

from __future__ import annotations

import warnings

import numpy as np

from .errors import DomainError
from .fields import ScalarField, available_radius
from .kernels import RadialProfile, riesz_kernel
from .quadrature import ball_nodes, sphere_nodes

_CHUNK = 4_000_000  # max field evaluations per vectorized batch


def _check_ball(u: ScalarField, x: np.ndarray, r: float) -> None:
    if r <= 0 or r > available_radius(u, x) + 1e-12:
        raise DomainError(f"ball of radius {r} around {x} not contained in domain")


def spherical_mean(u: ScalarField, x, r: float, count: int = 2048, seed: int = 0) -> float:
    """Average of u over the sphere of radius r around x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check_ball(u, x, r)
    nodes = sphere_nodes(u.n, count, seed)
    return float(np.mean(u.eval_masked(x + r * nodes)))


def volume_mean(u: ScalarField, x, r: float, count: int = 2048, seed: int = 0) -> float:
    """Average of u over the ball of radius r around x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check_ball(u, x, r)
    nodes = ball_nodes(u.n, count, seed)
    return float(np.mean(u.eval_masked(x + r * nodes)))


def spherical_max(u: ScalarField, x, r: float, count: int = 2048, seed: int = 0,
                  refine_rounds: int = 2) -> float:
    """Sup of u over the closed ball of radius r around x.

    Dense sphere + ball sampling followed by local refinement around the
    incumbent maximizer (the sup of an upper-semicontinuous function needs
    local densification, not uniform density).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check_ball(u, x, r)
    cands = np.concatenate([sphere_nodes(u.n, count, seed), ball_nodes(u.n, count, seed)])
    vals = u.eval_masked(x + r * cands)
    i = int(np.argmax(vals))
    best, best_val = cands[i], float(vals[i])
    rng = np.random.default_rng(seed + 77)
    scale = 0.3
    for _ in range(refine_rounds):
        cloud = best + scale * rng.standard_normal((256, u.n))
        norms = np.linalg.norm(cloud, axis=1)
        over = norms > 1.0
        cloud[over] /= norms[over, None]
        v = u.eval_masked(x + r * cloud)
        j = int(np.argmax(v))
        if v[j] > best_val:
            best, best_val = cloud[j], float(v[j])
        scale *= 0.25
    return best_val


def profile(u: ScalarField, x, radii, which: str = "S", count: int = 2048, seed: int = 0) -> RadialProfile:
    """Radial profile of S, M, or V at the given radii."""
    radii = np.sort(np.asarray(radii, dtype=float))
    fn = {"S": spherical_mean, "M": spherical_max, "V": volume_mean}[which]
    vals = [fn(u, x, r, count=count, seed=seed) for r in radii]
    return RadialProfile(radii, np.array(vals), meaning=which)


def left_quotient(u: ScalarField, x, r: float, p: float, which: str = "S",
                  count: int = 2048, seed: int = 0, richardson: bool = True) -> float:
    """Left difference quotient of the S or M profile in the K_p coordinate at r.

    Uses step delta = r/8 with one Richardson extrapolation against r/16 by
    default; exact (independent of delta) when the profile is a*K_p + b.
    """
    fn = spherical_mean if which == "S" else spherical_max

    def quot(delta):
        num = fn(u, x, r, count=count, seed=seed) - fn(u, x, r - delta, count=count, seed=seed)
        den = riesz_kernel(p, r) - riesz_kernel(p, r - delta)
        return num / den

    q1 = quot(r / 8.0)
    if not richardson:
        return q1
    q2 = quot(r / 16.0)
    return 2.0 * q2 - q1


def laplacian_mass(u: ScalarField, x, r: float, count: int = 2048, seed: int = 0) -> float:
    """Mass of the Laplacian of u on B_r(x), from the left S-quotient in the
    ambient kernel coordinate K_n.

    Calibrated so that u = K_n(|.|) in R^n carries unit mass at every radius.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    val = left_quotient(u, x, r, p=float(u.n), which="S", count=count, seed=seed)
    if val < -1e-3:
        warnings.warn(f"negative Laplacian-mass estimate {val:.3g}: field may not be subharmonic")
    return max(val, 0.0)


# ---------------------------------------------------------------------------
# bulk vectorized statistics for lattice sweeps


def bulk_spherical_mean(u: ScalarField, X: np.ndarray, radii: np.ndarray,
                        count: int = 256, seed: int = 0) -> np.ndarray:
    """S(u, x, r) for every point in X (m, n) and radius in radii (q,), shape (m, q)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    nodes = sphere_nodes(u.n, count, seed)
    return _bulk_reduce(u, X, radii, nodes, reducer="mean")


def bulk_spherical_max(u: ScalarField, X: np.ndarray, radii: np.ndarray,
                       count: int = 256, seed: int = 0) -> np.ndarray:
    """Coarse bulk M (no local refinement), shape (m, q)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    nodes = np.concatenate([sphere_nodes(u.n, count, seed), ball_nodes(u.n, count, seed)])
    return _bulk_reduce(u, X, radii, nodes, reducer="max")


def bulk_abs_mean(u: ScalarField, X: np.ndarray, radii: np.ndarray,
                  count: int = 256, seed: int = 0, half_shift: bool = False,
                  p: float | None = None) -> np.ndarray:
    """Mean over unit-ball nodes y of |u(x + r y)| (half_shift=False) or of
    |u(x + r y) - 2^(p-2) u(x + r y / 2)| (half_shift=True), shape (m, q).

    These are the integrands of the zero-model bound and of the
    scale-mismatch bound for the flow u_{x,r} (p > 2 algebra).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    nodes = ball_nodes(u.n, count, seed)
    if not half_shift:
        return _bulk_reduce(u, X, radii, nodes, reducer="absmean")
    fac = (0.5) ** ((p if p is not None else u.p) - 2.0)
    a = _bulk_reduce(u, X, radii, nodes, reducer=None)
    b = _bulk_reduce(u, X, radii, 0.5 * nodes, reducer=None)
    return np.mean(np.abs(a - fac * b), axis=2)


def _bulk_reduce(u: ScalarField, X: np.ndarray, radii: np.ndarray,
                 nodes: np.ndarray, reducer):
    m, q, N = X.shape[0], radii.size, nodes.shape[0]
    if reducer is None:
        out = np.empty((m, q, N))
    else:
        out = np.empty((m, q))
    rows = max(1, _CHUNK // max(1, q * N))
    for lo in range(0, m, rows):
        hi = min(m, lo + rows)
        pts = (X[lo:hi, None, None, :] + radii[None, :, None, None] * nodes[None, None, :, :])
        vals = u.eval_masked(pts.reshape(-1, u.n)).reshape(hi - lo, q, N)
        if reducer == "mean":
            out[lo:hi] = np.mean(vals, axis=2)
        elif reducer == "max":
            out[lo:hi] = np.max(vals, axis=2)
        elif reducer == "absmean":
            out[lo:hi] = np.mean(np.abs(vals), axis=2)
        else:
            out[lo:hi] = vals
    return out
