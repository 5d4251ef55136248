"""Constructors for fields with known singular structure, densities, and strata."""

from __future__ import annotations

import numpy as np

from .errors import DomainError, MemoryGuardError, ResolutionError, UnsupportedCharacteristicError
from .fields import Ball, PlaneFrame, ScalarField, from_grid
from .kernels import riesz_kernel

_GRID_CELL_BUDGET = 128


def riesz_sum(centers, weights, p: float, n: int, domain_radius: float = 2.0) -> ScalarField:
    """u(x) = sum_i w_i K_p(|x - x_i|); density at x_i equals w_i, smooth elsewhere."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float)) if len(centers) else np.zeros((0, n))
    weights = np.asarray(weights, dtype=float)
    if centers.shape[0] != weights.size:
        raise DomainError("need one weight per center")
    if np.any(weights < 0):
        raise DomainError("weights must be nonnegative")
    if centers.shape[0] and centers.shape[1] != n:
        raise DomainError("center dimension mismatch")
    if centers.shape[0] > 1:
        d = np.linalg.norm(centers[:, None] - centers[None, :], axis=2)
        if np.min(d[~np.eye(len(centers), dtype=bool)]) < 1e-9:
            raise DomainError("centers must be distinct")
    if p < 2 or p > n:
        raise UnsupportedCharacteristicError(
            f"K_{p} sums are subharmonic in R^n only for 2 <= p <= n (got p={p}, n={n})"
        )

    if centers.shape[0] == 0:
        ev = lambda pts: np.zeros(len(np.atleast_2d(pts)))
        sd = None
    else:
        def ev(pts, _c=centers, _w=weights, _p=p):
            pts = np.atleast_2d(pts)
            d = np.linalg.norm(pts[:, None, :] - _c[None, :, :], axis=2)
            d = np.maximum(d, 1e-300)
            return riesz_kernel(_p, d) @ _w

        def sd(pts, _c=centers):
            pts = np.atleast_2d(pts)
            return np.min(np.linalg.norm(pts[:, None, :] - _c[None, :, :], axis=2), axis=1)

    return ScalarField(n=n, domain=Ball(np.zeros(n), domain_radius), p=float(p),
                       evaluator=ev, singular_distance=sd, label="riesz_sum")


def plane_kernel(V: PlaneFrame, p: float, domain_radius: float = 2.0) -> ScalarField:
    """u(x) = K_p(dist(x, V)) for a plane V of dimension n - p.

    Exactly (n-p)-homogeneous at every point of V and harmonic off V.
    """
    n = V.n
    if abs((n - p) - V.k) > 1e-9:
        raise DomainError(f"plane dimension {V.k} must equal n - p = {n - p}")
    if p < 2:
        raise UnsupportedCharacteristicError("plane kernels need p >= 2")

    def ev(pts, _V=V, _p=p):
        d = np.maximum(_V.distance(np.atleast_2d(pts)), 1e-300)
        return riesz_kernel(_p, d)

    return ScalarField(n=n, domain=Ball(np.zeros(n), domain_radius), p=float(p),
                       evaluator=ev, singular_distance=lambda pts, _V=V: _V.distance(pts),
                       label="plane_kernel")


def log_modulus(poly: dict, m: int, domain_radius: float = 2.0) -> ScalarField:
    """u(z) = log |P(z)| on R^(2m) identified with C^m; p = 2 analyses apply.

    poly maps exponent tuples of length m to complex coefficients; the
    coordinate pairing is z_j = x_(2j) + i x_(2j+1).
    """
    if not poly or all(abs(c) == 0 for c in poly.values()):
        raise DomainError("polynomial must not be identically zero")
    terms = [(np.asarray(a, dtype=int), complex(c)) for a, c in poly.items()]
    for a, _ in terms:
        if a.size != m:
            raise DomainError("exponent tuples must have length m")

    def ev(pts, _terms=terms, _m=m):
        pts = np.atleast_2d(pts)
        z = pts[:, 0::2] + 1j * pts[:, 1::2]
        val = np.zeros(len(pts), dtype=complex)
        for a, c in _terms:
            term = np.full(len(pts), c, dtype=complex)
            for j in range(_m):
                if a[j]:
                    term = term * z[:, j] ** int(a[j])
            val += term
        return np.log(np.maximum(np.abs(val), 1e-300))

    return ScalarField(n=2 * m, domain=Ball(np.zeros(2 * m), domain_radius), p=2.0,
                       evaluator=ev, label="log_modulus")


def _poly_laplacian(coeffs: dict, n: int) -> dict:
    out: dict = {}
    for a, c in coeffs.items():
        a = tuple(int(e) for e in a)
        for i in range(n):
            if a[i] >= 2:
                b = list(a)
                b[i] -= 2
                b = tuple(b)
                out[b] = out.get(b, 0.0) + c * a[i] * (a[i] - 1)
    return out


def harmonic_plus_kernel(h_coeffs: dict, center, weight: float, p: float, n: int,
                         domain_radius: float = 2.0) -> ScalarField:
    """u = h + w K_p(|. - center|) with h a harmonic polynomial of degree <= 3."""
    h_coeffs = {tuple(int(e) for e in a): float(c) for a, c in h_coeffs.items()}
    for a in h_coeffs:
        if len(a) != n:
            raise DomainError("exponent tuples must have length n")
        if sum(a) > 3:
            raise DomainError("harmonic part must have degree <= 3")
    lap = _poly_laplacian(h_coeffs, n)
    if any(abs(c) > 1e-12 for c in lap.values()):
        raise DomainError("polynomial part is not harmonic")
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if p < 2 or p > n:
        raise UnsupportedCharacteristicError(f"need 2 <= p <= n (got p={p}, n={n})")

    def ev(pts, _h=h_coeffs, _c=center, _w=weight, _p=p):
        pts = np.atleast_2d(pts)
        val = np.zeros(len(pts))
        for a, coef in _h.items():
            term = np.full(len(pts), coef)
            for i, e in enumerate(a):
                if e:
                    term = term * pts[:, i] ** e
            val += term
        if _w:
            d = np.maximum(np.linalg.norm(pts - _c, axis=1), 1e-300)
            val += _w * riesz_kernel(_p, d)
        return val

    sd = None
    if weight:
        sd = lambda pts, _c=center: np.linalg.norm(np.atleast_2d(pts) - _c, axis=1)
    return ScalarField(n=n, domain=Ball(np.zeros(n), domain_radius), p=float(p),
                       evaluator=ev, singular_distance=sd, label="harmonic_plus_kernel")


def grid_sample(u: ScalarField, resolution: int, ball: Ball) -> ScalarField:
    """Grid-backed copy of u: (resolution+1)^n lattice samples over the ball's cube."""
    if resolution < 8:
        raise ResolutionError("grid resolution must be at least 8 per axis")
    m = resolution + 1
    if m ** u.n > _GRID_CELL_BUDGET ** u.n:
        raise MemoryGuardError(f"grid of {m}^{u.n} cells exceeds the {_GRID_CELL_BUDGET}^n budget")
    h = 2.0 * ball.radius / resolution
    half = (m - 1) / 2.0
    axis = np.arange(m) - half
    grids = np.meshgrid(*([axis] * u.n), indexing="ij")
    pts = ball.center + h * np.stack([g.ravel() for g in grids], axis=1)
    vals = u.eval_masked(pts).reshape((m,) * u.n)
    return from_grid(vals, ball.center, h, u.p,
                     singular_distance=u.singular_distance, label=f"{u.label}-grid")
