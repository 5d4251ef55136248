"""Sampling of k-planes in R^n: Haar frames, low-discrepancy frames, complex lines."""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .fields import PlaneFrame


def _orth_rows(mat: np.ndarray) -> np.ndarray:
    """Orthonormalize the rows of a (k, n) matrix."""
    q, r = np.linalg.qr(mat.T)
    # fix signs so the map is continuous in the input
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return (q * signs).T


def haar_frames(k: int, n: int, count: int, seed: int = 0) -> list[PlaneFrame]:
    """Seeded Haar-distributed k-planes in R^n (Gaussian frames, orthonormalized)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        g = rng.standard_normal((k, n))
        out.append(PlaneFrame(_orth_rows(g)))
    return out


def sobol_frames(k: int, n: int, count: int, seed: int = 0) -> list[PlaneFrame]:
    """Low-discrepancy sweep of G(k, n): scrambled Sobol -> Gaussian -> QR."""
    if k == 0:
        return [PlaneFrame(np.zeros((0, n)))]
    sob = qmc.Sobol(d=k * n, scramble=True, seed=seed)
    pts = np.clip(sob.random(count), 1e-12, 1.0 - 1e-12)
    g = ndtri(pts).reshape(count, k, n)
    return [PlaneFrame(_orth_rows(gi)) for gi in g]


def complex_structure(m: int) -> np.ndarray:
    """The standard complex structure J on R^(2m) pairing coordinates (2j, 2j+1)."""
    J = np.zeros((2 * m, 2 * m))
    for j in range(m):
        J[2 * j, 2 * j + 1] = -1.0
        J[2 * j + 1, 2 * j] = 1.0
    return J


def complex_line_frames(m: int, count: int, seed: int = 0) -> list[PlaneFrame]:
    """Random complex lines in C^m viewed as real 2-planes {v, Jv} in R^(2m)."""
    rng = np.random.default_rng(seed)
    J = complex_structure(m)
    out = []
    for _ in range(count):
        v = rng.standard_normal(2 * m)
        v /= np.linalg.norm(v)
        out.append(PlaneFrame(_orth_rows(np.vstack([v, J @ v]))))
    return out
