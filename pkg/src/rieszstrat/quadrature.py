"""Deterministic low-discrepancy quadrature nodes on spheres and balls."""

from __future__ import annotations

from functools import lru_cache
from math import gamma, pi

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n."""
    return pi ** (n / 2.0) / gamma(n / 2.0 + 1.0)


@lru_cache(maxsize=256)
def _sphere_nodes_cached(n: int, count: int, seed: int) -> np.ndarray:
    half = max(1, count // 2)
    sob = qmc.Sobol(d=n, scramble=True, seed=seed)
    # shift away from the exact 0/1 corners before the Gaussian map
    pts = sob.random(half)
    pts = np.clip(pts, 1e-12, 1.0 - 1e-12)
    g = ndtri(pts)
    norms = np.linalg.norm(g, axis=1)
    bad = norms < 1e-12
    if np.any(bad):
        g[bad] = 1.0
        norms[bad] = np.sqrt(n)
    g /= norms[:, None]
    nodes = np.concatenate([g, -g], axis=0)
    nodes.setflags(write=False)
    return nodes


def sphere_nodes(n: int, count: int = 2048, seed: int = 0) -> np.ndarray:
    """Antithetic scrambled-Sobol nodes on the unit sphere of R^n, shape (count, n).

    Antithetic pairing makes averages of odd functions exactly zero.
    """
    return _sphere_nodes_cached(int(n), int(count), int(seed))


@lru_cache(maxsize=256)
def _ball_nodes_cached(n: int, per_shell: int, shells: int, seed: int) -> np.ndarray:
    parts = []
    for j in range(shells):
        t = ((j + 0.5) / shells) ** (1.0 / n)
        parts.append(t * sphere_nodes(n, per_shell, seed + 1009 * j))
    nodes = np.concatenate(parts, axis=0)
    nodes.setflags(write=False)
    return nodes


def ball_nodes(n: int, count: int = 2048, seed: int = 0, shells: int = 32) -> np.ndarray:
    """Equal-weight nodes on the unit ball of R^n via equal-volume radial shells.

    The shell radii t_j = ((j+1/2)/shells)^(1/n) stratify the ball into
    equal-volume layers, so the plain average of samples approximates the
    volume mean.
    """
    per_shell = max(2, int(count) // int(shells))
    return _ball_nodes_cached(int(n), per_shell, int(shells), int(seed))
