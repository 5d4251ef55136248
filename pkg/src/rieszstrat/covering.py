"""Vitali coverings, tube volumes, Minkowski-bound checks, and the
scale-indexed decomposition covering."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import ResolutionError
from .fields import Ball, ScalarField
from .means import laplacian_mass
from .quadrature import unit_ball_volume


@dataclass
class StratumReport:
    points: np.ndarray
    indeterminate: np.ndarray
    tube_volumes: dict
    bound_ratios: dict
    cover_counts: dict
    metadata: dict = field(default_factory=dict)


def vitali_cover(points, r: float):
    """Greedy Vitali selection: chosen r-balls are pairwise disjoint and the
    5r-balls around them cover every input point.

    Returns (selected centers, cover radius 5r)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    selected = []
    for p in pts:
        if all(np.linalg.norm(p - s) >= 2.0 * r for s in selected):
            selected.append(p)
    return np.array(selected), 5.0 * r


def tube_volume(points, r: float, ambient_ball: Ball, resolution: float) -> float:
    """Counting-measure estimate of the volume of the r-tube around the points.

    Counts lattice cells of spacing `resolution` whose centers lie inside the
    ambient ball and within distance r of the point set.  Candidate cells are
    generated by separable (axis-by-axis) dilation of the occupied cells, then
    filtered by exact Euclidean distance, so the cost scales with the tube
    volume rather than with the number of input points."""
    h = float(resolution)
    if h > r / 4.0 + 1e-12:
        raise ResolutionError(f"resolution {h} too coarse for tube radius {r} (need h <= r/4)")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if len(pts) == 0:
        return 0.0
    n = pts.shape[1]
    origin = ambient_ball.center
    keys = np.unique(np.round((pts - origin) / h).astype(np.int64), axis=0)
    reach = int(np.ceil(r / h)) + 1
    shifts = np.arange(-reach, reach + 1, dtype=np.int64)
    for axis in range(n):
        chunk = max(1, 4_000_000 // len(shifts))
        parts = []
        for lo in range(0, len(keys), chunk):
            block = np.repeat(keys[lo:lo + chunk], len(shifts), axis=0)
            block[:, axis] += np.tile(shifts, (len(block) // len(shifts) or 1))
            parts.append(np.unique(block, axis=0))
        keys = np.unique(np.concatenate(parts), axis=0)
    centers = origin + h * keys
    inside = np.linalg.norm(centers - origin, axis=1) <= ambient_ball.radius
    centers = centers[inside]
    if len(centers) == 0:
        return 0.0
    d, _ = cKDTree(pts).query(centers, k=1, distance_upper_bound=r + 1e-12)
    return int(np.sum(d <= r)) * h ** n


def minkowski_bound_check(u: ScalarField, eta: float, r_grid, p: float | None = None,
                          search_ball: Ball | None = None, grid_step: float | None = None,
                          count: int = 256, seed: int = 0, tol: float = 0.05,
                          sharpen: bool = True) -> StratumReport:
    """Tube volumes of the high-density set against the bound eta^-1 * mass * r^p.

    The checked set is E_eta = {density >= eta}, the computable superset of the
    top stratum; for each tube radius the report records the ratio
    tube_volume / (eta^-1 * laplacian_mass(B_(1+r)) * r^p) and the log-log
    slope of the tube volume."""
    from .density import high_density_set

    p = float(u.p if p is None else p)
    r_grid = np.sort(np.asarray(r_grid, dtype=float))
    search_ball = search_ball or Ball(np.zeros(u.n), 1.0)
    grid_step = grid_step if grid_step is not None else max(float(r_grid[0]) / 2.0, 0.01)

    E = high_density_set(u, eta, search_ball, grid_step, p=p, tol=tol, count=count,
                         seed=seed, sharpen=sharpen)
    tube_volumes: dict = {}
    bound_ratios: dict = {}
    for r in r_grid:
        if len(E.points):
            vol = tube_volume(E.points, float(r), Ball(search_ball.center,
                                                       search_ball.radius + r),
                              resolution=r / 4.0)
        else:
            vol = 0.0
        mass = laplacian_mass(u, u.domain.center, min(1.0 + r, u.domain.radius * 0.75),
                              count=max(count, 512), seed=seed)
        bound = mass * float(r) ** p / eta
        tube_volumes[float(r)] = vol
        bound_ratios[float(r)] = vol / bound if bound > 0 else np.inf

    vols = np.array([tube_volumes[float(r)] for r in r_grid])
    pos = vols > 0
    slope = float(np.polyfit(np.log(r_grid[pos]), np.log(vols[pos]), 1)[0]) if np.sum(pos) >= 2 else float("nan")
    return StratumReport(points=E.points, indeterminate=np.zeros((0, u.n)),
                         tube_volumes=tube_volumes, bound_ratios=bound_ratios,
                         cover_counts={}, metadata={"eta": eta, "p": p, "slope": slope,
                                                    "components": E.count})


# ---------------------------------------------------------------------------
# decomposition covering


@dataclass
class DecompositionTrace:
    counts: list  # ball count per scale j = 0..j_max
    tuple_counts: list  # per scale: {tuple-string: count}
    tuple_histogram: list  # per scale: number of distinct tuples
    centers: list  # per scale: array of ball centers
    metadata: dict = field(default_factory=dict)


def _greedy_net(points: np.ndarray, radius: float, limit: int = 4000) -> np.ndarray:
    """Centers of a greedy covering of the points by balls of the given radius.

    Farthest-point selection up to `limit` points; beyond that the points are
    snapped to a lattice of spacing 2*radius/sqrt(n) (cell diameter <= 2 radius,
    so cell representatives still cover, at a bounded multiplicative cost)."""
    m, n = points.shape
    if m == 0:
        return points
    if m > limit:
        hh = 2.0 * radius / np.sqrt(n)
        keys = np.round(points / hh).astype(np.int64)
        _, idx = np.unique(keys, axis=0, return_index=True)
        reps = points[np.sort(idx)]
        return _greedy_net(reps, radius, limit=max(limit, len(reps) + 1))
    dists = np.full(m, np.inf)
    chosen = [0]
    dists = np.minimum(dists, np.linalg.norm(points - points[0], axis=1))
    while np.max(dists) > radius:
        i = int(np.argmax(dists))
        chosen.append(i)
        dists = np.minimum(dists, np.linalg.norm(points - points[i], axis=1))
    return points[chosen]


def _cheap_upper(u: ScalarField, X: np.ndarray, s: float, count: int, seed: int) -> np.ndarray:
    from .homogeneity import bulk_zero_upper

    return bulk_zero_upper(u, X, np.array([s]), count=count, seed=seed)[:, 0]


def decomposition_cover(u: ScalarField, eta: float, gamma: float, j_max: int, k: int,
                        eps: float = 0.1, search_ball: Ball | None = None,
                        seed: int = 0, coarse_count: int = 32,
                        keep_centers: bool = False) -> DecompositionTrace:
    """Inductive covering of the stratum candidates at scales gamma^j.

    At each scale the active set (points the cheap zero-model bound cannot
    exclude at that scale) is refined from the previous survivors, covered
    greedily by balls of radius gamma^j inside each parent ball, and each new
    ball is classified H or L according to whether the homogeneity defect at
    its scale exceeds eps (indeterminate classifications count as H, which
    only inflates the reported tuples)."""
    from .homogeneity import bulk_zero_upper

    if not 0 < gamma <= 0.25:
        raise ValueError("gamma must lie in (0, 1/4]")
    search_ball = search_ball or Ball(np.zeros(u.n), 1.0)
    n = u.n

    # scale j=0: seed lattice over the search ball
    step = gamma / 2.0
    from .density import _lattice

    pts = _lattice(search_ball, step)
    upper0 = _cheap_upper(u, pts, 1.0 - 1e-9 if search_ball.radius >= 1 else search_ball.radius,
                          coarse_count, seed)
    pts = pts[upper0 >= 0.5 * eta]

    counts = []
    tuple_counts = []
    tuple_histogram = []
    centers_per_scale = []

    balls = np.zeros((1, n)) if len(pts) else np.zeros((0, n))
    tuples = [""] * len(balls)
    counts.append(len(balls))
    tuple_counts.append(dict(Counter(tuples)))
    tuple_histogram.append(len(set(tuples)))
    centers_per_scale.append(balls.copy())

    for j in range(1, j_max + 1):
        s = gamma ** j
        child_step = s / 2.0
        # refine by halving the lattice spacing, pruning after every halving at
        # cell scale so the surviving set never fattens beyond the tube the
        # exclusion bound allows at that spacing
        while len(pts) and step > child_step * 1.0001:
            h_parent = step
            step = max(child_step, step / 2.0)
            off_axis = np.array([-h_parent / 2.0, 0.0, h_parent / 2.0])
            grids = np.meshgrid(*([off_axis] * n), indexing="ij")
            offsets = np.stack([g.ravel() for g in grids], axis=1)
            chunk = max(1, 2_000_000 // max(1, len(offsets)))
            kept = []
            for lo in range(0, len(pts), chunk):
                children = (pts[lo:lo + chunk, None, :] + offsets[None, :, :]).reshape(-1, n)
                key = np.round((children - search_ball.center) / step).astype(np.int64)
                key = np.unique(key, axis=0)
                children = search_ball.center + step * key
                children = children[search_ball.contains(children)]
                up = _cheap_upper(u, children, max(s, 2.0 * step), coarse_count, seed)
                kept.append(children[up >= 0.5 * eta])
            pts = np.concatenate(kept) if kept else np.zeros((0, n))
            if len(pts):
                key = np.round((pts - search_ball.center) / step).astype(np.int64)
                _, idx = np.unique(key, axis=0, return_index=True)
                pts = pts[np.sort(idx)]
        step = child_step

        # cover the active set inside each parent ball
        new_balls = []
        new_tuples = []
        if len(pts):
            tree = cKDTree(pts)
            prev_scale = gamma ** (j - 1) if len(balls) else None
            assigned = np.zeros(len(pts), dtype=bool)
            for b, tup in zip(balls, tuples):
                idx = tree.query_ball_point(b, prev_scale * 1.001)
                idx = [i for i in idx if not assigned[i]]
                if not idx:
                    continue
                local = pts[idx]
                assigned[idx] = True
                net = _greedy_net(local, s)
                # classify each new ball center at its scale
                ups = bulk_zero_upper(u, net, np.array([gamma ** max(j - 1, 0)]),
                                      count=coarse_count, seed=seed)
                for c, up_b in zip(net, ups[:, 0]):
                    label = "L" if up_b < eps else "H"
                    new_balls.append(c)
                    new_tuples.append(tup + label)
        balls = np.array(new_balls) if new_balls else np.zeros((0, n))
        tuples = new_tuples
        counts.append(len(balls))
        tuple_counts.append(dict(Counter(tuples)))
        tuple_histogram.append(len(set(tuples)))
        centers_per_scale.append(balls.copy() if keep_centers else np.zeros((0, n)))

    return DecompositionTrace(counts=counts, tuple_counts=tuple_counts,
                              tuple_histogram=tuple_histogram, centers=centers_per_scale,
                              metadata={"eta": eta, "gamma": gamma, "j_max": j_max,
                                        "k": k, "eps": eps, "seed": seed})
