"""Quantitative homogeneity: defect bounds, invariance-plane search, strata,
and numerical cone-splitting checks.

For a point x and scale r the defect of being k-homogeneous is
inf_h ||u_{x,r} - h||_{L1(B_1)} over k-homogeneous h.  The infimum is over an
infinite-dimensional family, so the report brackets it:

* lower bound -- a fixed multiple of the scale-mismatch
  ||u_{x,r} - (u_{x,r})_{0,1/2}||_{L1(B_1)}; every homogeneous function is a
  fixed point of the half-scale flow, so the triangle inequality turns the
  mismatch into a certified distance bound to the whole family.
* upper bound -- the distance actually achieved by an explicit model: the
  zero field, a fitted kernel-distance model theta K_p(dist(., V)), or the
  scale-averaged homogenization of u_{x,r} along the best plane found.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize

from .fields import Ball, PlaneFrame, ScalarField, p_flow
from .grassmann import _orth_rows, sobol_frames
from .kernels import riesz_kernel
from .means import bulk_abs_mean, bulk_spherical_max, _bulk_reduce, spherical_max
from .quadrature import ball_nodes, unit_ball_volume


@dataclass
class HomogeneousModel:
    """An explicitly evaluable k-homogeneous function: flow-fixed at 0 and
    translation-invariant along its plane."""

    p: float
    k: int
    plane: PlaneFrame
    theta: float
    kind: str  # "zero", "kernel", "homogenization"
    evaluate: Optional[Callable[[np.ndarray], np.ndarray]] = None
    profile: Optional[dict] = None


@dataclass
class HomogeneityReport:
    lower: float
    upper: float
    plane: PlaneFrame
    model: Optional[HomogeneousModel]
    metadata: dict = field(default_factory=dict)


def _scale_mismatch_constant(n: int, p: float) -> tuple[float, bool]:
    """Triangle constant c0 with lower = c0 * half-scale mismatch.

    For p > 2 the constant is exact: if h is homogeneous then
    ||v - v_{0,1/2}|| <= (1 + 2^(n-p+2)) ||v - h||.  For p = 2 the
    max-anchored flow adds a sup-norm term that L1 does not control, so the
    constant is a documented heuristic (flagged in report metadata).
    """
    if p > 2:
        return 1.0 / (1.0 + 2.0 ** (n - p + 2.0)), True
    return 1.0 / (1.0 + 2.0 ** (n + 1.0)), False


def _plane_distances(nodes: np.ndarray, frames: np.ndarray) -> np.ndarray:
    """dist(node, plane) for nodes (N, n) and stacked frames (B, k, n) -> (B, N)."""
    nsq = np.sum(nodes * nodes, axis=1)
    if frames.shape[1] == 0:
        return np.sqrt(np.tile(nsq, (frames.shape[0], 1)))
    proj = np.einsum("mn,bkn->bmk", nodes, frames)
    d2 = nsq[None, :] - np.sum(proj * proj, axis=2)
    return np.sqrt(np.maximum(d2, 1e-24))


def _kernel_scores(vv: np.ndarray, nodes: np.ndarray, frames: np.ndarray, p: float,
                   vol: float) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares kernel-model fit theta K_p(dist(., V)) per plane.

    Returns (scores, thetas); theta is clamped to be nonnegative so the model
    stays subharmonic."""
    d = _plane_distances(nodes, frames)
    a = riesz_kernel(p, d) if p != 2 else np.log(d)
    denom = np.sum(a * a, axis=1)
    theta = np.maximum(np.einsum("bm,m->b", a, vv) / np.maximum(denom, 1e-300), 0.0)
    resid = np.mean(np.abs(vv[None, :] - theta[:, None] * a), axis=1)
    return vol * resid, theta


def _moment_plane(nodes: np.ndarray, vv: np.ndarray, k: int) -> Optional[np.ndarray]:
    """Plane candidate from the second moments of the most-negative samples."""
    w = np.maximum(np.median(vv) - vv, 0.0)
    if np.sum(w) <= 0:
        return None
    C = (nodes * w[:, None]).T @ nodes / np.sum(w)
    vals, vecs = np.linalg.eigh(C)
    return vecs[:, np.argsort(vals)[::-1][:k]].T.copy()


def _tangent_plane(V0: np.ndarray, comp: np.ndarray, A: np.ndarray) -> np.ndarray:
    k, n = V0.shape
    return _orth_rows(V0 + A.reshape(k, comp.shape[0]) @ comp)


def _homogenization_values(v: ScalarField, nodes: np.ndarray, plane: PlaneFrame,
                           p: float, seed: int) -> tuple[np.ndarray, float]:
    """Values at the nodes of the scale-averaged homogenization of v along plane.

    The model extends the averaged profile g(w) = mean_s s^(p-2) v(s w)
    (w on the unit sphere of the orthogonal complement) homogeneously:
    h(y) = |y_perp|^(2-p) g(y_perp / |y_perp|), hence it is exactly
    k-homogeneous by construction.  For p = 2 the profile is log-anchored and
    normalized so that M(h, 0, 1) = 0.
    """
    if plane.k > 0:
        proj = plane.project_coords(nodes) @ plane.frame
        perp = nodes - proj
    else:
        perp = nodes
    rho = np.maximum(np.linalg.norm(perp, axis=1), 1e-12)
    w = perp / rho[:, None]
    scales = (1.0, 0.5, 0.25)
    if p > 2:
        g = np.zeros(len(nodes))
        for s in scales:
            g += s ** (p - 2.0) * v.eval_masked(s * w)
        g /= len(scales)
        return rho ** (2.0 - p) * g, 0.0
    # p = 2: theta log|y_perp| + g(w), normalized to have zero max on B_1
    m_half = spherical_max(v, np.zeros(v.n), 0.5, count=512, seed=seed)
    m_quarter = spherical_max(v, np.zeros(v.n), 0.25, count=512, seed=seed)
    theta = max((m_half - m_quarter) / math.log(2.0), 0.0)
    g = np.zeros(len(nodes))
    for s in scales:
        g += v.eval_masked(s * w) - theta * math.log(s)
    g /= len(scales)
    g -= np.max(g)
    return theta * np.log(rho) + g, theta


def homogeneity_defect(u: ScalarField, x, r: float, k: int, search_budget: int = 64,
                       count: int = 1024, seed: int = 0, polish: bool = True) -> HomogeneityReport:
    """Bracket the distance of u_{x,r} to the k-homogeneous functions on B_1."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n, p = u.n, float(u.p)
    if not 0 <= k <= n:
        raise ValueError(f"plane dimension k={k} out of range for n={n}")
    v = p_flow(u, x, r)
    nodes = ball_nodes(n, count, seed)
    vol = unit_ball_volume(n)
    vv = v.eval_masked(nodes)

    # certified lower bound from the half-scale mismatch
    if p > 2:
        vhalf = 0.5 ** (p - 2.0) * v.eval_masked(0.5 * nodes)
    else:
        vhalf = v.eval_masked(0.5 * nodes) - spherical_max(v, np.zeros(n), 0.5, count=512, seed=seed)
    mismatch = vol * float(np.mean(np.abs(vv - vhalf)))
    c0, c0_exact = _scale_mismatch_constant(n, p)
    lower_raw = c0 * mismatch

    zero_score = vol * float(np.mean(np.abs(vv)))
    meta = {"c0": c0, "c0_exact": c0_exact, "mismatch": mismatch,
            "zero_score": zero_score, "count": count, "seed": seed,
            "search_budget": search_budget}

    best_plane = PlaneFrame(np.zeros((0, n)))
    best_model = HomogeneousModel(p, k, best_plane, 0.0, "zero",
                                  evaluate=lambda pts: np.zeros(len(np.atleast_2d(pts))))
    if search_budget <= 0 and k not in (0, n):
        upper = math.inf
        lower = lower_raw
        return HomogeneityReport(lower, upper, best_plane, None, meta)

    upper = zero_score
    if k < n:
        # candidate invariance planes
        if k == 0:
            frames = np.zeros((1, 0, n))
        else:
            cands = [f.frame for f in sobol_frames(k, n, max(search_budget, 1), seed)]
            mom = _moment_plane(nodes, vv, k)
            if mom is not None:
                cands.append(mom)
            frames = np.stack(cands)
        scores, thetas = _kernel_scores(vv, nodes, frames, p, vol)
        b = int(np.argmin(scores))
        best_frame, best_theta, best_score = frames[b], float(thetas[b]), float(scores[b])

        if polish and 1 <= k <= n - 1:
            V0 = best_frame
            comp = PlaneFrame(V0).complement().frame

            def objective(A):
                fr = _tangent_plane(V0, comp, A)[None]
                s, _ = _kernel_scores(vv, nodes, fr, p, vol)
                return s[0]

            res = minimize(objective, np.zeros(k * (n - k)), method="Nelder-Mead",
                           options={"maxiter": 200 * k * (n - k), "xatol": 1e-7,
                                    "fatol": 1e-10, "initial_simplex": None})
            polished = _tangent_plane(V0, comp, res.x)
            s, th = _kernel_scores(vv, nodes, polished[None], p, vol)
            if s[0] < best_score:
                best_frame, best_theta, best_score = polished, float(th[0]), float(s[0])

        plane = PlaneFrame(best_frame)
        if best_score < upper:
            upper = best_score
            d_fn = (lambda pts, _V=plane, _p=p, _t=best_theta:
                    _t * (riesz_kernel(_p, np.maximum(_V.distance(pts), 1e-300))
                          if _p != 2 else np.log(np.maximum(_V.distance(pts), 1e-300))))
            best_model = HomogeneousModel(p, k, plane, best_theta, "kernel", evaluate=d_fn)
            best_plane = plane

        hvals, htheta = _homogenization_values(v, nodes, plane, p, seed)
        hscore = vol * float(np.mean(np.abs(vv - hvals)))
        meta["kernel_score"] = best_score
        meta["homogenization_score"] = hscore
        if hscore < upper:
            upper = hscore
            best_plane = plane
            best_model = HomogeneousModel(p, k, plane, htheta, "homogenization",
                                          profile={"scales": (1.0, 0.5, 0.25)})

    lower = max(0.0, min(lower_raw, upper))
    meta["lower_raw"] = lower_raw
    return HomogeneityReport(lower, upper, best_plane, best_model, meta)


# ---------------------------------------------------------------------------
# bulk defect bounds for lattice sweeps


def bulk_defect_bounds(u: ScalarField, X: np.ndarray, scales: np.ndarray,
                       count: int = 64, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Cheap (lower, zero-model upper) defect bounds for every (point, scale).

    Both arrays have shape (m, q).  The upper bound is the L1 norm of the
    flow (distance to the zero model); the lower bound is the scale-mismatch
    certificate.  Domain containment is the caller's responsibility.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    scales = np.atleast_1d(np.asarray(scales, dtype=float))
    n, p = u.n, float(u.p)
    vol = unit_ball_volume(n)
    c0, _ = _scale_mismatch_constant(n, p)
    if p > 2:
        fac = vol * scales[None, :] ** (p - 2.0)
        upper = fac * bulk_abs_mean(u, X, scales, count=count, seed=seed)
        lower = c0 * fac * bulk_abs_mean(u, X, scales, count=count, seed=seed, half_shift=True)
        return lower, upper
    # p = 2: flow is anchored at the running max
    nodes = ball_nodes(n, count, seed)
    vals = _bulk_reduce(u, X, scales, nodes, reducer=None)
    vals_half = _bulk_reduce(u, X, 0.5 * scales, nodes, reducer=None)
    m_full = bulk_spherical_max(u, X, scales, count=count, seed=seed)
    m_half = bulk_spherical_max(u, X, 0.5 * scales, count=count, seed=seed)
    upper = vol * np.mean(np.abs(vals - m_full[:, :, None]), axis=2)
    lower = c0 * vol * np.mean(
        np.abs((vals - m_full[:, :, None]) - (vals_half - m_half[:, :, None])), axis=2)
    return lower, upper


def bulk_zero_upper(u: ScalarField, X: np.ndarray, scales: np.ndarray,
                    count: int = 64, seed: int = 0) -> np.ndarray:
    """Zero-model upper bound only, shape (m, q); skips the half-scale passes
    that the lower bound needs, so it is the cheapest exclusion test."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    scales = np.atleast_1d(np.asarray(scales, dtype=float))
    n, p = u.n, float(u.p)
    vol = unit_ball_volume(n)
    if p > 2:
        fac = vol * scales[None, :] ** (p - 2.0)
        return fac * bulk_abs_mean(u, X, scales, count=count, seed=seed)
    nodes = ball_nodes(n, count, seed)
    vals = _bulk_reduce(u, X, scales, nodes, reducer=None)
    m_full = bulk_spherical_max(u, X, scales, count=count, seed=seed)
    return vol * np.mean(np.abs(vals - m_full[:, :, None]), axis=2)


def _staged_candidates(u: ScalarField, search_ball: Ball, grid_step: float,
                       prune_scale: float, prune_threshold: float,
                       count: int, seed: int) -> np.ndarray:
    """Coarse-to-fine lattice refinement keeping points that the cheap
    zero-model bound cannot exclude at the given scale."""
    from .density import _lattice

    steps = [grid_step]
    while steps[-1] * 2.0 <= 0.151:
        steps.append(steps[-1] * 2.0)
    steps = steps[::-1]
    pts = _lattice(search_ball, steps[0])
    for h_parent, h_child in zip(steps, steps[1:] + [None]):
        # coarse stages test at a scale no finer than the cell size so a thin
        # stratum inside the cell still registers at the lattice point
        stage_scale = max(prune_scale, 2.0 * h_parent)
        upper = bulk_zero_upper(u, pts, np.array([stage_scale]), count=count, seed=seed)
        keep = pts[upper[:, 0] >= prune_threshold]
        if h_child is None or keep.size == 0:
            return keep
        off_axis = np.array([-h_parent / 2.0, 0.0, h_parent / 2.0])
        grids = np.meshgrid(*([off_axis] * u.n), indexing="ij")
        offsets = np.stack([g.ravel() for g in grids], axis=1)
        children = (keep[:, None, :] + offsets[None, :, :]).reshape(-1, u.n)
        key = np.round((children - search_ball.center) / h_child).astype(np.int64)
        _, idx = np.unique(key, axis=0, return_index=True)
        children = search_ball.center + h_child * key[np.sort(idx)]
        pts = children[search_ball.contains(children)]
    return pts


def stratum_set(u: ScalarField, eta: float, r: float, k: int, search_ball: Ball,
                grid_step: float, count: int = 64, seed: int = 0,
                refine_budget: int = 16, refine_cap: int = 4000,
                tube_radii=None):
    """Approximate the quantitative stratum S^k_{eta,r} on a lattice.

    A lattice point belongs to the stratum when its (k+1)-homogeneity defect
    stays >= eta at every scale of a geometric ladder in [r, 1).  The report
    splits the lattice into certified members (lower bound >= eta at all
    scales), certified non-members (some model achieves < eta at some scale),
    and an indeterminate band; the covering statistics use the outer
    approximation members + indeterminate.
    """
    from .covering import StratumReport, tube_volume, vitali_cover

    ladder = [r]
    while ladder[-1] * 2.0 < 1.0:
        ladder.append(ladder[-1] * 2.0)
    scales = np.array(ladder)

    pts = _staged_candidates(u, search_ball, grid_step, prune_scale=r,
                             prune_threshold=0.5 * eta, count=count, seed=seed)
    n = u.n
    if pts.size == 0:
        empty = np.zeros((0, n))
        return StratumReport(points=empty, indeterminate=empty, tube_volumes={},
                             bound_ratios={}, cover_counts={},
                             metadata={"eta": eta, "r": r, "k": k, "excluded": 0})

    lower, upper = bulk_defect_bounds(u, pts, scales, count=count, seed=seed)
    is_member = np.all(lower >= eta, axis=1)
    excluded = np.any(upper < eta, axis=1)
    survivors = ~excluded

    # try to exclude survivors with fitted models at the finest scale
    idx = np.where(survivors)[0]
    if refine_budget > 0 and 0 < len(idx) <= refine_cap:
        for i in idx:
            rep = homogeneity_defect(u, pts[i], r, k + 1, search_budget=refine_budget,
                                     count=256, seed=seed)
            if rep.upper < eta:
                excluded[i] = True
                is_member[i] = False
        survivors = ~excluded

    points = pts[is_member & survivors]
    indeterminate = pts[survivors & ~is_member]
    outer = np.concatenate([points, indeterminate]) if (len(points) or len(indeterminate)) \
        else np.zeros((0, n))

    tube_volumes = {}
    cover_counts = {}
    for tr in (tube_radii if tube_radii is not None else [r]):
        if len(outer):
            tube_volumes[tr] = tube_volume(outer, tr, Ball(search_ball.center,
                                                           search_ball.radius + tr),
                                           resolution=tr / 4.0)
            centers, _ = vitali_cover(outer, tr)
            cover_counts[tr] = len(centers)
        else:
            tube_volumes[tr] = 0.0
            cover_counts[tr] = 0
    return StratumReport(points=points, indeterminate=indeterminate,
                         tube_volumes=tube_volumes, bound_ratios={},
                         cover_counts=cover_counts,
                         metadata={"eta": eta, "r": r, "k": k,
                                   "excluded": int(np.sum(excluded)),
                                   "grid_step": grid_step, "scales": scales.tolist()})


# ---------------------------------------------------------------------------
# cone splitting


@dataclass
class ConeSplittingReport:
    valid: bool
    passed: Optional[bool]
    translation_defect: Optional[float]
    precondition_defects: dict
    tolerance: float
    metadata: dict = field(default_factory=dict)


def _flow_fix_defect(h: ScalarField, x, count: int, seed: int) -> float:
    """L1(B_1) mismatch between the half- and quarter-scale flows at x;
    vanishes when h is a flow fixed point (0-homogeneous candidate)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    va = p_flow(h, x, 0.5)
    vb = p_flow(h, x, 0.25)
    nodes = ball_nodes(h.n, count, seed)
    diff = va.eval_masked(nodes) - vb.eval_masked(nodes)
    return unit_ball_volume(h.n) * float(np.mean(np.abs(diff)))


def cone_splitting_check(h: ScalarField, x1, V: PlaneFrame, x2,
                         tolerance: float = 1e-3, precheck_tol: float = 0.02,
                         count: int = 2048, seed: int = 0) -> ConeSplittingReport:
    """Check that homogeneity at x1 (along V) plus homogeneity at x2 forces
    translation invariance along the direction x2 - x1.

    The claimed preconditions are re-verified numerically first; if they fail
    the report is marked invalid-input rather than a check failure.
    """
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    pre = {}
    pre["flow_fix_x1"] = _flow_fix_defect(h, x1, count, seed)
    pre["flow_fix_x2"] = _flow_fix_defect(h, x2, count, seed)

    nodes = x1 + 0.5 * ball_nodes(h.n, count, seed)
    base = h.eval_masked(nodes)
    trans = 0.0
    for vdir in V.frame:
        d = np.mean(np.abs(h.eval_masked(nodes + 0.2 * vdir) - base))
        trans = max(trans, unit_ball_volume(h.n) * 0.5 ** h.n * float(d))
    pre["translation_x1"] = trans

    sep = x2 - x1
    if np.linalg.norm(sep) < 1e-9 or (V.k > 0 and
                                      np.linalg.norm(sep - V.project_coords(sep[None])[0] @ V.frame) < 1e-9):
        pre["x2_in_plane"] = True
        return ConeSplittingReport(False, None, None, pre, tolerance,
                                   {"reason": "x2 lies in x1 + V"})

    valid = all(v <= precheck_tol for kk, v in pre.items() if isinstance(v, float))
    if not valid:
        return ConeSplittingReport(False, None, None, pre, tolerance,
                                   {"reason": "precondition re-verification failed"})

    e = sep / np.linalg.norm(sep)
    dirs = [e] + [v for v in V.frame]
    defect = 0.0
    for d in dirs:
        for t in (0.15, 0.3):
            dd = np.mean(np.abs(h.eval_masked(nodes + t * d) - base))
            defect = max(defect, unit_ball_volume(h.n) * 0.5 ** h.n * float(dd))
    return ConeSplittingReport(True, defect <= tolerance, defect, pre, tolerance)
