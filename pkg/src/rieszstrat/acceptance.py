"""Acceptance battery: one function per criterion, shared by `rieszstrat verify`
and the test suite.

Each criterion function returns a dict with keys ``id``, ``name``, ``passed``,
and ``details``; ``run_battery`` runs a selection and reports one line per
criterion.  All randomness is seeded so the battery is deterministic.
"""

from __future__ import annotations

import json
import time

import numpy as np

from .covering import decomposition_cover, minkowski_bound_check, vitali_cover
from .density import density, high_density_set
from .energy import (GrassmannianFamily, f_energy_profile, g_energy,
                     g_energy_bound_check, g_energy_profile,
                     normalize_for_monotonicity)
from .examples import (grid_sample, harmonic_plus_kernel, log_modulus,
                       plane_kernel, riesz_sum)
from .fields import Ball, PlaneFrame, available_radius, p_flow, span
from .homogeneity import (_scale_mismatch_constant, cone_splitting_check,
                          homogeneity_defect, stratum_set)
from .kernels import kp_convexity_defect, riesz_kernel, riesz_kernel_derivative
from .means import profile
from .quadrature import unit_ball_volume

_DENSITY_LADDER = (0.00625, 0.0125, 0.025, 0.05)


def _kernel_pair(n: int = 3, p: float = 3.0):
    centers = np.zeros((2, n))
    centers[0, 0], centers[1, 0] = 0.3, -0.3
    return riesz_sum(centers, [1.0, 1.5], p=p, n=n)


def criterion_1(seed: int = 0) -> dict:
    """Radial harmonicity of the kernels: K_p'' + (p-1)/t K_p' = 0."""
    h = 1e-3
    radii = np.linspace(0.5, 2.0, 20)
    worst = 0.0
    for p in (2.0, 3.0, 4.0):
        second = (-riesz_kernel(p, radii + 2 * h) + 16.0 * riesz_kernel(p, radii + h)
                  - 30.0 * riesz_kernel(p, radii) + 16.0 * riesz_kernel(p, radii - h)
                  - riesz_kernel(p, radii - 2 * h)) / (12.0 * h ** 2)
        residual = second + (p - 1.0) / radii * riesz_kernel_derivative(p, radii)
        worst = max(worst, float(np.max(np.abs(residual))))
    return {"id": 1, "name": "kernel radial harmonicity",
            "passed": worst <= 1e-6, "details": {"worst_residual": worst}}


def criterion_2(seed: int = 0) -> dict:
    """Density calibration on pure kernels and smallness at smooth points."""
    worst_rel, worst_smooth = 0.0, 0.0
    for p, n in ((2, 3), (2, 4), (3, 3), (3, 4), (4, 4)):
        for theta in (0.5, 1.0, 2.0):
            u = riesz_sum([np.zeros(n)], [theta], p=p, n=n)
            est = density(u, np.zeros(n), ladder=_DENSITY_LADDER, seed=seed)
            worst_rel = max(worst_rel, abs(est.theta_S - theta) / theta)
            x = np.zeros(n)
            x[0] = 1.0
            sm = density(u, x, ladder=_DENSITY_LADDER, seed=seed)
            worst_smooth = max(worst_smooth, sm.theta_S)
    passed = worst_rel <= 0.02 and worst_smooth <= 0.02
    return {"id": 2, "name": "density calibration",
            "passed": passed,
            "details": {"worst_relative_error": worst_rel,
                        "worst_smooth_density": worst_smooth}}


def criterion_3(seed: int = 0) -> dict:
    """Convexity of S-profiles in the kernel coordinate for every constructor."""
    rng = np.random.default_rng(11 + seed)
    base = _kernel_pair()
    lm = log_modulus({(1, 0): 1.0, (0, 1): -0.5, (0, 0): 0.2}, m=2)

    def _variety_distance(pts):
        # P is affine-linear, so the zero variety is a complex line with an
        # exact distance formula |P(z)| / |grad P|
        pts = np.atleast_2d(pts)
        z1 = pts[:, 0] + 1j * pts[:, 1]
        z2 = pts[:, 2] + 1j * pts[:, 3]
        return np.abs(z1 - 0.5 * z2 + 0.2) / np.sqrt(1.25)

    lm.singular_distance = _variety_distance
    fields = {
        "riesz_sum": (base, np.geomspace(0.1, 0.5, 6), 0.7, 0.8),
        "plane_kernel": (plane_kernel(span([0.0, 0.0, 0.0, 1.0]), p=3.0),
                         np.geomspace(0.1, 0.5, 6), 0.7, 0.8),
        "log_modulus": (lm, np.geomspace(0.1, 0.5, 6), 0.7, 0.8),
        "harmonic_plus_kernel": (harmonic_plus_kernel({(2, 0, 0): 0.5, (0, 2, 0): -0.5},
                                                      np.zeros(3), 1.0, p=3, n=3),
                                 np.geomspace(0.1, 0.5, 6), 0.7, 0.8),
        "grid_sample": (grid_sample(base, 120, Ball(np.zeros(3), 1.6)),
                        np.geomspace(0.15, 0.5, 5), 0.8, 1.05),
    }
    defects = {}
    for name, (u, radii, clear, box) in fields.items():
        worst, found = 0.0, 0
        while found < 5:
            x = rng.uniform(-box, box, u.n)
            if u.singular_distance is not None and \
                    u.singular_distance(x[None])[0] < clear:
                continue
            if available_radius(u, x) < radii[-1] + 0.05:
                continue
            found += 1
            prof = profile(u, x, radii, "S", count=4096, seed=seed)
            worst = max(worst, kp_convexity_defect(prof, u.p))
        defects[name] = worst
    return {"id": 3, "name": "kernel-coordinate convexity of S-profiles",
            "passed": all(d <= 1e-3 for d in defects.values()),
            "details": {"defects": defects}}


def criterion_4(seed: int = 0) -> dict:
    """F-energy monotone after constant normalization, 9 probe centers."""
    u, _ = normalize_for_monotonicity(_kernel_pair(), count=1024, seed=seed)
    radii = np.geomspace(0.1, 0.5, 6)
    worst = 0.0
    for a in (-0.25, 0.0, 0.25):
        for b in (-0.25, 0.0, 0.25):
            prof = f_energy_profile(u, np.array([a, b, 0.0]), radii,
                                    count=2048, seed=seed)
            worst = min(worst, float(np.min(np.diff(prof.values))))
    return {"id": 4, "name": "F-energy monotonicity",
            "passed": worst >= -2e-3, "details": {"worst_decrease": -worst}}


def criterion_5(seed: int = 0) -> dict:
    """Grassmannian energy: monotone profiles, exact linear scaling, and
    seed-stable finiteness ratios."""
    n = 4
    family = GrassmannianFamily(n, 3, kind="full", sample_count=16, seed=seed)
    radii = np.geomspace(0.1, 0.5, 5)
    details: dict = {}
    ok = True

    fields = {"single_kernel": riesz_sum([np.zeros(n)], [1.2], p=3, n=n),
              "kernel_pair": _kernel_pair(n=n)}
    for name, u in fields.items():
        prof = g_energy_profile(u, np.zeros(n), radii, family, count=512, seed=seed)
        err = np.array(prof.metadata["mc_stderr"])
        tol = 3.0 * (err[:-1] + err[1:]) + 1e-9
        worst = float(np.min(np.diff(prof.values) + tol))
        details[f"monotone_margin_{name}"] = worst
        ok = ok and worst >= 0.0

    u = fields["single_kernel"]
    e1 = g_energy(u, np.zeros(n), 0.5, family, count=512, seed=seed)
    e2 = g_energy(u.scaled(2.0), np.zeros(n), 0.5, family, count=512, seed=seed)
    scaling_err = abs(e2.value - 2.0 * e1.value)
    details["scaling_error"] = scaling_err
    ok = ok and scaling_err <= 1e-10

    ratios = []
    for s in (seed, seed + 1):
        fam = GrassmannianFamily(n, 3, kind="full", sample_count=16, seed=s)
        rep = g_energy_bound_check(u, lam=5.0, family=fam, count=512, seed=s)
        ratios.append((rep.theta_ratio, rep.annulus_ratio))
    stable = all(np.isfinite(np.array(ratios)).ravel())
    for i in range(2):
        a, b = ratios[0][i], ratios[1][i]
        stable = stable and abs(a - b) <= 0.1 * max(abs(a), abs(b), 1e-12)
    details["ratios"] = ratios
    ok = ok and stable
    return {"id": 5, "name": "Grassmannian energy properties",
            "passed": ok, "details": details}


def criterion_6(seed: int = 0) -> dict:
    """Component counting of the high-density set for kernel sums."""
    rng = np.random.default_rng(7 + seed)
    counts = {}
    for m in (1, 3, 5):
        while True:
            centers = rng.uniform(-0.6, 0.6, size=(m, 3))
            d = np.linalg.norm(centers[:, None] - centers[None, :], axis=2)
            if not ((d < 0.4) & ~np.eye(m, dtype=bool)).any():
                break
        weights = rng.uniform(1.0, 2.0, m)
        u = riesz_sum(centers, weights, p=3, n=3)
        E = high_density_set(u, 0.9, Ball(np.zeros(3), 1.0), 0.02, seed=seed)
        counts[m] = E.count
    return {"id": 6, "name": "high-density component counting",
            "passed": all(counts[m] == m for m in counts),
            "details": {"components": counts}}


def criterion_7(seed: int = 0) -> dict:
    """Tube-volume slope and bounded packing ratio for the plane kernel."""
    u = plane_kernel(span([0.0, 0.0, 0.0, 1.0]), p=3.0)
    rep = minkowski_bound_check(u, eta=1.0, r_grid=[0.02, 0.05, 0.1, 0.2],
                                grid_step=0.02, count=256, seed=seed)
    slope = rep.metadata["slope"]
    ratios = np.array(list(rep.bound_ratios.values()))
    passed = (abs(slope - 3.0) <= 0.3 and np.all(np.isfinite(ratios))
              and float(np.max(ratios)) <= 16.0
              and float(np.max(ratios) / np.min(ratios)) <= 1.5)
    return {"id": 7, "name": "tube-volume bound for the top stratum",
            "passed": bool(passed),
            "details": {"slope": slope, "ratios": ratios.tolist(),
                        "components": rep.metadata["components"]}}


def criterion_8(seed: int = 0) -> dict:
    """Tube-volume scaling of the quantitative stratum."""
    cases = {
        "plane_k1": (plane_kernel(span([0.0, 0.0, 0.0, 1.0]), p=3.0), 1, 2.0),
        "point_k0": (riesz_sum([np.zeros(3)], [1.0], p=3, n=3), 0, 2.0),
    }
    details, ok = {}, True
    for name, (u, k, eta) in cases.items():
        rs = (0.1, 0.15, 0.2)
        vols = []
        for r in rs:
            rep = stratum_set(u, eta=eta, r=r, k=k,
                              search_ball=Ball(np.zeros(u.n), 1.0),
                              grid_step=r / 2.0, count=64, seed=seed, tube_radii=[r])
            vols.append(rep.tube_volumes[r])
        vols = np.array(vols)
        if np.all(vols > 0):
            slope = float(np.polyfit(np.log(rs), np.log(vols), 1)[0])
        else:
            slope = float("nan")
        bound = u.n - k - eta - 0.3
        details[name] = {"slope": slope, "bound": bound, "volumes": vols.tolist()}
        ok = ok and np.isfinite(slope) and slope >= bound
    return {"id": 8, "name": "stratum tube-volume scaling",
            "passed": bool(ok), "details": details}


def criterion_9(seed: int = 0) -> dict:
    """Cone splitting: translation invariance from two homogeneity points, and
    invalid-input detection when a precondition fails."""
    u = plane_kernel(span([0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]), p=2.0)
    V = span([0.0, 0.0, 0.0, 1.0])
    good = cone_splitting_check(u, np.zeros(4), V, np.array([0.0, 0.0, 0.4, 0.0]),
                                count=2048, seed=seed)
    bad = cone_splitting_check(u, np.zeros(4), V, np.array([0.4, 0.0, 0.0, 0.0]),
                               count=2048, seed=seed)
    passed = (good.valid and bool(good.passed)
              and good.translation_defect <= 1e-3 and not bad.valid)
    return {"id": 9, "name": "cone splitting",
            "passed": bool(passed),
            "details": {"translation_defect": good.translation_defect,
                        "counterexample_valid": bad.valid,
                        "counterexample_prechecks": bad.precondition_defects}}


def criterion_10(seed: int = 0) -> dict:
    """Vitali selection: exact disjointness and 5r-coverage on random sets."""
    rng = np.random.default_rng(23 + seed)
    worst_gap, worst_cover = np.inf, 0.0
    for _ in range(100):
        n = int(rng.integers(2, 4))
        m = int(rng.integers(5, 51))
        pts = rng.uniform(-1.0, 1.0, size=(m, n))
        r = float(rng.uniform(0.05, 0.3))
        selected, cover_r = vitali_cover(pts, r)
        if len(selected) > 1:
            d = np.linalg.norm(selected[:, None] - selected[None, :], axis=2)
            worst_gap = min(worst_gap, float(np.min(d[~np.eye(len(selected), dtype=bool)]) / r))
        dmin = np.min(np.linalg.norm(pts[:, None] - selected[None, :], axis=2), axis=1)
        worst_cover = max(worst_cover, float(np.max(dmin) / r))
        if worst_gap < 2.0 or worst_cover > 5.0 or cover_r != 5.0 * r:
            break
    passed = worst_gap >= 2.0 and worst_cover <= 5.0
    return {"id": 10, "name": "Vitali covering combinatorics",
            "passed": bool(passed),
            "details": {"min_gap_over_r": worst_gap, "max_cover_over_r": worst_cover}}


def criterion_11(seed: int = 0) -> dict:
    """Per-scale covering counts grow no faster than the allowed log-slope."""
    u = plane_kernel(span([0.0, 0.0, 1.0]), p=2.0)
    k, eta = 1, 4.0
    details, ok = {}, True
    for gamma, j_max in ((0.25, 5), (0.125, 3)):
        trace = decomposition_cover(u, eta=eta, gamma=gamma, j_max=j_max, k=k,
                                    eps=0.5, search_ball=Ball(np.zeros(3), 1.0),
                                    seed=seed)
        counts = np.array(trace.counts, dtype=float)
        js = np.arange(len(counts))
        pos = counts > 0
        slope = float(np.polyfit(js[pos], np.log(counts[pos]), 1)[0] / -np.log(gamma)) \
            if pos.sum() > 1 else float("nan")
        bound = k + eta + 0.3
        details[f"gamma_{gamma}"] = {"counts": trace.counts, "slope": slope,
                                     "bound": bound,
                                     "tuple_histogram": trace.tuple_histogram}
        ok = ok and np.isfinite(slope) and slope <= bound
    return {"id": 11, "name": "decomposition covering growth",
            "passed": bool(ok), "details": details}


def criterion_12(seed: int = 0) -> dict:
    """Homogeneity defect sandwich: ordering, exactness, and oracle agreement."""
    details: dict = {}
    fields = [_kernel_pair(),
              plane_kernel(span([0.0, 0.0, 0.0, 1.0]), p=3.0),
              harmonic_plus_kernel({(2, 0, 0): 0.5, (0, 2, 0): -0.5},
                                   np.zeros(3), 1.0, p=3, n=3),
              log_modulus({(1, 0): 1.0, (0, 1): -0.5, (0, 0): 0.2}, m=2)]
    rng = np.random.default_rng(5 + seed)
    violations = 0
    for i in range(200):
        u = fields[i % len(fields)]
        x = rng.uniform(-0.5, 0.5, u.n)
        r = float(rng.choice([0.25, 0.5]))
        kk = int(rng.integers(0, 2))
        rep = homogeneity_defect(u, x, r, kk, search_budget=8, count=256,
                                 seed=seed, polish=False)
        if rep.lower > rep.upper + 1e-9:
            violations += 1
    details["ordering_violations"] = violations

    worst_exact = 0.0
    u = plane_kernel(span([0.0, 0.0, 0.0, 1.0]), p=3.0)
    for t in (-0.4, 0.0, 0.3):
        rep = homogeneity_defect(u, np.array([0.0, 0.0, 0.0, t]), 0.5, 1,
                                 search_budget=64, count=1024, seed=seed)
        worst_exact = max(worst_exact, rep.upper)
    v = riesz_sum([np.zeros(3)], [1.0], p=3, n=3)
    rep0 = homogeneity_defect(v, np.zeros(3), 0.5, 0, search_budget=16,
                              count=1024, seed=seed)
    worst_exact = max(worst_exact, rep0.upper)
    details["worst_exact_upper"] = worst_exact

    w = harmonic_plus_kernel({(2, 0, 0): 1.0, (0, 2, 0): -1.0}, np.zeros(3),
                             1.0, p=3, n=3)
    rep = homogeneity_defect(w, np.zeros(3), 0.5, 0, search_budget=16,
                             count=1024, seed=seed)
    c0, _ = _scale_mismatch_constant(3, 3.0)
    va, vb = p_flow(w, np.zeros(3), 0.5), p_flow(w, np.zeros(3), 0.25)
    g = np.random.default_rng(99 + seed)
    pts = g.standard_normal((20000, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    pts *= g.uniform(0.0, 1.0, (20000, 1)) ** (1.0 / 3.0)
    oracle = c0 * unit_ball_volume(3) * float(np.mean(np.abs(
        va.eval_masked(pts) - vb.eval_masked(pts))))
    rel = abs(rep.metadata["lower_raw"] - oracle) / oracle
    details["perturbed_lower"] = rep.lower
    details["oracle"] = oracle
    details["oracle_relative_error"] = rel

    passed = (violations == 0 and worst_exact <= 1e-3
              and rep.lower > 0 and rel <= 0.2)
    return {"id": 12, "name": "homogeneity defect sandwich",
            "passed": bool(passed), "details": details}


def criterion_13(seed: int = 0) -> dict:
    """Determinism: representative reports are byte-identical across reruns."""
    from . import cli

    configs = [
        ("density", {"field": {"name": "riesz_sum", "centers": "0,0,0", "weights": "1.5",
                               "p": "3", "n": "3"},
                     "analysis": {}, "quadrature": {"count": "512", "seed": str(seed)},
                     "output": {}}),
        ("count", {"field": {"name": "riesz_sum", "centers": "0.2,0,0;-0.3,0.1,0",
                             "weights": "1,2", "p": "3", "n": "3"},
                   "analysis": {"c": "0.9", "grid_step": "0.05"},
                   "quadrature": {"count": "256", "seed": str(seed)}, "output": {}}),
        ("cover", {"field": {"name": "plane_kernel", "plane": "0,0,1", "p": "2"},
                   "analysis": {"eta": "4", "gamma": "0.25", "j_max": "2", "k": "1",
                                "eps": "0.5"},
                   "quadrature": {"count": "64", "seed": str(seed)}, "output": {}}),
    ]
    handlers = {"density": cli.cmd_density, "count": cli.cmd_count, "cover": cli.cmd_cover}
    mismatches = []
    for command, cfg in configs:
        first = cli.render_report(command, cfg, handlers[command](cfg))
        second = cli.render_report(command, cfg, handlers[command](cfg))
        if first.encode() != second.encode():
            mismatches.append(command)
    battery_a = json.dumps(run_battery(seed=seed, criteria=[1, 2, 10]), sort_keys=True)
    battery_b = json.dumps(run_battery(seed=seed, criteria=[1, 2, 10]), sort_keys=True)
    if battery_a != battery_b:
        mismatches.append("verify-subset")
    return {"id": 13, "name": "report determinism",
            "passed": not mismatches, "details": {"mismatches": mismatches}}


CRITERIA = {i: fn for i, fn in enumerate(
    (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
     criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
     criterion_11, criterion_12, criterion_13), start=1)}


def run_battery(seed: int = 0, criteria=None, log=None) -> list:
    """Run the selected criteria (all by default) and return their reports."""
    ids = sorted(criteria) if criteria else sorted(CRITERIA)
    results = []
    for i in ids:
        t0 = time.perf_counter()
        res = CRITERIA[i](seed=seed)
        results.append(res)
        if log:
            verdict = "PASS" if res["passed"] else "FAIL"
            # timing stays out of the report so reruns are byte-identical
            log(f"criterion {i:2d}: {verdict} — {res['name']} "
                f"({time.perf_counter() - t0:.1f}s)")
    return results
