"""F-energy and Grassmannian energy with their normalization and rigidity probes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InsufficientSamplingError, UnsupportedCharacteristicError
from .fields import Ball, PlaneFrame, ScalarField, available_radius, l1_norm, restrict
from .grassmann import complex_line_frames, haar_frames
from .homogeneity import homogeneity_defect
from .kernels import RadialProfile, riesz_kernel
from .means import left_quotient, spherical_max, spherical_mean
from .quadrature import sphere_nodes, unit_ball_volume


@dataclass
class GrassmannianFamily:
    """A seeded sample from a compact family of p-planes in R^n."""

    n: int
    p: int
    kind: str = "full"  # "full" | "complex-lines" | "explicit"
    sample_count: int = 16
    seed: int = 0
    planes: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind == "full":
            self.planes = haar_frames(self.p, self.n, self.sample_count, self.seed)
        elif self.kind == "complex-lines":
            if self.n % 2 or self.p != 2:
                raise InsufficientSamplingError("complex-lines family needs even n and p = 2")
            self.planes = complex_line_frames(self.n // 2, self.sample_count, self.seed)
        elif self.kind == "explicit":
            if not self.planes:
                raise InsufficientSamplingError("explicit family needs a plane list")
            self.sample_count = len(self.planes)
        else:
            raise InsufficientSamplingError(f"unknown family kind {self.kind!r}")
        for W in self.planes:
            if not isinstance(W, PlaneFrame) or W.k != self.p or W.n != self.n:
                raise InsufficientSamplingError("family contains an invalid plane")


# ---------------------------------------------------------------------------
# F-energy


def f_energy_profile(u: ScalarField, x, radii, p: float | None = None,
                     count: int = 2048, seed: int = 0) -> RadialProfile:
    """theta_F(u, x, r) = S(u,x,r)/K_p(r) + M(u,x,r)/K_p(r) at each radius."""
    p = float(u.p if p is None else p)
    if p <= 2:
        raise UnsupportedCharacteristicError(
            "F-energy needs p > 2 (K_p vanishes at r = 1 for the log normalization)")
    radii = np.sort(np.asarray(radii, dtype=float))
    vals = []
    for r in radii:
        k = riesz_kernel(p, r)
        s = spherical_mean(u, x, r, count=count, seed=seed)
        m = spherical_max(u, x, r, count=count, seed=seed)
        vals.append(s / k + m / k)
    return RadialProfile(radii, np.array(vals), meaning="theta_F",
                         metadata={"p": p, "count": count, "seed": seed})


def normalize_for_monotonicity(u: ScalarField, p: float | None = None,
                               count: int = 1024, seed: int = 0,
                               probe_step: float = 0.5) -> tuple[ScalarField, float]:
    """Shift u by the constant N that makes theta_F nondecreasing.

    N is the max over probe centers in B_1 of S(x, 1/2) - Q(x) K_p(1/2) with
    Q(x) the (1/2, 2/3) kernel-coordinate quotient, taken over both the S and
    the M statistic.  Returns (u - N, N)."""
    p = float(u.p if p is None else p)
    n = u.n
    half = int(np.floor(1.0 / probe_step))
    axis = probe_step * np.arange(-half, half + 1)
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    centers = np.stack([g.ravel() for g in grids], axis=1)
    centers = centers[np.linalg.norm(centers, axis=1) <= 1.0 + 1e-9]
    k_half, k_23 = riesz_kernel(p, 0.5), riesz_kernel(p, 2.0 / 3.0)
    N = -math.inf
    for x in centers:
        if available_radius(u, x) <= 2.0 / 3.0:
            continue
        for fn in (spherical_mean, spherical_max):
            f_half = fn(u, x, 0.5, count=count, seed=seed)
            f_23 = fn(u, x, 2.0 / 3.0, count=count, seed=seed)
            q = (f_23 - f_half) / (k_23 - k_half)
            N = max(N, f_half - q * k_half)
    return u.shifted(N), float(N)


@dataclass
class FRigidityReport:
    drops: list  # (delta, theta_F(1/2) - theta_F(delta)) pairs
    defect_upper: float
    metadata: dict = field(default_factory=dict)


def f_rigidity_probe(u: ScalarField, x, delta_grid, count: int = 2048,
                     seed: int = 0) -> FRigidityReport:
    """Report the F-energy drop over [delta, 1/2] next to the homogeneity
    defect at scale 1, exposing the drop <-> defect correlation."""
    deltas = np.sort(np.asarray(delta_grid, dtype=float))
    prof = f_energy_profile(u, x, np.concatenate([deltas, [0.5]]), count=count, seed=seed)
    top = prof.values[-1]
    drops = [(float(d), float(top - v)) for d, v in zip(prof.radii[:-1], prof.values[:-1])]
    rep = homogeneity_defect(u, x, 1.0, k=0, search_budget=32, count=count, seed=seed)
    return FRigidityReport(drops=drops, defect_upper=rep.upper,
                           metadata={"defect_lower": rep.lower, "seed": seed})


# ---------------------------------------------------------------------------
# Grassmannian energy


@dataclass
class GEnergyEstimate:
    value: float
    mc_stderr: float
    terms: dict
    metadata: dict = field(default_factory=dict)


def g_energy(u: ScalarField, x, r: float, family: GrassmannianFamily,
             count: int = 512, seed: int = 0) -> GEnergyEstimate:
    """theta_G(u, x, r): Monte-Carlo average over the family of the restricted
    left S- and M-quotients, plus the ambient left M-quotient."""
    if family.sample_count < 8 and family.kind != "explicit":
        raise InsufficientSamplingError("Grassmannian family needs at least 8 samples")
    if len(family.planes) < 1:
        raise InsufficientSamplingError("empty Grassmannian family")
    p = float(u.p)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s_terms, m_terms = [], []
    for W in family.planes:
        v = restrict(u, W, x)
        s_terms.append(left_quotient(v, np.zeros(W.k), r, p, which="S", count=count, seed=seed))
        m_terms.append(left_quotient(v, np.zeros(W.k), r, p, which="M", count=count, seed=seed))
    amb = left_quotient(u, x, r, p, which="M", count=count, seed=seed)
    s_arr, m_arr = np.array(s_terms), np.array(m_terms)
    per_plane = s_arr + m_arr
    B = len(per_plane)
    stderr = float(np.std(per_plane, ddof=1) / math.sqrt(B)) if B > 1 else 0.0
    return GEnergyEstimate(
        value=float(np.mean(s_arr) + np.mean(m_arr) + amb),
        mc_stderr=stderr,
        terms={"restricted_S": float(np.mean(s_arr)), "restricted_M": float(np.mean(m_arr)),
               "ambient_M": float(amb)},
        metadata={"r": float(r), "count": count, "seed": seed,
                  "sample_count": len(family.planes)},
    )


def g_energy_profile(u: ScalarField, x, radii, family: GrassmannianFamily,
                     count: int = 512, seed: int = 0) -> RadialProfile:
    radii = np.sort(np.asarray(radii, dtype=float))
    ests = [g_energy(u, x, r, family, count=count, seed=seed) for r in radii]
    return RadialProfile(radii, np.array([e.value for e in ests]), meaning="theta_G",
                         metadata={"mc_stderr": [e.mc_stderr for e in ests],
                                   "count": count, "seed": seed})


def _annulus_l1(u: ScalarField, x, a: float, b: float, count: int = 2048,
                seed: int = 0, shells: int = 16) -> float:
    """Quadrature of |u| over the annulus a <= |y - x| <= b."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = u.n
    total = 0.0
    vol = unit_ball_volume(n) * (b ** n - a ** n)
    for j in range(shells):
        t = (a ** n + (j + 0.5) / shells * (b ** n - a ** n)) ** (1.0 / n)
        nodes = sphere_nodes(n, max(2, count // shells), seed + 313 * j)
        total += np.mean(np.abs(u.eval_masked(x + t * nodes)))
    return vol * total / shells


@dataclass
class GBoundReport:
    theta_ratio: float
    annulus_ratio: float
    l1_norm: float
    metadata: dict = field(default_factory=dict)


def g_energy_bound_check(u: ScalarField, lam: float, family: GrassmannianFamily,
                         probe_centers=None, a: float = 1.0 / 3.0, b: float = 1.0,
                         count: int = 512, seed: int = 0) -> GBoundReport:
    """Finiteness ratios: max theta_G(x, 1/2)/lam over probe centers, and the
    family-averaged annulus restriction ratio."""
    norm = l1_norm(u, Ball(u.domain.center, min(2.0, u.domain.radius * 0.95)),
                   count=2048, seed=seed)
    centers = probe_centers if probe_centers is not None else [np.zeros(u.n)]
    theta_ratio = max(g_energy(u, x, 0.5, family, count=count, seed=seed).value / lam
                      for x in centers)
    ambient = _annulus_l1(u, np.zeros(u.n), a, b, count=2048, seed=seed)
    restricted = float(np.mean([
        _annulus_l1(restrict(u, W, np.zeros(u.n)), np.zeros(W.k), a, b,
                    count=count, seed=seed)
        for W in family.planes]))
    return GBoundReport(theta_ratio=float(theta_ratio),
                        annulus_ratio=restricted / ambient if ambient > 0 else 0.0,
                        l1_norm=norm,
                        metadata={"lam": lam, "a": a, "b": b, "l1_within_budget": norm <= lam,
                                  "seed": seed})


@dataclass
class GRigidityReport:
    drop: float
    defect_upper: float
    growth_flag: bool
    max_anchor_flag: bool
    metadata: dict = field(default_factory=dict)


def g_rigidity_probe(u: ScalarField, x, delta0: float, family: GrassmannianFamily,
                     count: int = 512, seed: int = 0) -> GRigidityReport:
    """Energy drop over [delta0, min(1/delta0, R)] next to the homogeneity
    defect at scale ~1; flags the growth hypothesis if violated."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p, n = float(u.p), u.n
    rho = available_radius(u, x)
    rtop = min(1.0 / delta0, 0.9 * rho, 0.5)
    e_top = g_energy(u, x, rtop, family, count=count, seed=seed)
    e_lo = g_energy(u, x, delta0, family, count=count, seed=seed)

    def growth_bound(r):
        if p > 2:
            return r ** (n - p + 2.0)
        return r ** n * (abs(math.log(r)) + 1.0)

    lam_fit = l1_norm(u, Ball(x, rtop), count=1024, seed=seed) / growth_bound(rtop)
    growth_flag = False
    for r in (rtop / 2.0, rtop / 4.0):
        if l1_norm(u, Ball(x, r), count=1024, seed=seed) > 1.3 * lam_fit * growth_bound(r) + 1e-9:
            growth_flag = True
    max_flag = False
    if p == 2 and rho > 1.0:
        max_flag = abs(spherical_max(u, x, 1.0, count=1024, seed=seed)) > 0.05
    rep = homogeneity_defect(u, x, min(1.0, 0.9 * rho), k=0, search_budget=32,
                             count=1024, seed=seed)
    return GRigidityReport(drop=float(e_top.value - e_lo.value), defect_upper=rep.upper,
                           growth_flag=growth_flag, max_anchor_flag=max_flag,
                           metadata={"rtop": rtop, "delta0": delta0,
                                     "defect_lower": rep.lower,
                                     "mc_stderr": (e_top.mc_stderr, e_lo.mc_stderr)})
