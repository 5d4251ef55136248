"""Scalar fields on balls: evaluation, tangential flows, restriction, L1 distances.

A ScalarField wraps a vectorized evaluator on a ball in R^n together with the
Riesz characteristic p that governs its rescalings.  Fields may optionally
declare a singular locus through a distance function; quadrature nodes that
land too close to the locus are nudged off it deterministically.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, ScaleError
from .quadrature import ball_nodes, unit_ball_volume

_MASK_RADIUS = 1e-6
_JITTER = 3e-6
# generic direction used to nudge samples off declared singular loci
_GENERIC = np.sqrt(np.array([2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0]))


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.atleast_1d(np.asarray(self.center, dtype=float)))
        if self.radius <= 0:
            raise DomainError("ball radius must be positive")

    @property
    def n(self) -> int:
        return self.center.size

    def contains(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        pts = np.atleast_2d(points)
        return np.linalg.norm(pts - self.center, axis=1) <= self.radius + tol

    def volume(self) -> float:
        return unit_ball_volume(self.n) * self.radius ** self.n


@dataclass(frozen=True)
class PlaneFrame:
    """A k-dimensional linear subspace of R^n as k orthonormal row vectors."""

    frame: np.ndarray

    def __post_init__(self):
        fr = np.asarray(self.frame, dtype=float)
        if fr.ndim != 2:
            raise DomainError("frame must be a (k, n) array")
        if fr.shape[0] > 0:
            gram = fr @ fr.T
            if not np.allclose(gram, np.eye(fr.shape[0]), atol=1e-10):
                raise DomainError("frame vectors must be orthonormal")
        fr = fr.copy()
        fr.setflags(write=False)
        object.__setattr__(self, "frame", fr)

    @property
    def n(self) -> int:
        return self.frame.shape[1]

    @property
    def k(self) -> int:
        return self.frame.shape[0]

    def project_coords(self, points: np.ndarray) -> np.ndarray:
        """Coordinates of the orthogonal projections, shape (m, k)."""
        return np.atleast_2d(points) @ self.frame.T

    def embed(self, coords: np.ndarray) -> np.ndarray:
        coords = np.atleast_2d(coords)
        if self.k == 0:
            return np.zeros((coords.shape[0], self.n))
        return coords @ self.frame

    def distance(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        if self.k == 0:
            return np.linalg.norm(pts, axis=1)
        sq = np.sum(pts * pts, axis=1) - np.sum(self.project_coords(pts) ** 2, axis=1)
        return np.sqrt(np.maximum(sq, 0.0))

    def complement(self) -> "PlaneFrame":
        """An orthonormal frame of the orthogonal complement."""
        if self.k == 0:
            return PlaneFrame(np.eye(self.n))
        if self.k == self.n:
            return PlaneFrame(np.zeros((0, self.n)))
        # null space of the frame rows
        _, _, vt = np.linalg.svd(self.frame, full_matrices=True)
        return PlaneFrame(vt[self.k:])

    def principal_angles(self, other: "PlaneFrame") -> np.ndarray:
        if self.k == 0 or other.k == 0:
            return np.zeros(0)
        s = np.linalg.svd(self.frame @ other.frame.T, compute_uv=False)
        return np.arccos(np.clip(s, -1.0, 1.0))


def span(*vectors) -> PlaneFrame:
    """Orthonormalized PlaneFrame spanned by the given vectors."""
    arr = np.atleast_2d(np.asarray(vectors, dtype=float))
    q, r = np.linalg.qr(arr.T)
    keep = np.abs(np.diag(r)) > 1e-12
    return PlaneFrame(q.T[keep])


@dataclass
class ScalarField:
    """A real-valued function on a ball in R^n."""

    n: int
    domain: Ball
    p: float
    evaluator: Callable[[np.ndarray], np.ndarray]
    singular_distance: Optional[Callable[[np.ndarray], np.ndarray]] = None
    label: str = "field"
    grid_meta: dict = field(default_factory=dict)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.asarray(self.evaluator(pts), dtype=float)

    def eval_masked(self, points: np.ndarray) -> np.ndarray:
        """Evaluate with samples near the declared singular locus nudged off it."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.singular_distance is not None:
            d = self.singular_distance(pts)
            close = d < _MASK_RADIUS
            if np.any(close):
                pts = pts.copy()
                pts[close] += _JITTER * _GENERIC[: self.n] / np.linalg.norm(_GENERIC[: self.n])
        return np.asarray(self.evaluator(pts), dtype=float)

    def shifted(self, constant: float) -> "ScalarField":
        """The field u - constant."""
        base = self.evaluator
        return replace(
            self,
            evaluator=lambda pts, _b=base, _c=constant: _b(pts) - _c,
            label=f"{self.label}-shifted",
        )

    def scaled(self, factor: float) -> "ScalarField":
        base = self.evaluator
        return replace(
            self,
            evaluator=lambda pts, _b=base, _a=factor: _a * _b(pts),
            label=f"{self.label}-scaled",
        )


def zero_field(n: int, p: float = 3.0, radius: float = 2.0) -> ScalarField:
    return ScalarField(
        n=n,
        domain=Ball(np.zeros(n), radius),
        p=p,
        evaluator=lambda pts: np.zeros(len(np.atleast_2d(pts))),
        label="zero",
    )


def evaluate(u: ScalarField, x) -> float:
    """Value of u at a single point of its domain."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not u.domain.contains(x[None, :])[0]:
        raise DomainError(f"point {x} outside field domain")
    return float(u(x[None, :])[0])


def available_radius(u: ScalarField, x) -> float:
    """Radius of the largest ball around x inside the domain of u."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return u.domain.radius - float(np.linalg.norm(x - u.domain.center))


def p_flow(u: ScalarField, x, r: float) -> ScalarField:
    """The tangential p-flow u_{x,r}, defined on the ball of radius rho/r.

    p > 2:      r^(p-2) * u(x + r y)
    p == 2:     u(x + r y) - M(u, x, r)
    1 <= p < 2: (u(x + r y) - u(x)) / r^(2-p)
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    rho = available_radius(u, x)
    if r <= 0 or r >= rho:
        raise ScaleError(f"flow radius {r} incompatible with available radius {rho}")
    p = u.p
    base = u.evaluator

    if p > 2:
        fac = r ** (p - 2.0)

        def ev(pts, _b=base, _x=x, _r=r, _f=fac):
            return _f * _b(_x + _r * np.atleast_2d(pts))

    elif p == 2:
        from .means import spherical_max

        m = spherical_max(u, x, r)

        def ev(pts, _b=base, _x=x, _r=r, _m=m):
            return _b(_x + _r * np.atleast_2d(pts)) - _m

    else:
        u0 = float(base(x[None, :])[0])
        fac = r ** (2.0 - p)

        def ev(pts, _b=base, _x=x, _r=r, _u0=u0, _f=fac):
            return (_b(_x + _r * np.atleast_2d(pts)) - _u0) / _f

    sd = None
    if u.singular_distance is not None:
        usd = u.singular_distance

        def sd(pts, _s=usd, _x=x, _r=r):
            return _s(_x + _r * np.atleast_2d(pts)) / _r

    return ScalarField(
        n=u.n,
        domain=Ball(np.zeros(u.n), rho / r),
        p=p,
        evaluator=ev,
        singular_distance=sd,
        label=f"{u.label}-flow",
    )


def restrict(u: ScalarField, W: PlaneFrame, x) -> ScalarField:
    """The restriction v(t) = u(x + W t) on the largest centered ball."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    rho = available_radius(u, x)
    if rho <= 0:
        raise DomainError("restriction center outside domain")
    base = u.evaluator

    def ev(ts, _b=base, _x=x, _W=W):
        return _b(_x + _W.embed(np.atleast_2d(ts)))

    sd = None
    if u.singular_distance is not None:
        usd = u.singular_distance

        def sd(ts, _s=usd, _x=x, _W=W):
            return _s(_x + _W.embed(np.atleast_2d(ts)))

    return ScalarField(
        n=W.k,
        domain=Ball(np.zeros(W.k), rho),
        p=u.p,
        evaluator=ev,
        singular_distance=sd,
        label=f"{u.label}-restricted",
    )


def l1_distance(u: ScalarField, v: ScalarField, ball: Ball, count: int = 2048, seed: int = 0) -> float:
    """Quadrature estimate of the integral of |u - v| over the ball."""
    if ball.radius <= 0:
        raise DomainError("empty ball")
    nodes = ball.center + ball.radius * ball_nodes(ball.n, count, seed)
    diff = np.abs(u.eval_masked(nodes) - v.eval_masked(nodes))
    return float(ball.volume() * np.mean(diff))


def l1_norm(u: ScalarField, ball: Ball, count: int = 2048, seed: int = 0) -> float:
    nodes = ball.center + ball.radius * ball_nodes(ball.n, count, seed)
    return float(ball.volume() * np.mean(np.abs(u.eval_masked(nodes))))


# ---------------------------------------------------------------------------
# grid backing


def from_grid(values: np.ndarray, center, h: float, p: float,
              singular_distance=None, label: str = "grid") -> ScalarField:
    """Grid-backed field: multilinear interpolation of a symmetric lattice of samples.

    values has shape (m, ..., m) with m odd; sample i (multi-index) sits at
    center + h * (i - (m-1)/2).  Queries are clipped to the lattice hull.
    """
    from scipy.interpolate import RegularGridInterpolator

    values = np.asarray(values, dtype=float)
    n = values.ndim
    m = values.shape[0]
    center = np.atleast_1d(np.asarray(center, dtype=float))
    half = (m - 1) / 2.0
    axes = [center[i] + h * (np.arange(m) - half) for i in range(n)]
    interp = RegularGridInterpolator(axes, values, method="linear", bounds_error=False)
    lo = np.array([a[0] for a in axes])
    hi = np.array([a[-1] for a in axes])

    def ev(pts, _i=interp, _lo=lo, _hi=hi):
        clipped = np.clip(np.atleast_2d(pts), _lo, _hi)
        return _i(clipped)

    radius = h * half  # largest centered ball inside the sampled cube
    return ScalarField(
        n=n,
        domain=Ball(center, radius),
        p=p,
        evaluator=ev,
        singular_distance=singular_distance,
        label=label,
        grid_meta={"h": h, "m": m, "center": center.tolist()},
    )


def grid_to_csv(u: ScalarField) -> str:
    """Serialize a grid-backed field; header n,h,p,c1..cn then index/value rows."""
    if not u.grid_meta:
        raise DomainError("field is not grid-backed")
    h = u.grid_meta["h"]
    m = u.grid_meta["m"]
    center = np.asarray(u.grid_meta["center"], dtype=float)
    half = (m - 1) / 2.0
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["n", "h", "p", "m"] + [f"c{i+1}" for i in range(u.n)])
    w.writerow([u.n, h, u.p, m] + [repr(float(c)) for c in center])
    idx = np.indices((m,) * u.n).reshape(u.n, -1).T
    pts = center + h * (idx - half)
    vals = u(pts)
    for row, v in zip(idx, vals):
        w.writerow(list(row) + [repr(float(v))])
    return buf.getvalue()


def grid_from_csv(text: str) -> ScalarField:
    rows = list(csv.reader(io.StringIO(text)))
    if len(rows) < 3:
        raise DomainError("malformed grid CSV")
    hdr = rows[1]
    n = int(hdr[0])
    h = float(hdr[1])
    p = float(hdr[2])
    m = int(hdr[3])
    center = np.array([float(c) for c in hdr[4:4 + n]])
    values = np.empty((m,) * n)
    for row in rows[2:]:
        if not row:
            continue
        idx = tuple(int(c) for c in row[:n])
        values[idx] = float(row[n])
    return from_grid(values, center, h, p)
