"""Riesz kernels, radial profiles, and convexity utilities in the kernel coordinate.

The kernel family K_p is normalized as

    K_p(t) = -t^(2-p)   for p > 2
    K_2(t) = log t
    K_p(t) = t^(2-p)    for 1 <= p < 2

which makes every K_p strictly increasing on (0, inf) and harmonic as a
radial function away from the origin of R^p.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainError,
    InsufficientDataError,
    ProfileRangeError,
    UnsupportedCharacteristicError,
)


def _check_p(p: float) -> None:
    if not np.isfinite(p) or p < 1:
        raise UnsupportedCharacteristicError(f"characteristic p={p} not supported (need p >= 1)")


def riesz_kernel(p: float, t):
    """Evaluate K_p(t) for t > 0 (scalar or array)."""
    _check_p(p)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("riesz kernel requires t > 0")
    if p > 2:
        out = -(t ** (2.0 - p))
    elif p == 2:
        out = np.log(t)
    else:
        out = t ** (2.0 - p)
    return out if out.ndim else float(out)


def riesz_kernel_derivative(p: float, t):
    """Evaluate K_p'(t) > 0 for t > 0 (scalar or array)."""
    _check_p(p)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("riesz kernel derivative requires t > 0")
    if p > 2:
        out = (p - 2.0) * t ** (1.0 - p)
    elif p == 2:
        out = 1.0 / t
    else:
        out = (2.0 - p) * t ** (1.0 - p)
    return out if out.ndim else float(out)


@dataclass
class RadialProfile:
    """A sampled radius -> value curve (S, M, V, or an energy vs r)."""

    radii: np.ndarray
    values: np.ndarray
    meaning: str = "S"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.radii = np.asarray(self.radii, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.radii.ndim != 1 or self.radii.shape != self.values.shape:
            raise InsufficientDataError("radii and values must be 1-d arrays of equal length")
        if self.radii.size < 1:
            raise InsufficientDataError("profile needs at least one sample")
        if np.any(self.radii <= 0):
            raise ProfileRangeError("profile radii must be positive")
        if np.any(np.diff(self.radii) <= 0):
            raise ProfileRangeError("profile radii must be strictly increasing")

    def value_at(self, r: float, p: float) -> float:
        """Interpolate the profile at radius r, linearly in the K_p(t) coordinate.

        Exact for profiles of the form a*K_p + b.
        """
        if r < self.radii[0] - 1e-12 or r > self.radii[-1] + 1e-12:
            raise ProfileRangeError(
                f"radius {r} outside profile range [{self.radii[0]}, {self.radii[-1]}]"
            )
        xs = riesz_kernel(p, self.radii)
        return float(np.interp(riesz_kernel(p, r), xs, self.values))


def kp_quotient(f: RadialProfile, r: float, s: float, p: float) -> float:
    """Difference quotient (f(r) - f(s)) / (K_p(r) - K_p(s)), r != s."""
    if r == s:
        raise ProfileRangeError("kp_quotient requires r != s")
    num = f.value_at(r, p) - f.value_at(s, p)
    den = riesz_kernel(p, r) - riesz_kernel(p, s)
    return num / den


def kp_convexity_defect(f: RadialProfile, p: float) -> float:
    """Max decrease of consecutive K_p difference quotients; 0 means numerically K_p-convex."""
    if f.radii.size < 3:
        raise InsufficientDataError("convexity defect needs at least 3 radii")
    ks = riesz_kernel(p, f.radii)
    quot = np.diff(f.values) / np.diff(ks)
    drops = quot[:-1] - quot[1:]
    return float(max(0.0, np.max(drops)))
