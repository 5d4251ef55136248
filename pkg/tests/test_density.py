import numpy as np
import pytest

from rieszstrat.density import density, high_density_set
from rieszstrat.errors import InsufficientDataError
from rieszstrat.examples import harmonic_plus_kernel, log_modulus, riesz_sum
from rieszstrat.fields import Ball

LADDER = (0.00625, 0.0125, 0.025, 0.05)


def test_density_matches_kernel_weight():
    u = riesz_sum([np.zeros(3)], [1.7], p=3, n=3)
    est = density(u, np.zeros(3), ladder=LADDER)
    assert est.theta_S == pytest.approx(1.7, rel=1e-6)
    assert est.theta_M == pytest.approx(1.7, rel=1e-6)
    assert est.consistency_sv <= 0.05 * 1.7
    assert est.monotone_violation == 0.0


def test_density_vanishes_at_smooth_points():
    u = riesz_sum([np.zeros(3)], [1.0], p=3, n=3)
    est = density(u, np.array([1.0, 0.0, 0.0]), ladder=LADDER)
    assert est.theta_S <= 0.02


def test_density_log_branch_counts_multiplicity():
    # P(z) = z1 z2 has multiplicity 2 at the origin
    u = log_modulus({(1, 1): 1.0}, m=2)
    est = density(u, np.zeros(4), ladder=LADDER)
    assert est.theta_M == pytest.approx(2.0, rel=0.05)


def test_density_invisible_to_smooth_perturbation():
    u = harmonic_plus_kernel({(2, 0, 0): 1.0, (0, 2, 0): -1.0}, np.zeros(3),
                             1.0, p=3, n=3)
    est = density(u, np.zeros(3), ladder=LADDER)
    assert est.theta_S == pytest.approx(1.0, rel=0.03)


def test_density_needs_enough_rungs():
    u = riesz_sum([np.zeros(3)], [1.0], p=3, n=3)
    with pytest.raises(InsufficientDataError):
        density(u, np.zeros(3), ladder=(0.1, 0.2))


def test_high_density_set_finds_each_kernel():
    centers = np.array([[0.31, 0.02, -0.17], [-0.24, 0.33, 0.11]])
    u = riesz_sum(centers, [1.0, 2.0], p=3, n=3)
    E = high_density_set(u, 0.9, Ball(np.zeros(3), 1.0), 0.02, seed=0)
    assert E.count == 2
    dmin = np.min(np.linalg.norm(E.points[:, None] - centers[None, :], axis=2), axis=0)
    assert np.max(dmin) <= 0.05


def test_high_density_set_nested_in_threshold():
    centers = np.array([[0.31, 0.02, -0.17], [-0.24, 0.33, 0.11]])
    u = riesz_sum(centers, [1.0, 2.0], p=3, n=3)
    lo = high_density_set(u, 0.9, Ball(np.zeros(3), 1.0), 0.04, seed=0)
    hi = high_density_set(u, 1.5, Ball(np.zeros(3), 1.0), 0.04, seed=0)
    assert hi.count == 1
    lo_keys = {tuple(np.round(q, 9)) for q in lo.points}
    assert all(tuple(np.round(q, 9)) in lo_keys for q in hi.points)


def test_high_density_set_empty_when_threshold_too_high():
    u = riesz_sum([np.zeros(3)], [1.0], p=3, n=3)
    E = high_density_set(u, 5.0, Ball(np.zeros(3), 1.0), 0.05, seed=0)
    assert E.count == 0 and len(E.points) == 0


def test_sharpen_pulls_points_onto_singularity():
    center = np.array([[0.123, -0.2, 0.31]])
    u = riesz_sum(center, [1.5], p=3, n=3)
    E = high_density_set(u, 1.0, Ball(np.zeros(3), 1.0), 0.04, seed=0, sharpen=True)
    assert E.count == 1
    # sharpened points sit an order of magnitude closer than the lattice pitch
    assert np.max(np.linalg.norm(E.points - center, axis=1)) <= 0.01
