import numpy as np
import pytest

from rieszstrat.examples import harmonic_plus_kernel, plane_kernel, riesz_sum
from rieszstrat.fields import Ball, span
from rieszstrat.homogeneity import (bulk_defect_bounds, bulk_zero_upper,
                                    cone_splitting_check, homogeneity_defect,
                                    stratum_set)


@pytest.fixture
def line_kernel():
    return plane_kernel(span([0.0, 0.0, 0.0, 1.0]), p=3.0)


def test_exact_model_has_tiny_defect(line_kernel):
    rep = homogeneity_defect(line_kernel, np.zeros(4), 0.5, k=1,
                             search_budget=64, count=1024, seed=0)
    assert rep.lower <= 1e-9
    assert rep.upper <= 1e-3
    assert rep.model is not None
    # the recovered plane is the singular line
    angle = rep.plane.principal_angles(span([0.0, 0.0, 0.0, 1.0]))
    assert float(np.max(angle)) <= 0.05


def test_radial_kernel_is_zero_homogeneous():
    u = riesz_sum([np.zeros(3)], [1.0], p=3, n=3)
    rep = homogeneity_defect(u, np.zeros(3), 0.5, k=0, search_budget=8,
                             count=1024, seed=0)
    assert rep.upper <= 1e-6


def test_defect_sandwich_orders_correctly(line_kernel):
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = rng.uniform(-0.5, 0.5, 4)
        rep = homogeneity_defect(line_kernel, x, 0.25, k=int(rng.integers(0, 3)),
                                 search_budget=4, count=256, seed=0, polish=False)
        assert rep.lower <= rep.upper + 1e-9


def test_defect_positive_away_from_singularity(line_kernel):
    # at a smooth point a (k+1)-invariant singular model cannot fit at scale 1
    rep = homogeneity_defect(line_kernel, np.array([0.5, 0.0, 0.0, 0.0]), 0.5,
                             k=1, search_budget=16, count=512, seed=0)
    assert rep.upper > 0.1


def test_bulk_bounds_shapes_and_order(line_kernel):
    X = np.array([[0.0, 0.0, 0.0, 0.0], [0.4, 0.0, 0.0, 0.0]])
    scales = np.array([0.25, 0.5])
    lower, upper = bulk_defect_bounds(line_kernel, X, scales, count=64, seed=0)
    assert lower.shape == upper.shape == (2, 2)
    assert np.all(lower <= upper + 1e-9)
    only_upper = bulk_zero_upper(line_kernel, X, scales, count=64, seed=0)
    assert only_upper == pytest.approx(upper)


def test_stratum_outer_set_contains_singular_line(line_kernel):
    rep = stratum_set(line_kernel, eta=2.0, r=0.2, k=1,
                      search_ball=Ball(np.zeros(4), 1.0), grid_step=0.1,
                      count=64, seed=0, tube_radii=[0.2])
    outer = np.concatenate([rep.points, rep.indeterminate]) if len(rep.points) \
        else rep.indeterminate
    assert len(outer) > 0
    # every on-line lattice point within the ball must survive
    for t in (-0.8, -0.4, 0.0, 0.4, 0.8):
        q = np.array([0.0, 0.0, 0.0, t])
        assert np.min(np.linalg.norm(outer - q, axis=1)) <= 0.1 + 1e-9
    assert rep.tube_volumes[0.2] > 0


def test_stratum_above_true_dimension_excludes_line_points(line_kernel):
    # k = 2 strata ask for 3-homogeneity; the line kernel is 1-homogeneous,
    # so its singular points carry small (k+1)=2 defect and are excluded
    # once the fitted models run (refinement budget on)
    rep = stratum_set(line_kernel, eta=4.0, r=0.3, k=1,
                      search_ball=Ball(np.zeros(4), 0.3), grid_step=0.15,
                      count=64, seed=0, refine_budget=8)
    # eta above the best 2-homogeneous fit (~3.7) excludes everything
    assert len(rep.points) == 0 and len(rep.indeterminate) == 0


def test_cone_splitting_pass_and_counterexample():
    u = plane_kernel(span([0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]), p=2.0)
    V = span([0.0, 0.0, 0.0, 1.0])
    good = cone_splitting_check(u, np.zeros(4), V, np.array([0.0, 0.0, 0.4, 0.0]),
                                count=1024, seed=0)
    assert good.valid and good.passed and good.translation_defect <= 1e-3
    bad = cone_splitting_check(u, np.zeros(4), V, np.array([0.4, 0.0, 0.0, 0.0]),
                               count=1024, seed=0)
    assert not bad.valid
    assert bad.precondition_defects["flow_fix_x2"] > 0.02


def test_cone_splitting_rejects_x2_in_plane():
    u = plane_kernel(span([0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]), p=2.0)
    V = span([0.0, 0.0, 0.0, 1.0])
    rep = cone_splitting_check(u, np.zeros(4), V, np.array([0.0, 0.0, 0.0, 0.5]),
                               count=512, seed=0)
    assert not rep.valid and rep.passed is None
