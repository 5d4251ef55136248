import numpy as np
import pytest

from rieszstrat.errors import ScaleError
from rieszstrat.fields import (Ball, PlaneFrame, available_radius, evaluate,
                               from_grid, grid_from_csv, grid_to_csv, l1_distance,
                               l1_norm, p_flow, restrict, span, zero_field)
from rieszstrat.examples import plane_kernel, riesz_sum
from rieszstrat.kernels import riesz_kernel


def test_ball_contains_and_volume():
    ball = Ball(np.array([1.0, 0.0]), 0.5)
    assert ball.contains(np.array([[1.2, 0.1], [2.0, 0.0]])).tolist() == [True, False]
    assert ball.volume() == pytest.approx(np.pi * 0.25)


def test_plane_frame_orthonormalizes():
    W = span([1.0, 1.0, 0.0], [1.0, 0.0, 0.0])
    assert W.frame @ W.frame.T == pytest.approx(np.eye(2))
    assert W.k == 2 and W.n == 3


def test_plane_distance_and_embedding():
    V = span([0.0, 0.0, 1.0])
    pts = np.array([[3.0, 4.0, 7.0]])
    assert V.distance(pts)[0] == pytest.approx(5.0)
    coords = V.project_coords(pts)
    # frame orientation is not normalized, so compare projections, not signs
    assert abs(coords[0, 0]) == pytest.approx(7.0)
    assert V.embed(coords)[0] == pytest.approx([0.0, 0.0, 7.0])


def test_principal_angles_between_planes():
    A = span([1.0, 0.0, 0.0])
    B = span([np.cos(0.3), np.sin(0.3), 0.0])
    assert A.principal_angles(B)[0] == pytest.approx(0.3)


def test_zero_field_and_evaluate():
    u = zero_field(3)
    assert evaluate(u, [0.1, 0.2, 0.3]) == 0.0
    assert available_radius(u, np.zeros(3)) == pytest.approx(2.0)


def test_p_flow_reproduces_kernel_homogeneity():
    u = riesz_sum([np.zeros(3)], [1.0], p=3, n=3)
    v = p_flow(u, np.zeros(3), 0.25)
    nodes = np.array([[0.3, 0.0, 0.0], [0.0, 0.5, 0.0]])
    # r^{p-2} u(r y) = K_p(|y|) for the pure kernel: flow fixed point
    assert v.eval_masked(nodes) == pytest.approx(riesz_kernel(3.0, [0.3, 0.5]))


def test_p_flow_log_branch_subtracts_running_max():
    u = plane_kernel(span([0.0, 0.0, 1.0]), p=2.0)
    v = p_flow(u, np.zeros(3), 0.5)
    # max over B_1 of log(dist/0.5-scale) is 0 after the anchor subtraction
    node = np.array([[1.0, 0.0, 0.0]])
    assert v.eval_masked(node)[0] == pytest.approx(0.0, abs=1e-6)


def test_p_flow_rejects_oversized_scale():
    u = zero_field(3, radius=1.0)
    with pytest.raises(ScaleError):
        p_flow(u, np.zeros(3), 1.5)


def test_restrict_slices_through_plane():
    u = riesz_sum([np.zeros(3)], [1.0], p=3, n=3)
    W = span([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    v = restrict(u, W, np.zeros(3))
    assert v.n == 2
    assert v.eval_masked(np.array([[0.5, 0.0]]))[0] == pytest.approx(riesz_kernel(3.0, 0.5))


def test_l1_norm_of_constant():
    u = zero_field(2).shifted(-3.0)
    ball = Ball(np.zeros(2), 1.0)
    assert l1_norm(u, ball, count=2048, seed=0) == pytest.approx(3.0 * np.pi, rel=1e-6)
    assert l1_distance(u, u, ball, count=512, seed=0) == pytest.approx(0.0, abs=1e-12)


def test_grid_round_trip_through_csv():
    rng = np.random.default_rng(0)
    vals = rng.normal(size=(9, 9))
    u = from_grid(vals, np.zeros(2), h=0.25, p=3.0)
    v = grid_from_csv(grid_to_csv(u))
    pts = rng.uniform(-0.9, 0.9, size=(50, 2))
    assert v.eval_masked(pts) == pytest.approx(u.eval_masked(pts))


def test_from_grid_interpolates_linearly():
    axis = np.linspace(-1.0, 1.0, 9)
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    u = from_grid(2.0 * X + 3.0 * Y, np.zeros(2), h=0.25, p=3.0)
    pts = np.array([[0.1, -0.2], [0.33, 0.41]])
    assert u.eval_masked(pts) == pytest.approx(2 * pts[:, 0] + 3 * pts[:, 1])


def test_shifted_and_scaled_fields():
    u = riesz_sum([np.zeros(3)], [1.0], p=3, n=3)
    x = np.array([[0.5, 0.0, 0.0]])
    assert u.shifted(1.0).eval_masked(x)[0] == pytest.approx(u.eval_masked(x)[0] - 1.0)
    assert u.scaled(2.0).eval_masked(x)[0] == pytest.approx(2.0 * u.eval_masked(x)[0])


def test_span_drops_dependent_vectors():
    W = span([1.0, 0.0], [2.0, 0.0])
    assert W.k == 1
