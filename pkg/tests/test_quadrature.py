import numpy as np
import pytest

from rieszstrat.quadrature import ball_nodes, sphere_nodes, unit_ball_volume


def test_unit_ball_volumes():
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(np.pi)
    assert unit_ball_volume(3) == pytest.approx(4.0 / 3.0 * np.pi)
    assert unit_ball_volume(4) == pytest.approx(np.pi ** 2 / 2.0)


def test_sphere_nodes_lie_on_sphere():
    for n in (2, 3, 4):
        nodes = sphere_nodes(n, 256, seed=0)
        assert nodes.shape == (256, n)
        assert np.linalg.norm(nodes, axis=1) == pytest.approx(np.ones(256))


def test_sphere_nodes_are_antithetic():
    nodes = sphere_nodes(3, 128, seed=1)
    # node set closed under negation makes odd functions integrate to 0 exactly
    assert np.max(np.abs(np.mean(nodes, axis=0))) < 1e-14


def test_sphere_nodes_deterministic_and_cached():
    a = sphere_nodes(3, 64, seed=5)
    b = sphere_nodes(3, 64, seed=5)
    assert a is b
    assert not a.flags.writeable


def test_ball_nodes_fill_the_ball():
    nodes = ball_nodes(3, 4096, seed=0)
    r = np.linalg.norm(nodes, axis=1)
    assert np.max(r) <= 1.0 + 1e-12
    # uniform in volume: E[r^3] = 1/2
    assert np.mean(r ** 3) == pytest.approx(0.5, abs=0.02)


def test_ball_nodes_integrate_linear_functions_well():
    nodes = ball_nodes(3, 4096, seed=3)
    assert abs(np.mean(nodes[:, 0])) < 1e-3
