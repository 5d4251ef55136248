import numpy as np
import pytest

from rieszstrat.covering import (decomposition_cover, minkowski_bound_check,
                                 tube_volume, vitali_cover, _greedy_net)
from rieszstrat.errors import ResolutionError
from rieszstrat.examples import plane_kernel, riesz_sum
from rieszstrat.fields import Ball, span


def test_vitali_disjoint_and_covering():
    rng = np.random.default_rng(1)
    pts = rng.uniform(-1, 1, size=(40, 2))
    selected, cover_r = vitali_cover(pts, 0.2)
    assert cover_r == pytest.approx(1.0)
    d = np.linalg.norm(selected[:, None] - selected[None, :], axis=2)
    off = d[~np.eye(len(selected), dtype=bool)]
    assert np.all(off >= 0.4 - 1e-12)
    dmin = np.min(np.linalg.norm(pts[:, None] - selected[None, :], axis=2), axis=1)
    assert np.max(dmin) <= 1.0


def test_tube_volume_of_single_point_is_ball_volume():
    vol = tube_volume(np.zeros((1, 3)), 0.2, Ball(np.zeros(3), 1.0), resolution=0.02)
    assert vol == pytest.approx(4.0 / 3.0 * np.pi * 0.2 ** 3, rel=0.05)


def test_tube_volume_of_segment():
    t = np.linspace(-0.5, 0.5, 201)
    seg = np.stack([t, np.zeros_like(t), np.zeros_like(t)], axis=1)
    vol = tube_volume(seg, 0.1, Ball(np.zeros(3), 1.0), resolution=0.02)
    exact = np.pi * 0.1 ** 2 * 1.0 + 4.0 / 3.0 * np.pi * 0.1 ** 3
    assert vol == pytest.approx(exact, rel=0.05)


def test_tube_volume_rejects_coarse_resolution():
    with pytest.raises(ResolutionError):
        tube_volume(np.zeros((1, 2)), 0.1, Ball(np.zeros(2), 1.0), resolution=0.05)


def test_tube_volume_empty_set():
    assert tube_volume(np.zeros((0, 3)), 0.1, Ball(np.zeros(3), 1.0), 0.02) == 0.0


def test_greedy_net_covers_within_radius():
    rng = np.random.default_rng(2)
    pts = rng.uniform(-1, 1, size=(500, 3))
    net = _greedy_net(pts, 0.3)
    dmin = np.min(np.linalg.norm(pts[:, None] - net[None, :], axis=2), axis=1)
    assert np.max(dmin) <= 0.3 + 1e-12


def test_minkowski_check_on_point_singularity():
    u = riesz_sum([np.zeros(3)], [1.5], p=3, n=3)
    rep = minkowski_bound_check(u, eta=1.0, r_grid=[0.05, 0.1, 0.2],
                                grid_step=0.025, count=256, seed=0)
    # r-tubes around one point scale like r^n = r^3 = r^p here
    assert rep.metadata["slope"] == pytest.approx(3.0, abs=0.3)
    assert rep.metadata["components"] == 1


def test_decomposition_counts_stay_flat_for_point_singularity():
    u = riesz_sum([np.zeros(3)], [1.5], p=3, n=3)
    trace = decomposition_cover(u, eta=4.0, gamma=0.25, j_max=3, k=0, eps=0.5,
                                search_ball=Ball(np.zeros(3), 1.0), seed=0)
    assert len(trace.counts) == 4
    assert trace.counts[0] >= 1
    # a 0-dimensional stratum needs a bounded number of balls at every scale:
    # counts must stay flat rather than grow like gamma^{-j}
    assert trace.counts[3] <= 2 * trace.counts[1]
    assert max(trace.counts) <= 300
    assert all(len(h) >= 1 for h in trace.tuple_counts[1:] if h)


def test_decomposition_rejects_large_gamma():
    u = riesz_sum([np.zeros(3)], [1.0], p=3, n=3)
    with pytest.raises(ValueError):
        decomposition_cover(u, eta=1.0, gamma=0.5, j_max=2, k=0)
