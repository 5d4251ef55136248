import numpy as np
import pytest

from rieszstrat.examples import harmonic_plus_kernel, plane_kernel, riesz_sum
from rieszstrat.fields import span
from rieszstrat.kernels import riesz_kernel
from rieszstrat.means import (laplacian_mass, left_quotient, profile,
                              spherical_max, spherical_mean, volume_mean)


@pytest.fixture
def kernel3():
    return riesz_sum([np.zeros(3)], [1.0], p=3, n=3)


def test_spherical_mean_of_kernel_is_exact(kernel3):
    # S(K_p, 0, r) = K_p(r) exactly: the integrand is constant on the sphere
    assert spherical_mean(kernel3, np.zeros(3), 0.5, count=256, seed=0) == \
        pytest.approx(riesz_kernel(3.0, 0.5))


def test_spherical_mean_of_harmonic_function_is_center_value():
    u = harmonic_plus_kernel({(1, 0, 0): 1.0, (2, 0, 0): 1.0, (0, 2, 0): -1.0},
                             np.zeros(3), 0.0, p=3, n=3)
    x = np.array([0.2, -0.1, 0.4])
    S = spherical_mean(u, x, 0.5, count=8192, seed=0)
    assert S == pytest.approx(u.eval_masked(x[None])[0], abs=1e-3)


def test_spherical_max_of_kernel(kernel3):
    # K_p increasing means the max over the sphere |y| = r is K_p(r)
    M = spherical_max(kernel3, np.zeros(3), 0.5, count=1024, seed=0)
    assert M == pytest.approx(riesz_kernel(3.0, 0.5), abs=1e-6)


def test_volume_mean_of_kernel(kernel3):
    # V(K_p, 0, r) = n/(n-p+2) K_p(r) for p < n + 2
    V = volume_mean(kernel3, np.zeros(3), 0.5, count=8192, seed=0)
    assert V == pytest.approx(1.5 * riesz_kernel(3.0, 0.5), rel=0.03)


def test_profile_is_sorted_and_labeled(kernel3):
    prof = profile(kernel3, np.zeros(3), [0.4, 0.1, 0.2], "S", count=256, seed=0)
    assert prof.radii.tolist() == [0.1, 0.2, 0.4]
    assert prof.meaning == "S"


def test_left_quotient_of_kernel_is_one(kernel3):
    q = left_quotient(kernel3, np.zeros(3), 0.5, 3.0, which="S", count=512, seed=0)
    assert q == pytest.approx(1.0, abs=1e-9)


def test_laplacian_mass_unit_kernel_is_exactly_one():
    u = riesz_sum([np.zeros(4)], [1.0], p=4, n=4)
    mass = laplacian_mass(u, np.zeros(4), 0.5, count=2048, seed=0)
    assert mass == pytest.approx(1.0, abs=1e-9)


def test_laplacian_mass_of_line_singularity_is_linear():
    # Delta K_3(dist to line) in R^4 is (4 pi) H^1 on the line; in units where
    # the point kernel K_4 has mass 1 (4 pi^2), a radius-r segment carries
    # 8 pi r / (4 pi^2) = 2 r / pi
    u = plane_kernel(span([0.0, 0.0, 0.0, 1.0]), p=3.0)
    for r in (0.2, 0.4):
        mass = laplacian_mass(u, np.zeros(4), r, count=8192, seed=0)
        assert mass == pytest.approx(2.0 * r / np.pi, rel=0.02)


def test_laplacian_mass_of_harmonic_field_is_zero():
    u = harmonic_plus_kernel({(2, 0, 0): 1.0, (0, 2, 0): -1.0}, np.zeros(3),
                             0.0, p=3, n=3)
    mass = laplacian_mass(u, np.array([0.1, 0.0, 0.2]), 0.5, count=2048, seed=0)
    assert mass == pytest.approx(0.0, abs=1e-6)
