import numpy as np
import pytest

from rieszstrat.energy import (GrassmannianFamily, f_energy_profile, g_energy,
                               g_energy_bound_check, g_energy_profile,
                               normalize_for_monotonicity)
from rieszstrat.errors import InsufficientSamplingError, UnsupportedCharacteristicError
from rieszstrat.examples import riesz_sum
from rieszstrat.fields import zero_field


def kernel4(weight=1.2):
    return riesz_sum([np.zeros(4)], [weight], p=3, n=4)


def test_family_kinds_and_validation():
    fam = GrassmannianFamily(4, 3, kind="full", sample_count=8, seed=0)
    assert len(fam.planes) == 8
    assert all(W.k == 3 and W.n == 4 for W in fam.planes)
    cx = GrassmannianFamily(4, 2, kind="complex-lines", sample_count=8, seed=0)
    assert all(W.k == 2 for W in cx.planes)
    with pytest.raises(InsufficientSamplingError):
        GrassmannianFamily(3, 2, kind="complex-lines", sample_count=8)
    with pytest.raises(InsufficientSamplingError):
        GrassmannianFamily(4, 3, kind="explicit", planes=[])


def test_f_energy_constant_on_pure_kernel():
    u = riesz_sum([np.zeros(3)], [1.5], p=3, n=3)
    prof = f_energy_profile(u, np.zeros(3), [0.1, 0.25, 0.5], count=512, seed=0)
    assert prof.values == pytest.approx(np.full(3, 3.0), abs=1e-6)


def test_f_energy_needs_p_above_two():
    u = riesz_sum([np.zeros(3)], [1.0], p=2, n=3)
    with pytest.raises(UnsupportedCharacteristicError):
        f_energy_profile(u, np.zeros(3), [0.1, 0.5])


def test_normalization_shifts_constants_away():
    u = zero_field(3).shifted(-5.0)  # the constant field u = 5
    _, N = normalize_for_monotonicity(u, count=256, seed=0)
    assert N == pytest.approx(5.0, abs=1e-9)


def test_g_energy_exact_on_pure_kernel():
    # restriction of K_3(|x|) to any 3-plane through 0 is again K_3: every
    # quotient is the weight, so theta_G = 3 * weight exactly
    fam = GrassmannianFamily(4, 3, kind="full", sample_count=16, seed=0)
    est = g_energy(kernel4(), np.zeros(4), 0.5, fam, count=256, seed=0)
    assert est.value == pytest.approx(3.6, abs=1e-9)
    assert est.mc_stderr <= 1e-9


def test_g_energy_is_linear_in_the_field():
    fam = GrassmannianFamily(4, 3, kind="full", sample_count=8, seed=1)
    u = kernel4()
    a = g_energy(u, np.zeros(4), 0.5, fam, count=256, seed=0).value
    b = g_energy(u.scaled(2.0), np.zeros(4), 0.5, fam, count=256, seed=0).value
    assert b == pytest.approx(2.0 * a, abs=1e-12)


def test_g_energy_profile_monotone_within_error():
    u = riesz_sum([[0.3, 0.0, 0.0, 0.0], [-0.3, 0.0, 0.0, 0.0]], [1.0, 1.5],
                  p=3, n=4)
    fam = GrassmannianFamily(4, 3, kind="full", sample_count=16, seed=0)
    prof = g_energy_profile(u, np.zeros(4), np.geomspace(0.1, 0.5, 5), fam,
                            count=512, seed=0)
    err = np.array(prof.metadata["mc_stderr"])
    slack = 3.0 * (err[:-1] + err[1:]) + 1e-9
    assert np.all(np.diff(prof.values) >= -slack)


def test_g_energy_rejects_tiny_families():
    fam = GrassmannianFamily(4, 3, kind="full", sample_count=4, seed=0)
    with pytest.raises(InsufficientSamplingError):
        g_energy(kernel4(), np.zeros(4), 0.5, fam, count=128, seed=0)


def test_bound_check_reports_finite_ratios():
    fam = GrassmannianFamily(4, 3, kind="full", sample_count=8, seed=0)
    rep = g_energy_bound_check(kernel4(), lam=5.0, family=fam, count=256, seed=0)
    assert np.isfinite(rep.theta_ratio) and np.isfinite(rep.annulus_ratio)
    assert rep.theta_ratio > 0
