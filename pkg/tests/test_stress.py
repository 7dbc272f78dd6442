import math

import numpy as np
import pytest

from casimir_stress.analytic import EdgeLaw, lifshitz_plates, near_edge_stress
from casimir_stress.profile import (
    Beltrami,
    DomainError,
    Profile,
    Segment,
    Uniform,
    fig2_profile,
    mirror_pair,
    soft_wall,
    uniform_profile,
)
from casimir_stress.stress import QuadratureParams, stress_at, stress_profile


def _symmetric_valley():
    return Profile(
        (
            Segment(Beltrami(1.0, -2.0), -2.0, -1.0),
            Segment(Uniform(1.0), -1.0, 1.0),
            Segment(Beltrami(1.0, 2.0), 1.0, 2.0),
        )
    )


def test_uniform_is_zero():
    res = stress_profile(uniform_profile(2.25), np.linspace(-0.9, 0.9, 7), workers=1)
    assert np.all(np.abs(res.sigma) < 1e-8)
    assert res.converged.all()


def test_soft_wall_near_edge():
    sigma, err, ok = stress_at(soft_wall(), -0.95)
    assert ok and err >= 0
    assert sigma == pytest.approx(23 / (960 * math.pi**2) / 0.0025, rel=0.03)


def test_falling_wall_matches_rising():
    for a in (0.05, 0.1):
        rising = stress_at(soft_wall(), -1.0 + a)[0]
        falling = stress_at(soft_wall(falling=True), 1.0 - a)[0]
        assert falling == pytest.approx(rising, rel=0.02)
        assert falling > 0 and rising > 0


def test_symmetric_profile():
    prof = _symmetric_valley()
    res = stress_profile(prof, [-0.6, 0.6, -1.4, 1.4], workers=1)
    assert abs(res.sigma[0] - res.sigma[1]) <= 2 * max(res.error[0], res.error[1]) + 1e-15
    assert abs(res.sigma[2] - res.sigma[3]) <= 2 * max(res.error[2], res.error[3]) + 1e-15


def test_scaling_covariance():
    lam = 2.0
    base = stress_at(soft_wall(), -0.9)[0]
    scaled = stress_at(soft_wall().scaled(lam), -0.9 * lam)[0]
    assert scaled == pytest.approx(base / lam**4, rel=1e-9)


def test_mirror_pair_against_lifshitz():
    sigma, err, ok = stress_at(mirror_pair(1e4), 0.5)
    assert ok
    assert sigma == pytest.approx(lifshitz_plates(1e4, 1.0), rel=1e-6)


def test_edge_coincident_point_rejected():
    with pytest.raises(DomainError):
        stress_at(soft_wall(), -1.0)
    with pytest.raises(DomainError):
        stress_at(fig2_profile(), 1.0)


def test_beyond_pole_rejected():
    with pytest.raises(DomainError):
        stress_at(soft_wall(), 0.1)


def test_worker_count_does_not_change_results():
    zs = [0.1, 0.3, 0.7]
    one = stress_profile(fig2_profile(), zs, workers=1)
    two = stress_profile(fig2_profile(), zs, workers=2)
    assert one.sigma.tobytes() == two.sigma.tobytes()
    assert one.error.tobytes() == two.error.tobytes()


def test_repeatable():
    a = stress_at(fig2_profile(), 0.2)
    b = stress_at(fig2_profile(), 0.2)
    assert a == b


def test_tolerance_refinement():
    prof = soft_wall()
    for z in (-0.97, -0.9, -0.8):
        s1, e1, _ = stress_at(prof, z, QuadratureParams(rtol=1e-5))
        s2, _, _ = stress_at(prof, z, QuadratureParams(rtol=5e-6))
        assert abs(s2 - s1) <= e1


def test_w_max_beyond_dispersion_knee():
    prof = fig2_profile(200.0)
    z = 0.02
    s1, e1, _ = stress_at(prof, z, QuadratureParams(w_max=20 * 200.0))
    s2, _, _ = stress_at(prof, z, QuadratureParams(w_max=40 * 200.0))
    assert abs(s2 - s1) <= e1 + 1e-15


def test_gauss_laguerre_agrees():
    prof = soft_wall()
    a = stress_at(prof, -0.9)[0]
    b = stress_at(prof, -0.9, QuadratureParams(radial="gauss-laguerre"))[0]
    assert b == pytest.approx(a, rel=1e-6)


def test_budget_exhaustion_flags_not_converged():
    sigma, err, ok = stress_at(fig2_profile(), 0.3, QuadratureParams(rtol=1e-14, max_evaluations=100))
    assert not ok
    assert math.isfinite(sigma) and err >= 0


@pytest.mark.parametrize(
    "kw", [dict(rtol=0.0), dict(w_max=-1.0), dict(n_theta=2), dict(radial="simpson"), dict(n_theta=64, max_theta=32)]
)
def test_params_validation(kw):
    with pytest.raises(ValueError):
        QuadratureParams(**kw)


def test_result_metadata():
    res = stress_profile(soft_wall(), [-0.9], workers=1)
    assert res.metadata["profile_digest"] == soft_wall().digest()
    assert res.metadata["quadrature"]["w_max"] is None
    assert "hbar" in res.metadata["units"]


def test_power_law_slope():
    a = np.geomspace(0.02, 0.2, 5)
    prof = soft_wall()
    sig = [stress_at(prof, -1.0 + x)[0] for x in a]
    slope = np.polyfit(np.log(a), np.log(sig), 1)[0]
    assert slope == pytest.approx(-2.0, abs=0.05)
    assert sig[0] == pytest.approx(near_edge_stress(EdgeLaw(a[0], 1.0)), rel=0.05)
