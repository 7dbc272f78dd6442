import math

import numpy as np
import pytest

from casimir_stress.analytic import (
    EDGE_COEFFICIENT,
    THETA_MIN,
    EdgeLaw,
    angular_integral_check,
    asympt_density,
    asympt_reflection,
    asymptotic_soft_wall_stress,
    casimir_ideal,
    edge_law_sum,
    lifshitz_plates,
    near_edge_stress,
    phi,
)
from casimir_stress.profile import DomainError, detect_edges, fig2_profile, soft_wall


def test_casimir_ideal():
    assert casimir_ideal(1.0) == pytest.approx(0.0411234, abs=1e-7)
    assert casimir_ideal(2.0) == pytest.approx(casimir_ideal(1.0) / 16, rel=1e-15)
    with pytest.raises(DomainError):
        casimir_ideal(0.0)


def test_edge_coefficient():
    assert EDGE_COEFFICIENT == pytest.approx(23 / (960 * math.pi**2), rel=1e-15)
    assert near_edge_stress(EdgeLaw(1.0, 1.0)) == pytest.approx(2.4275e-3, rel=1e-4)


def test_edge_law_scaling_in_a():
    vals = [near_edge_stress(EdgeLaw(a, 1.0)) for a in (1.0, 2.0, 4.0)]
    assert [v / vals[0] for v in vals] == pytest.approx([1.0, 0.25, 0.0625], rel=1e-15)


def test_general_law_reduces_at_unit_parameters():
    for a in np.geomspace(0.01, 3.0, 10):
        assert near_edge_stress(EdgeLaw(a, 1.0, 1.0)) == pytest.approx(EDGE_COEFFICIENT / a**2, rel=1e-15)


def test_general_law_n0_b_scaling():
    base = near_edge_stress(EdgeLaw(0.1, 1.0, 1.0))
    assert near_edge_stress(EdgeLaw(0.1, 2.0, 1.0)) == pytest.approx(base / 4, rel=1e-15)
    assert near_edge_stress(EdgeLaw(0.1, 1.0, 2.0)) == pytest.approx(base / 8, rel=1e-15)


def test_fig2_right_edge_coefficient():
    e1 = detect_edges(fig2_profile())[1]
    law = near_edge_stress(EdgeLaw(0.1, e1.b, e1.n0))
    direct = near_edge_stress(EdgeLaw(0.1, 2 * math.exp(-0.5), math.exp(0.5)))
    assert law == pytest.approx(direct, rel=1e-12)


@pytest.mark.parametrize("kw", [dict(a=0.0, b=1.0), dict(a=1.0, b=-1.0), dict(a=1.0, b=1.0, n0=0.5)])
def test_edge_law_validation(kw):
    with pytest.raises(DomainError):
        EdgeLaw(**kw)


def test_edge_law_sum_sides():
    prof = soft_wall()
    assert edge_law_sum(prof, -0.9) == pytest.approx(near_edge_stress(EdgeLaw(0.1, 1.0)))
    assert edge_law_sum(prof, -1.1) == 0.0


def test_angular_integral():
    out = angular_integral_check()
    assert out["angular"] == pytest.approx(23 / 15, abs=1e-12)
    assert out["radial"] == pytest.approx(0.25, rel=1e-12)
    assert out["assembled"] == pytest.approx(EDGE_COEFFICIENT, rel=1e-12)


@pytest.mark.parametrize("theta", np.linspace(0.1, 1.5, 10))
def test_phi_slope_at_edge(theta):
    h = 1e-5
    f = [float(phi(-1.0 + j * h, theta)) for j in (0, 1, 2)]
    assert (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h) == pytest.approx(-1.0, abs=1e-6)


def test_phi_domain():
    with pytest.raises(DomainError):
        phi(0.1, 0.5)
    with pytest.raises(DomainError):
        phi(-0.5, THETA_MIN / 2)


def test_reflection_signs_and_kappa_zero():
    re, rm = asympt_reflection(np.array([0.4, math.pi / 2]), 30.0)
    assert re.sign[0] < 0 and rm.sign[0] > 0
    assert re.value[1] == pytest.approx(0.0, abs=1e-30)


def test_density_at_edge():
    theta, w = 0.6, 5.0
    c2 = math.cos(theta) ** 2
    we, wm = asympt_density(-1.0, theta, w)
    e = math.exp(2 * w * float(phi(-1.0, theta)))
    assert float(we.value) == pytest.approx(c2 * e / (2 * math.pi), rel=1e-13)
    assert float(wm.value) == pytest.approx(-(2 - c2) * e / (2 * math.pi), rel=1e-13)


def test_density_vanishes_for_e_at_kappa_zero():
    we, _ = asympt_density(-0.5, math.pi / 2, 3.0)
    assert abs(float(we.value)) < 1e-30


def test_linearized_asymptotic_stress_is_edge_law():
    for a in (0.05, 0.1):
        assert asymptotic_soft_wall_stress(a, linearized=True) == pytest.approx(
            near_edge_stress(EdgeLaw(a, 1.0)), rel=1e-9
        )


def test_full_asymptotic_stress_approaches_edge_law():
    a = 0.02
    assert asymptotic_soft_wall_stress(a) == pytest.approx(near_edge_stress(EdgeLaw(a, 1.0)), rel=0.05)


def test_lifshitz_plates_perfect_limit():
    ideal = casimir_ideal(1.0)
    devs = [abs(lifshitz_plates(eps, 1.0) / ideal - 1) for eps in (1e4, 1e6, 1e8)]
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 3e-3


def test_lifshitz_plates_scaling():
    assert lifshitz_plates(1e4, 2.0) == pytest.approx(lifshitz_plates(1e4, 1.0) / 16, rel=1e-8)
