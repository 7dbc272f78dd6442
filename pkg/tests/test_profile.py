import json
import math

import numpy as np
import pytest

from casimir_stress.profile import (
    Beltrami,
    DispersionParams,
    DomainError,
    ExponentialDispersive,
    Profile,
    Segment,
    Tabulated,
    Uniform,
    UntestedMediumWarning,
    ValidationError,
    detect_edges,
    fig2_profile,
    load_profile,
    mirror_pair,
    permeability,
    permittivity,
    profile_from_config,
    refractive_index,
    soft_wall,
    uniform_profile,
)


def test_vacuum_permittivity_is_one():
    p = uniform_profile(1.0)
    for z in (-5.0, 0.0, 0.3, 7.0):
        for kappa in (0.0, 1.0, 1e3):
            assert permittivity(p, z, kappa) == 1.0
            assert permeability(p, z, kappa) == 1.0


def test_exponential_permittivity_at_zero_kappa():
    p = fig2_profile()
    assert permittivity(p, 0.5, 0.0) == pytest.approx(math.exp(0.5), rel=1e-14)


def test_exponential_permittivity_high_kappa_limit():
    p = fig2_profile()
    assert permittivity(p, 1.0, 1e9) == pytest.approx(1.0, abs=1e-9)


def test_exponential_permittivity_matches_rational_form():
    kappa0 = 200.0
    p = fig2_profile(kappa0)
    for kappa in (0.0, 50.0, 200.0, 1e3):
        base = (kappa**2 + math.e * kappa0**2) / (kappa**2 + kappa0**2)
        assert permittivity(p, 0.3, kappa) == pytest.approx(base**0.3, rel=1e-13)


def test_beltrami_index_and_slope_at_edge():
    n, dn = refractive_index(soft_wall(), -1.0, 0.0, side=1)
    assert n == pytest.approx(1.0, rel=1e-14)
    assert dn == pytest.approx(1.0, rel=1e-14)


def test_uniform_slope_is_zero():
    assert refractive_index(uniform_profile(2.25), 0.1)[1] == 0.0


def test_exponential_slope_at_left_edge():
    n, dn = refractive_index(fig2_profile(), 0.0, 0.0, side=1)
    assert n == pytest.approx(1.0)
    assert dn == pytest.approx(0.5, rel=1e-13)
    h = 1e-6
    fd = (refractive_index(fig2_profile(), h, 0.0)[0] - refractive_index(fig2_profile(), 0.0, 0.0)[0]) / h
    assert fd == pytest.approx(0.5, rel=1e-5)


def test_beltrami_law_exact_on_grid():
    seg = Beltrami(2.5, 0.7)
    for z in np.linspace(-3.0, 0.6, 17):
        n, _ = seg.index(z)
        assert n * (0.7 - z) == pytest.approx(2.5, rel=1e-15)


def test_detect_edges_soft_wall():
    (edge,) = detect_edges(soft_wall())
    assert edge.z_edge == -1.0
    assert edge.n0 == pytest.approx(1.0)
    assert edge.jump == pytest.approx(1.0)
    assert edge.b == pytest.approx(1.0)
    assert edge.rising


def test_detect_edges_uniform_is_empty():
    assert detect_edges(uniform_profile(2.25)) == []


def test_detect_edges_fig2():
    e0, e1 = detect_edges(fig2_profile(), kappa=0.0)
    assert (e0.z_edge, e1.z_edge) == (0.0, 1.0)
    assert e0.n0 == pytest.approx(1.0)
    assert e0.jump == pytest.approx(0.5, rel=1e-12)
    assert e1.n0 == pytest.approx(math.exp(0.5), rel=1e-12)
    assert e1.jump == pytest.approx(-math.exp(0.5) / 2.0, rel=1e-12)
    assert e0.wall_side == 1 and e1.wall_side == -1


def test_detect_edges_falling_wall():
    (edge,) = detect_edges(soft_wall(falling=True))
    assert edge.z_edge == 1.0
    assert edge.wall_side == -1
    assert not edge.rising
    assert edge.b == pytest.approx(1.0)


def test_detect_edges_independent_of_subdivision():
    whole = soft_wall()
    split = Profile(
        (
            Segment(Uniform(1.0), -2.0, -1.5),
            Segment(Uniform(1.0), -1.5, -1.0),
            Segment(Beltrami(1.0, 0.0), -1.0, 0.0),
        )
    )
    assert detect_edges(whole) == detect_edges(split)
    assert detect_edges(split) == detect_edges(split)


@pytest.mark.parametrize("kappa", [0.0, 0.1, 3.0, 200.0, 1e4])
def test_continuity_at_boundaries(kappa):
    for p in (soft_wall(), soft_wall(n0=2.0), fig2_profile()):
        for zb in p.boundaries:
            nl = refractive_index(p, zb, kappa, side=-1)[0]
            nr = refractive_index(p, zb, kappa, side=1)[0]
            assert abs(nl - nr) < 1e-12


def test_index_jump_rejected():
    with pytest.raises(ValidationError, match="jumps at boundary"):
        Profile((Segment(Uniform(1.0), 0.0, 1.0), Segment(Uniform(4.0), 1.0, 2.0)))


def test_index_jump_allowed_when_requested():
    p = mirror_pair()
    assert p.allow_jumps
    with pytest.raises(ValidationError):
        detect_edges(p)


def test_gap_between_segments_rejected():
    with pytest.raises(ValidationError, match="tile"):
        Profile((Segment(Uniform(1.0), 0.0, 1.0), Segment(Uniform(1.0), 1.5, 2.0)))


def test_active_medium_rejected():
    with pytest.raises(ValidationError):
        Profile((Segment(Uniform(0.5), 0.0, 1.0),))


def test_pole_inside_segment_rejected():
    with pytest.raises(ValidationError):
        Segment(Beltrami(1.0, 0.0), -1.0, 1.0)


def test_non_positive_kappa0_rejected():
    with pytest.raises(ValidationError):
        DispersionParams(0.0)


def test_magnetic_medium_warns():
    with pytest.warns(UntestedMediumWarning):
        Profile((Segment(Uniform(2.0, 2.0), 0.0, 1.0),))


def test_domain_error_beyond_pole():
    p = soft_wall()
    with pytest.raises(DomainError):
        permittivity(p, 0.0)
    with pytest.raises(DomainError):
        permittivity(p, 0.5)
    with pytest.raises(DomainError):
        permittivity(p, math.nan)


def test_caps_take_end_values():
    p = fig2_profile()
    assert permittivity(p, -3.0, 0.0) == pytest.approx(1.0)
    assert permittivity(p, 4.0, 0.0) == pytest.approx(math.e)
    assert refractive_index(p, 4.0, 0.0)[1] == 0.0


def test_tabulated_segment_interpolates():
    z = np.linspace(0.0, 1.0, 11)
    eps = 1.0 + z**2
    p = Profile(
        (
            Segment(Uniform(1.0), -1.0, 0.0),
            Segment(Tabulated(tuple(z), tuple(eps), tuple(np.ones_like(z))), 0.0, 1.0),
            Segment(Uniform(2.0), 1.0, 2.0),
        )
    )
    assert permittivity(p, 0.55) == pytest.approx(1.3025, rel=1e-3)
    edges = detect_edges(p)
    assert [e.z_edge for e in edges] == [1.0]


def test_config_round_trip(tmp_path):
    for p in (soft_wall(), fig2_profile(), mirror_pair()):
        path = tmp_path / "p.json"
        path.write_text(json.dumps(p.to_config()))
        q = load_profile(path)
        assert q.to_config() == p.to_config()
        assert q.digest() == p.digest()


def test_config_rejects_unknown_keys():
    cfg = soft_wall().to_config()
    cfg["colour"] = "blue"
    with pytest.raises(ValidationError, match="unknown"):
        profile_from_config(cfg)
    cfg = soft_wall().to_config()
    cfg["segments"][1]["params"]["tilt"] = 1.0
    with pytest.raises(ValidationError, match="unknown"):
        profile_from_config(cfg)


def test_config_rejects_unknown_kind():
    with pytest.raises(ValidationError, match="kind"):
        profile_from_config({"segments": [{"kind": "fractal", "zmin": 0, "zmax": 1}]})


def test_scaled_profile():
    p = soft_wall().scaled(2.0)
    assert p.zmin == -4.0
    (edge,) = detect_edges(p)
    assert edge.z_edge == -2.0
    assert edge.b == pytest.approx(2.0)


def test_exponential_kind_describes_itself():
    kind = ExponentialDispersive()
    assert kind.params() == {"base": math.e, "origin": 0.0, "rate": 1.0}
