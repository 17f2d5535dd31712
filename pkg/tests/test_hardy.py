import pytest

from hardylab.geometry import RadialDomain, make_grid
from hardylab.hardy import (HardyRefusal, ground_state, ground_state_exponent, hardy_constant,
                            local_hardy_constant)
from hardylab.linear import fit_boundary_exponent

BALL = RadialDomain.ball(1.0, 3)


def test_ball_constant_is_one_quarter():
    res = hardy_constant(BALL, make_grid(BALL, 2048))
    assert res.extrapolated == pytest.approx(0.25, abs=1e-3)
    assert res.label == "exact"


@pytest.mark.parametrize("dom", [BALL, RadialDomain.annulus(0.1, 1.0, 3), RadialDomain.annulus(0.2, 1.0, 2)])
def test_thin_strips_have_constant_one_quarter(dom):
    res = local_hardy_constant(dom, 0.05, n=2048)
    assert res.constant == pytest.approx(0.25, abs=1e-3)


def test_discrete_constants_decrease_toward_the_limit():
    dom = RadialDomain.annulus(0.5, 1.0, 3)
    coarse = hardy_constant(dom, make_grid(dom, 512))
    fine = hardy_constant(dom, make_grid(dom, 2048))
    assert fine.constant <= coarse.constant
    assert fine.extrapolated <= fine.constant
    assert fine.label == "radial upper bound"


def test_strip_wider_than_half_inradius_rejected():
    with pytest.raises(ValueError):
        local_hardy_constant(BALL, 0.6)


def test_no_ground_state_on_the_ball():
    with pytest.raises(HardyRefusal):
        ground_state(BALL, make_grid(BALL, 512))


def test_small_hole_annulus_has_positive_ground_state():
    dom = RadialDomain.annulus(0.001, 1.0, 2)
    phi, res = ground_state(dom, make_grid(dom, 1024))
    assert res.extrapolated < 0.24
    assert (phi.values > 0).all()
    fit = fit_boundary_exponent(phi, component="outer")
    assert fit.exponent == pytest.approx(ground_state_exponent(res.extrapolated), abs=0.05)


def test_ground_state_exponent_at_one_quarter():
    assert ground_state_exponent(0.25) == 0.5
