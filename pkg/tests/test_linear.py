import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardylab.exponents import critical_q, exponents
from hardylab.geometry import RadialDomain, make_grid, normalized_trace
from hardylab.linear import (fit_boundary_exponent, green_potential, harmonic_profile, kernel_lq_test,
                             martin_halfspace, martin_residual_study, radial_green)

BALL = RadialDomain.ball(1.0, 3)


@pytest.mark.parametrize("mu", [-2.0, 0.0, 0.1875])
@pytest.mark.parametrize("branch", ["alpha_minus", "alpha_plus"])
def test_harmonic_profiles_have_the_boundary_exponent(mu, branch):
    prof = harmonic_profile(BALL, mu, branch)
    assert prof.fitted_exponent == pytest.approx(prof.target_exponent, abs=0.02)


def test_alpha_minus_profile_has_unit_density():
    for mu in (-2.0, 0.1):
        prof = harmonic_profile(BALL, mu)
        tr = normalized_trace(prof.on(make_grid(BALL, 2048)), exponents(mu))
        assert tr.extrapolated_limit == pytest.approx(4 * math.pi, rel=1e-2)


def test_annulus_profile_covers_both_components():
    dom = RadialDomain.annulus(0.5, 1.0, 3)
    prof = harmonic_profile(dom, 0.1)
    assert set(prof.coefficients()) == {"inner", "outer"}
    tr = normalized_trace(prof.on(make_grid(dom, 2048)), exponents(0.1))
    area = 4 * math.pi * (0.25 + 1.0)
    assert tr.extrapolated_limit == pytest.approx(area, rel=2e-2)


def test_green_function_second_order_anchor():
    errs = []
    for n in (256, 512, 1024):
        G = radial_green(BALL, 0.0, 0.0, n)
        r = G.values.grid.nodes
        exact = (1 / (4 * math.pi)) * (1 / r - 1)
        core = r >= 0.1
        errs.append(np.max(np.abs(G.values.values[core] / exact[core] - 1)))
    assert 3.0 <= errs[0] / errs[1] <= 5.0
    assert 3.0 <= errs[1] / errs[2] <= 5.0


def test_green_function_is_positive_with_alpha_plus_decay():
    G = radial_green(BALL, 0.1875, 0.0, 2048)
    assert (G.values.values > 0).all()
    assert fit_boundary_exponent(G.values).exponent == pytest.approx(0.75, abs=0.02)
    assert math.isfinite(G.two_sided_constants()["c"])


def test_shell_source_rejected_when_unresolved():
    with pytest.raises(ValueError):
        radial_green(BALL, 0.0, 0.9999, 64)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.5, 3.0))
def test_green_potential_is_monotone_in_the_density(scale):
    g = make_grid(BALL, 512)
    a = green_potential(g, -1.0, lambda r: np.ones_like(r)).potential.values
    b = green_potential(g, -1.0, lambda r: scale * (1 + r)).potential.values
    assert np.all(a > 0)
    assert np.all(b >= scale * a * (1 - 1e-12))


def test_green_potentials_have_zero_trace():
    g = make_grid(BALL, 2048)
    pot = green_potential(g, 0.0, lambda r: (1 - r) ** -1.5)
    assert pot.integrable
    tr = normalized_trace(pot.potential, exponents(0.0))
    assert abs(tr.extrapolated_limit) < 1e-2
    assert np.all(np.diff(tr.normalized_values) < 0)


def test_nonintegrable_density_is_flagged():
    g = make_grid(BALL, 1024)
    pot = green_potential(g, 0.0, lambda r: (1 - r) ** -2.0)
    assert not pot.integrable
    assert pot.warning


def test_halfspace_kernel_residual_is_second_order():
    ratios = martin_residual_study(0.0, 3)["ratios"]
    assert all(abs(r - 4.0) <= 0.5 for r in ratios)


def test_halfspace_kernel_formula():
    pair = exponents(-2.0)
    # radial form (|x'|, x_N) of x = (0.3, 0.4, 0.5)
    rho, xn = 0.5, 0.5
    r = math.sqrt(0.3 ** 2 + 0.4 ** 2 + 0.5 ** 2)
    expected = xn ** pair.alpha_plus * r ** (2 * pair.alpha_minus - 3)
    assert martin_halfspace(-2.0, 3, (rho, xn)) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("mu,dim", [(0.0, 3), (-2.0, 3), (0.1, 2)])
def test_kernel_integrability_threshold(mu, dim):
    qc = critical_q(mu, dim).q_c
    for q in (qc - 0.1, qc, qc + 0.1):
        v = kernel_lq_test(mu, dim, q)
        assert v.agrees, (q, v.verdict)
