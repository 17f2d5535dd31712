import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hardylab.exponents import critical_q
from hardylab.geometry import GridFunction, RadialDomain
from hardylab.nonlinear import (NonlinearProblem, NonuniquenessRefusal, OrderingViolation, Region,
                                SolutionArchive, boundary_layer_constant, classical_ko_constant,
                                keller_osserman_check, maximal_solution, monotone_iteration,
                                nonuniqueness_demo, riesz_criterion_check, solve_dirichlet,
                                solve_strip, solve_with_trace)

BALL = RadialDomain.ball(1.0, 3)
DOMAINS = [BALL, RadialDomain.annulus(0.3, 1.0, 2), RadialDomain.annulus(0.5, 1.0, 3)]

mus = st.floats(-3.0, 0.24)
qs = st.floats(1.2, 4.0)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(DOMAINS), mus, qs, st.floats(0, 3), st.floats(0, 3), st.floats(0, 3), st.floats(0, 3))
def test_comparison_principle(dom, mu, q, a, b, da, db):
    prob = NonlinearProblem(dom, mu, q)
    region = Region(0.05 * dom.inradius)
    u = solve_dirichlet(prob, region, (a, b), n=256).solution.values
    v = solve_dirichlet(prob, region, (a + da, b + db), n=256).solution.values
    assert np.all(u <= v * (1 + 1e-12) + 1e-300)


@settings(max_examples=20, deadline=None)
@given(mus, qs, st.floats(0.1, 5.0))
def test_monotone_iteration_stays_in_the_sandwich(mu, q, data):
    prob = NonlinearProblem(BALL, mu, q)
    newton = solve_dirichlet(prob, Region(0.05), data, n=256)
    grid = newton.solution.grid
    top = max(data, (max(mu, 0.0) / 0.05 ** 2) ** (1 / (q - 1))) * 2.0
    rep = monotone_iteration(prob, GridFunction(grid, np.zeros(grid.n)), GridFunction(grid, np.full(grid.n, top)),
                             boundary_values=data)
    assert rep.invariants["sandwich"]
    np.testing.assert_allclose(rep.solution.values, newton.solution.values, rtol=1e-8)


def test_unordered_inputs_rejected():
    prob = NonlinearProblem(BALL, 0.0, 2.0)
    grid = Region(0.05).grid(BALL, 64, 2.0)
    with pytest.raises(OrderingViolation):
        monotone_iteration(prob, GridFunction(grid, np.full(grid.n, 2.0)), GridFunction(grid, np.ones(grid.n)))


def test_restarts_agree():
    rep = solve_dirichlet(NonlinearProblem(BALL, 0.2, 3.0), Region(0.02), 10.0, n=512)
    assert rep.invariants["unique_across_starts"]


@settings(max_examples=8, deadline=None)
@given(st.floats(-2.0, 0.2), st.floats(1.2, 2.5), st.floats(0.2, 2.0), st.floats(1.1, 3.0))
def test_moderate_solutions_increase_with_the_trace_and_stay_below_h_c(mu, q, c, factor):
    crit = critical_q(mu, 3)
    assume(crit.q_star.is_infinite or q < crit.q_star.value - 0.3)
    small = solve_with_trace(NonlinearProblem(BALL, mu, q, trace_mass=c), n=1024)
    large = solve_with_trace(NonlinearProblem(BALL, mu, q, trace_mass=c * factor), n=1024)
    for rep in (small, large):
        assert rep.invariants["below_h_c"]
        # against the continuous h_c only up to the discretization error of h_c itself
        assert rep.invariants["h_c_excess"] <= rep.invariants["identity_error"]
    assert small.invariants["nonincreasing_in_m"]
    assert np.all(small.solution.values <= large.solution.values * (1 + 1e-9))


@settings(max_examples=15, deadline=None)
@given(st.floats(-3.0, -0.3), st.floats(1.3, 8.0))
def test_moderate_trace_and_lq_criteria_agree(mu, q):
    crit = critical_q(mu, 3)
    assume(abs(q - crit.q_star.value) > 0.05)
    rep = solve_with_trace(NonlinearProblem(BALL, mu, q, trace_mass=1.0), n=4096)
    below = q < crit.q_star.value
    assert rep.invariants["kernel_in_Lq"] == below
    if not below:
        assert rep.status == "trace_loss"
    else:
        # below q* the trace is never declared lost
        assert rep.status in ("solved", "unresolved")
        if rep.invariants["trace_correction_power"] >= 0.75:
            assert rep.success and rep.trace.converged
        if rep.trace.converged:
            assert rep.trace.extrapolated_limit == pytest.approx(4 * math.pi, rel=0.05)


def test_moderate_trace_anchor():
    rep = solve_with_trace(NonlinearProblem(BALL, 0.0, 1.5, trace_mass=1.0), n=2048)
    assert rep.trace.extrapolated_limit == pytest.approx(4 * math.pi, rel=0.02)
    assert rep.invariants["identity_error"] < 5e-3


def test_zero_trace_gives_zero():
    rep = solve_with_trace(NonlinearProblem(BALL, 0.0, 2.0, trace_mass=0.0), n=512)
    assert np.max(np.abs(rep.solution.values)) == 0.0


@pytest.mark.parametrize("mu", [-2.0, 0.0, 0.1875])
def test_strip_solution_decays_like_alpha_plus(mu):
    rep = solve_strip(NonlinearProblem(BALL, mu, 2.0, inner_data=1.0), n=2048)
    assert rep.invariants["boundary_exponent"] == pytest.approx(rep.invariants["alpha_plus"], abs=0.02)


def test_strip_requires_zero_trace_and_inner_data():
    with pytest.raises(ValueError):
        solve_strip(NonlinearProblem(BALL, 0.0, 2.0, trace_mass=1.0, inner_data=1.0))
    with pytest.raises(ValueError):
        solve_strip(NonlinearProblem(BALL, 0.0, 2.0))


def test_maximal_solution_dominates_archive_and_matches_layer():
    archive = SolutionArchive()
    prob = NonlinearProblem(BALL, 0.0, 3.0)
    solve_with_trace(NonlinearProblem(BALL, 0.0, 3.0, trace_mass=2.0), n=2048, archive=archive)
    rep = maximal_solution(prob, n=2048, archive=archive)
    assert rep.invariants["saturated"]
    assert rep.invariants["dominates_archive"]
    assert rep.invariants["boundary_layer_constant"] == pytest.approx(math.sqrt(2), rel=0.05)
    assert rep.ko_constant <= rep.invariants["classical_ko_constant"] * 1.001


def test_keller_osserman_check_on_a_subsolution():
    rep = maximal_solution(NonlinearProblem(BALL, -2.0, 2.0), n=1024)
    cut = rep.notes["cut"]
    chk = keller_osserman_check(rep.solution, 2.0, -2.0, offset=cut, min_distance=rep.notes["core"])
    assert chk.subsolution
    assert chk.distance == "truncated"
    assert chk.constant == pytest.approx(rep.ko_constant, rel=1e-6)


def test_one_dimensional_constants():
    assert boundary_layer_constant(0.0, 3.0) == pytest.approx(math.sqrt(2))
    assert boundary_layer_constant(0.0, 2.0) == pytest.approx(6.0)
    assert classical_ko_constant(3, 3.0) == pytest.approx(2.5748, rel=1e-3)


def test_nonuniqueness_on_small_hole_annulus():
    res = nonuniqueness_demo(RadialDomain.annulus(0.001, 1.0, 2), 2.0, n=1024)
    c = res.certificate
    assert c["two_solutions"]
    assert c["min_ratio_to_phi"] >= c["tau"] > 0
    assert abs(c["trace_limit"]) < 0.02


def test_nonuniqueness_refused_when_hardy_bound_is_one_quarter():
    with pytest.raises(NonuniquenessRefusal):
        nonuniqueness_demo(RadialDomain.annulus(0.5, 1.0, 3), 2.0, n=512)
    with pytest.raises(ValueError):
        nonuniqueness_demo(BALL, 2.0)


@pytest.mark.parametrize("mu,dim,q,profile,finite", [
    (0.0, 3, 1.5, "constant", True),
    (0.0, 3, 2.5, "dirac", False),
    (0.0, 3, 1.9, "dirac", True),
])
def test_riesz_criterion(mu, dim, q, profile, finite):
    chk = riesz_criterion_check(mu, dim, q, profile)
    assert chk.sufficient_holds == finite
    if profile == "dirac":
        assert chk.kernel_lq_agrees


def test_problem_validation():
    with pytest.raises(ValueError):
        NonlinearProblem(BALL, 0.0, 1.0)
    with pytest.raises(ValueError):
        NonlinearProblem(BALL, 0.0, 2.0, trace_mass=-1.0)
    with pytest.raises(ValueError):
        Region(0.0).grid(BALL, 64, 2.0)


def test_archive_seals():
    archive = SolutionArchive()
    prob = NonlinearProblem(BALL, 0.0, 2.0)
    rep = solve_dirichlet(prob, Region(0.1), 1.0, n=64)
    archive.add(prob, "a", rep)
    archive.seal()
    with pytest.raises(RuntimeError):
        archive.add(prob, "b", rep)
    assert len(archive) == 1
