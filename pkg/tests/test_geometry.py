import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardylab.exponents import exponents
from hardylab.geometry import (GridFunction, RadialDomain, delta, make_grid, normalized_trace,
                               region_grids, sphere_area, surface_integral, weighted_lq_norm)

BALL = RadialDomain.ball(1.0, 3)


def test_parse_and_describe():
    assert RadialDomain.parse("ball:2", 3) == RadialDomain.ball(2.0, 3)
    ann = RadialDomain.parse("annulus:0.5,1", 2)
    assert ann.describe() == {"kind": "annulus", "dim": 2, "inner": 0.5, "outer": 1.0}
    assert RadialDomain.parse("slab", 2).hi == 1.0
    with pytest.raises(ValueError):
        RadialDomain.parse("torus:1", 3)
    with pytest.raises(ValueError):
        RadialDomain.annulus(1.0, 0.5, 3)


def test_delta_vectorized_and_bounded():
    ann = RadialDomain.annulus(0.5, 1.0, 3)
    np.testing.assert_allclose(delta(ann, [0.5, 0.6, 0.75, 1.0]), [0, 0.1, 0.25, 0])
    with pytest.raises(ValueError):
        delta(ann, 0.2)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["ball:1", "annulus:0.3,1", "slab:1"]), st.integers(2, 4),
       st.integers(32, 400), st.floats(1.0, 4.0))
def test_cell_volumes_tile_the_domain(text, dim, n, gamma):
    dom = RadialDomain.parse(text, dim)
    g = make_grid(dom, n, gamma)
    assert np.all(np.diff(g.nodes) > 0)
    assert np.sum(g.volumes) == pytest.approx(float(dom.shell_volume(dom.lo, dom.hi)), rel=1e-12)


def test_surface_integral_of_one_is_area():
    u = GridFunction.from_callable(make_grid(BALL, 512), lambda r: np.ones_like(r))
    s = surface_integral(u, 0.1)
    assert s.total == pytest.approx(sphere_area(3) * 0.9 ** 2, rel=1e-12)


@pytest.mark.parametrize("mu", [-2.0, 0.0, 0.1875])
def test_trace_of_boundary_power_is_area(mu):
    pair = exponents(mu)
    u = GridFunction.from_callable(make_grid(BALL, 2048), lambda r: (1 - r) ** pair.alpha_minus)
    tr = normalized_trace(u, pair)
    assert tr.converged
    assert tr.extrapolated_limit == pytest.approx(4 * math.pi, rel=2e-3)


def test_trace_of_alpha_plus_power_vanishes():
    pair = exponents(0.0)
    u = GridFunction.from_callable(make_grid(BALL, 2048), lambda r: (1 - r) ** pair.alpha_plus)
    tr = normalized_trace(u, pair)
    assert abs(tr.extrapolated_limit) < 1e-2


def test_weighted_norm_converges_and_diverges():
    g = make_grid(BALL, 1024)
    ok = weighted_lq_norm(lambda r: np.ones_like(r), 1.0, -0.5, grid=g)
    assert ok.converged
    exact = 4 * math.pi * (1 / 0.5 - 2 / 1.5 + 1 / 2.5)
    assert ok.value == pytest.approx(exact, rel=1e-2)
    bad = weighted_lq_norm(lambda r: np.ones_like(r), 1.0, -1.0, grid=g)
    assert not bad.converged


def test_region_grids_split_per_component():
    ann = RadialDomain.annulus(0.5, 1.0, 3)
    grids = region_grids(ann, 0.0, 0.1, 128)
    assert len(grids) == 2
    assert region_grids(ann, 0.1, 10.0, 128)[0].n == 128


def test_csv_roundtrip(tmp_path):
    g = make_grid(BALL, 64)
    u = GridFunction.from_callable(g, lambda r: np.cos(r))
    u.to_csv(tmp_path / "u.csv")
    v = GridFunction.read_csv(tmp_path / "u.csv", g)
    np.testing.assert_array_equal(u.values, v.values)
