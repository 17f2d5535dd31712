import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardylab.exponents import DomainError, Regime, classify, critical_q, exponents

mus = st.floats(min_value=-1e3, max_value=0.2499999, allow_nan=False)
working_mus = st.floats(min_value=-10.0, max_value=0.2499999, allow_nan=False)
dims = st.integers(min_value=2, max_value=8)


@given(mus)
def test_sum_and_product_within_four_ulp(mu):
    p = exponents(mu)
    # one rounding of alpha_+ carries its own ulp into the sum
    assert abs(p.alpha_plus + p.alpha_minus - 1.0) <= 4 * np.spacing(max(1.0, p.alpha_plus))
    if mu != 0:
        assert abs(p.alpha_plus * p.alpha_minus - mu) <= 4 * np.spacing(abs(mu)) * max(1.0, p.alpha_plus)


@given(mus)
def test_exponents_are_ordered_around_one_half(mu):
    p = exponents(mu)
    assert p.alpha_minus < 0.5 < p.alpha_plus
    assert p.gap == pytest.approx(2.0 * math.sqrt(0.25 - mu))


@given(working_mus, dims)
def test_q_c_matches_both_forms(mu, dim):
    crit = critical_q(mu, dim)
    p = crit.pair
    exact = float((dim + Fraction(p.alpha_plus)) / (dim - 1 - Fraction(p.alpha_minus)))
    assert abs(crit.q_c - exact) <= np.spacing(exact)
    assert crit.q_c > 1


@given(mus, dims)
def test_q_star_is_infinite_exactly_for_nonnegative_mu(mu, dim):
    crit = critical_q(mu, dim)
    if mu < -1e-300:
        assert not crit.q_star.is_infinite
    assert crit.q_star.is_infinite or mu < 0
    if not crit.q_star.is_infinite:
        assert crit.q_star.value == pytest.approx(1 - 2 / crit.pair.alpha_minus)
        assert crit.q_star.value > crit.q_c


@given(mus, dims, st.floats(min_value=1.01, max_value=20.0))
def test_classification_matches_thresholds(mu, dim, q):
    crit = critical_q(mu, dim)
    regime = classify(mu, dim, q).regime
    if crit.q_star.exceeded_by(q):
        assert regime is Regime.NO_NONTRIVIAL
    elif q < crit.q_c:
        assert regime is Regime.ALL_MEASURES
    else:
        assert regime is Regime.DIRAC_EXCLUDED


def test_known_values():
    crit = critical_q(-2.0, 3)
    assert (crit.pair.alpha_plus, crit.pair.alpha_minus) == (2.0, -1.0)
    assert crit.q_c == pytest.approx(5.0 / 3.0, abs=1e-15)
    assert crit.q_star.value == 3.0
    assert critical_q(0.0, 3).q_c == 2.0


@pytest.mark.parametrize("mu", [0.25, 0.3, math.inf, math.nan])
def test_mu_outside_range_rejected(mu):
    with pytest.raises(DomainError):
        exponents(mu)


def test_bad_dimension_and_q_rejected():
    with pytest.raises(DomainError):
        critical_q(0.0, 1)
    with pytest.raises(DomainError):
        classify(0.0, 3, 1.0)


def test_sum_within_four_ulp_of_one_on_the_working_range():
    rng = np.random.default_rng(1)
    for mu in rng.uniform(-10, 0.25, 2000):
        p = exponents(float(mu))
        assert abs(p.alpha_plus + p.alpha_minus - 1) <= 4 * np.spacing(1.0)
