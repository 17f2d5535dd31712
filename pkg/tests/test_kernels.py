import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardylab import _core, _kernels_py
from hardylab.geometry import RadialDomain, make_grid
from hardylab.operator import DiscreteOperator

compiled = pytest.importorskip("hardylab._kernels")


def _mmatrix(n, seed):
    rng = np.random.default_rng(seed)
    off = -rng.uniform(0.1, 1.0, n - 1)
    diag = rng.uniform(0.01, 1.0, n)
    diag[:-1] -= off
    diag[1:] -= off
    return off, diag, off.copy()


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 300), st.integers(0, 10_000))
def test_backends_agree_on_solve_and_matvec(n, seed):
    sub, diag, sup = _mmatrix(n, seed)
    rhs = np.random.default_rng(seed + 1).normal(size=n)
    x_c = np.asarray(compiled.tridiag_solve(sub, diag, sup, rhs))
    x_p = _kernels_py.tridiag_solve(sub, diag, sup, rhs)
    np.testing.assert_allclose(x_c, x_p, rtol=1e-10, atol=1e-12 * np.max(np.abs(x_p)))
    back = np.asarray(compiled.tridiag_matvec(sub, diag, sup, x_c))
    np.testing.assert_allclose(back, rhs, atol=1e-9 * np.max(np.abs(rhs)) * n)


@settings(max_examples=20, deadline=None)
@given(st.integers(8, 200), st.integers(0, 10_000), st.floats(1.2, 4.0))
def test_backends_agree_on_monotone_sweep(n, seed, q):
    sub, diag, sup = _mmatrix(n, seed)
    vol = np.full(n, 1.0 / n)
    bc = np.zeros(n)
    bc[0] = bc[-1] = 1.0
    top = 2.0 * max(1.0, float(np.max(np.abs(np.linalg.solve(
        np.diag(diag) + np.diag(sub, -1) + np.diag(sup, 1), bc)))))
    lam = 1.1 * q * top ** (q - 1)
    args = (sub, diag, sup, vol, bc, lam, q, np.full(n, top), np.zeros(n), 1e-12, 100_000, 1e-9)
    out_c = compiled.monotone_iterate(*args)
    out_p = _kernels_py.monotone_iterate(*args)
    assert out_c[5] == out_p[5] == 0
    np.testing.assert_allclose(np.asarray(out_c[0]), out_p[0], rtol=1e-8)


def test_operator_is_symmetric_m_matrix():
    op = DiscreteOperator(make_grid(RadialDomain.ball(1.0, 3), 256), -1.0)
    assert np.all(op.sub < 0)
    assert np.all(op.diag > 0)
    np.testing.assert_array_equal(op.sub, op.sup)


def test_backend_flag_is_known():
    assert _core.BACKEND in ("cython", "python")
