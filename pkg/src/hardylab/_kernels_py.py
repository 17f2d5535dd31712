"""NumPy/SciPy versions of the tridiagonal kernels.

Same call signatures as the compiled module; used when the extension is not
built or when ``HARDYLAB_PURE_PYTHON=1``.
"""
import numpy as np
from scipy.linalg import solve_banded


def _bands(sub, diag, sup):
    n = len(diag)
    ab = np.zeros((3, n))
    ab[0, 1:] = sup
    ab[1] = diag
    ab[2, :-1] = sub
    return ab


def tridiag_factor(sub, diag, sup):
    diag = np.asarray(diag, dtype=float)
    sub = np.asarray(sub, dtype=float)
    sup = np.asarray(sup, dtype=float)
    n = len(diag)
    piv = np.empty(n)
    mul = np.zeros(n)
    piv[0] = diag[0]
    for i in range(1, n):
        mul[i] = sub[i - 1] / piv[i - 1]
        piv[i] = diag[i] - mul[i] * sup[i - 1]
    return piv, mul


def tridiag_factored_solve(sup, piv, mul, rhs):
    # lower bidiagonal forward pass, then upper bidiagonal back pass
    n = len(piv)
    lower = np.zeros((2, n))
    lower[0] = 1.0
    lower[1, :-1] = mul[1:]
    y = solve_banded((1, 0), lower, np.asarray(rhs, dtype=float))
    upper = np.zeros((2, n))
    upper[0, 1:] = sup
    upper[1] = piv
    return solve_banded((0, 1), upper, y)


def tridiag_solve(sub, diag, sup, rhs):
    return solve_banded((1, 1), _bands(sub, diag, sup), np.asarray(rhs, dtype=float))


def tridiag_matvec(sub, diag, sup, x):
    x = np.asarray(x, dtype=float)
    y = np.asarray(diag) * x
    y[1:] += np.asarray(sub) * x[:-1]
    y[:-1] += np.asarray(sup) * x[1:]
    return y


def monotone_iterate(sub, diag, sup, vol, bc, lam, q, w0, lower, tol, maxiter, slack):
    vol = np.asarray(vol, dtype=float)
    bc = np.asarray(bc, dtype=float)
    lower = np.asarray(lower, dtype=float)
    d2 = np.asarray(diag, dtype=float) + lam * vol
    piv, mul = tridiag_factor(sub, d2, sup)
    w = np.array(w0, dtype=float)
    inc = 0.0
    it = 0
    while it < maxiter:
        it += 1
        rhs = vol * (lam * w - np.abs(w) ** (q - 1.0) * w) + bc
        wn = tridiag_factored_solve(sup, piv, mul, rhs)
        up = wn > w + slack * (np.abs(w) + 1e-300)
        down = wn < lower - slack * (np.abs(lower) + 1e-300)
        if up.any() or down.any():
            i_up = int(np.argmax(up)) if up.any() else len(w)
            i_dn = int(np.argmax(down)) if down.any() else len(w)
            kind, node = (1, i_up) if i_up <= i_dn else (2, i_dn)
            inc = float(np.max(np.abs(wn - w)))
            return wn, it, inc, it, node, kind
        inc = float(np.max(np.abs(wn - w)))
        scale = float(np.max(np.abs(wn)))
        gap = float(np.max(wn - lower))
        w = wn
        if inc <= tol * (scale + 1e-300) or gap <= slack * (scale + 1e-300):
            break
    return w, it, inc, -1, -1, 0
