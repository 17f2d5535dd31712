"""Hardy constants of radial domains and boundary strips by generalized eigensolves.

The quotient ``int |u'|^2 r^{N-1} / int u^2 d^{-2} r^{N-1}`` is discretized
with continuous piecewise-linear elements whose vertices are the grid nodes
plus the Dirichlet surfaces.  Being conforming, every discrete eigenvalue is
an upper bound for the radial infimum.  A lumped finite-volume weight does not
have this property: near a graded boundary its lattice Hardy constant sits
below 1/4 and the discrete value converges to the wrong number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import _core
from .extrapolation import fit_power_limit
from .geometry import Grid, GridFunction, RadialDomain, interval_grid

QUARTER = 0.25
_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


class HardyRefusal(RuntimeError):
    """Raised when a ground state is requested but ``C_H = 1/4``."""


@dataclass(frozen=True)
class HardyResult:
    constant: float
    eigenfunction: GridFunction = field(repr=False)
    mesh_refinement_history: tuple
    converged: bool
    extrapolated: float
    iterations: int
    label: str = "exact"
    extrapolation_note: str = ""
    components: dict = field(default_factory=dict)

    @property
    def grid(self) -> Grid:
        return self.eigenfunction.grid

    def report(self, boundary_exponent_fit=None) -> dict:
        g = self.grid
        return {
            "domain": g.domain.describe(),
            "n": g.n,
            "gamma": g.grading_power,
            "constant": self.constant,
            "extrapolated": self.extrapolated,
            "converged": self.converged,
            "label": self.label,
            "history": [list(h) for h in self.mesh_refinement_history],
            "components": self.components,
            "boundary_exponent_fit": boundary_exponent_fit,
        }


# ---------------------------------------------------------------------------
# assembly


def _distance(r, points):
    r = np.atleast_1d(np.asarray(r, dtype=float))
    return np.min(np.abs(r[:, None] - np.asarray(points)[None, :]), axis=1)


def _element_mass(dom: RadialDomain, xa: float, xb: float, points, constant: bool) -> np.ndarray:
    """2x2 element matrix of ``int phi_i phi_j r^{N-1} / d^2`` with ``d = min |r - p|``."""
    kinks = [0.5 * (p + q) for p, q in zip(points[:-1], points[1:]) if xa < 0.5 * (p + q) < xb]
    cuts = [xa, *kinks, xb]
    m = np.zeros((2, 2))
    for pa, pb in zip(cuts[:-1], cuts[1:]):
        d0, d1 = _distance([pa, pb], points)
        if min(d0, d1) > 0 and d0 != d1:
            # d is linear on the piece; Gauss in log d copes with strongly graded pieces
            la, lb = math.log(d0), math.log(d1)
            d = np.exp(0.5 * (la + lb) + 0.5 * (lb - la) * _GL_X)
            r = pa + (d - d0) / (d1 - d0) * (pb - pa)
            w = _GL_W * 0.5 * abs(lb - la) * d * abs((pb - pa) / (d1 - d0))
        else:
            r = 0.5 * (pa + pb) + 0.5 * (pb - pa) * _GL_X
            w = 0.5 * (pb - pa) * _GL_W
            d = _distance(r, points)
        if constant:
            phi = np.vstack([np.zeros_like(r), np.ones_like(r)])
        else:
            phi = np.vstack([(xb - r) / (xb - xa), (r - xa) / (xb - xa)])
        # on a boundary element only the hat vanishing at d = 0 is assembled,
        # and phi^2/d^2 is smooth for it; plain Gauss nodes never hit d = 0
        ww = w * dom.area_factor(r) / d ** 2
        m += phi @ (ww[:, None] * phi.T)
    return m


def hardy_forms(grid: Grid, points) -> tuple:
    """Tridiagonal stiffness ``A`` and weighted mass ``B`` as (sub, diag) pairs.

    ``points`` are the radii whose distance enters the weight.
    """
    dom = grid.domain
    points = sorted(float(p) for p in points)
    n = grid.n
    lo = 0.0 if grid.lo_end == "center" else grid.lo
    verts = np.concatenate([[lo], grid.nodes, [grid.hi]])
    a_d, a_o = np.zeros(n), np.zeros(n - 1)
    b_d, b_o = np.zeros(n), np.zeros(n - 1)
    for e in range(n + 1):
        xa, xb = float(verts[e]), float(verts[e + 1])
        center = e == 0 and grid.lo_end == "center"
        m = _element_mass(dom, xa, xb, points, center)
        k = 0.0 if center else float(dom.shell_volume(xa, xb)) / (xb - xa) ** 2
        ia, ib = e - 1, e
        if ia >= 0:
            a_d[ia] += k
            b_d[ia] += m[0, 0]
        if ib < n:
            a_d[ib] += k
            b_d[ib] += m[1, 1]
        if ia >= 0 and ib < n:
            a_o[ia] -= k
            b_o[ia] += m[0, 1]
    return (a_o, a_d), (b_o, b_d)


# ---------------------------------------------------------------------------
# eigensolver


def _matvec(o, d, x):
    return _core.tridiag_matvec(o, d, o, x)


def count_below(forms, sigma: float) -> int:
    """Number of generalized eigenvalues below ``sigma`` (Sylvester inertia of ``A - sigma B``)."""
    (a_o, a_d), (b_o, b_d) = forms
    piv, _ = _core.tridiag_factor(a_o - sigma * b_o, a_d - sigma * b_d, a_o - sigma * b_o)
    return int(np.count_nonzero(np.asarray(piv) < 0))


def smallest_eigenpair(forms, tol: float = 1e-12, maxiter: int = 200):
    """Lowest eigenpair of ``A x = lam B x`` by shifted inverse iteration.

    Plain inverse iteration locks onto the ground state, then Rayleigh-quotient
    shifts finish it; an inertia count confirms nothing lies below.
    """
    (a_o, a_d), (b_o, b_d) = forms
    n = len(a_d)
    x = np.ones(n)
    lam = _matvec(a_o, a_d, x) @ x / (_matvec(b_o, b_d, x) @ x)
    sigma = 0.0
    converged = False
    it = 0
    for it in range(1, maxiter + 1):
        o, d = a_o - sigma * b_o, a_d - sigma * b_d
        piv, mul = _core.tridiag_factor(o, d, o)
        y = _core.tridiag_factored_solve(o, piv, mul, _matvec(b_o, b_d, x))
        y = y / np.max(np.abs(y))
        if y[np.argmax(np.abs(y))] < 0:
            y = -y
        new = _matvec(a_o, a_d, y) @ y / (_matvec(b_o, b_d, y) @ y)
        step = abs(new - lam)
        x, lam = y, new
        if step <= tol * abs(lam):
            converged = True
            break
        if step < 1e-4 * abs(lam) and np.all(x > 0):
            sigma = lam * (1.0 - 1e-10)
    if converged:
        converged = count_below(forms, lam * (1.0 - 1e-8)) == 0
    return lam, x, it, converged


def _solve_on(grid: Grid, points):
    forms = hardy_forms(grid, points)
    lam, x, it, ok = smallest_eigenpair(forms)
    return lam, x, it, ok


# ---------------------------------------------------------------------------
# extrapolation


def _threshold_fit(levels, values):
    """Fit ``lam = L + A / (log_levels + c)^2`` through three points."""
    s = np.array(levels, dtype=float)
    v = np.array(values, dtype=float)

    def mismatch(c):
        x = 1.0 / (s + c) ** 2
        slope = (v[1] - v[0]) / (x[1] - x[0])
        return v[2] - v[1] - slope * (x[2] - x[1])

    cs = np.linspace(-0.9 * s[0], 6.0 * s[0], 1401)
    ms = np.array([mismatch(c) for c in cs])
    roots = [brentq(mismatch, cs[i], cs[i + 1]) for i in range(len(cs) - 1)
             if np.isfinite(ms[i]) and np.isfinite(ms[i + 1]) and ms[i] * ms[i + 1] < 0]
    if not roots:
        return math.nan, "no consistent log-scale fit"
    c = roots[0]
    x = 1.0 / (s + c) ** 2
    slope = (v[1] - v[0]) / (x[1] - x[0])
    return float(v[0] - slope * x[0]), f"log-scale fit, offset {c:.3g}"


def extrapolate_constant(history, gamma: float):
    """Limit of discrete Hardy values on meshes ``n/4, n/2, n``.

    Below 1/4 the ground state is a true eigenfunction and the error is
    algebraic in ``h``.  At the threshold the minimizing sequence spreads over
    ``log(1/delta_min) ~ gamma log n`` scales and the error decays only like
    ``(gamma log n + c)^-2``.
    """
    ns = [h[0] for h in history]
    vals = [h[1] for h in history]
    if vals[-1] < QUARTER:
        fit = fit_power_limit(1.0 / np.asarray(ns, dtype=float), vals, rtol=1e-2)
        if fit.converged and fit.limit <= vals[-1]:
            return fit.limit, True, f"algebraic fit, rate {fit.rate:.3g}"
        return vals[-1], False, "finest value (upper bound); " + (fit.note or "fit rejected")
    limit, note = _threshold_fit([gamma * math.log(n) for n in ns], vals)
    ok = math.isfinite(limit) and limit <= vals[-1]
    return (limit if ok else vals[-1]), ok, note


def _ladder(grid: Grid, levels: int = 3):
    out = []
    for k in range(levels - 1, 0, -1):
        m = grid.n >> k
        if m < 16:
            raise ValueError(f"grid too coarse for {levels}-level extrapolation (n={grid.n})")
        out.append(interval_grid(grid.domain, grid.lo, grid.hi, m, grid.grading_power,
                                 grid.lo_end, grid.hi_end))
    return out + [grid]


def _eigen_study(grid: Grid, points, label: str) -> HardyResult:
    history = []
    ok_all = True
    lam = x = it = None
    for g in _ladder(grid):
        lam, x, it, ok = _solve_on(g, points)
        history.append((g.n, float(lam)))
        ok_all = ok_all and ok
    limit, fit_ok, note = extrapolate_constant(history, grid.grading_power)
    phi = GridFunction(grid, x / np.max(x))
    return HardyResult(float(lam), phi, tuple(history), bool(ok_all and fit_ok), float(limit), it,
                       label, note)


def _boundary_points(domain: RadialDomain) -> list:
    return [c.r for c in domain.components]


def hardy_constant(domain: RadialDomain, grid: Grid) -> HardyResult:
    """Radial Hardy constant of ``domain``; exact for balls and slabs, an upper bound otherwise."""
    if grid.domain != domain:
        raise ValueError("grid belongs to a different domain")
    label = "radial upper bound" if domain.kind == "annulus" else "exact"
    return _eigen_study(grid, _boundary_points(domain), label)


@dataclass(frozen=True)
class LocalHardyResult:
    """``C_H^{dOmega}(Omega_rho)`` (distance to the boundary) and ``C_H(Omega_rho)``."""

    rho: float
    boundary_weighted: HardyResult
    strip_weighted: HardyResult
    per_component: dict

    @property
    def constant(self) -> float:
        return self.boundary_weighted.extrapolated

    def report(self) -> dict:
        return {"rho": self.rho,
                "C_H_boundary": self.boundary_weighted.extrapolated,
                "C_H_strip": self.strip_weighted.extrapolated,
                "converged": self.boundary_weighted.converged and self.strip_weighted.converged,
                "components": self.per_component}


def local_hardy_constant(domain: RadialDomain, rho: float, grid: Grid | None = None,
                         n: int = 4096) -> LocalHardyResult:
    """Hardy constants of the boundary strip ``{delta < rho}``.

    The strip of an annulus has two components; the constant of a disjoint
    union is the smaller one.  ``grid`` fixes ``n`` and the grading only.
    """
    if not 0 < rho < 0.5 * domain.inradius:
        raise ValueError(f"need 0 < rho < inradius/2 = {0.5 * domain.inradius:g}")
    if grid is not None:
        n, gamma = grid.n, grid.grading_power
    else:
        gamma = 2.0
    per = {}
    best = None
    for comp in domain.components:
        inner = float(domain.radius_at(comp, rho))
        lo, hi = sorted((comp.r, inner))
        g = interval_grid(domain, lo, hi, n, gamma)
        res_b = _eigen_study(g, [comp.r], "exact")
        res_s = _eigen_study(g, sorted([comp.r, inner]), "exact")
        per[comp.name] = {"C_H_boundary": res_b.extrapolated, "C_H_strip": res_s.extrapolated,
                          "discrete_boundary": res_b.constant, "discrete_strip": res_s.constant}
        if best is None or res_b.extrapolated < best[0].extrapolated:
            best = (res_b, res_s)
    return LocalHardyResult(float(rho), best[0], best[1], per)


def ground_state(domain: RadialDomain, grid: Grid, margin: float = 1e-3):
    """Positive ground state ``phi_H`` (sup 1) when ``C_H < 1/4``.

    Returns ``(phi, result)``.  A constant equal to 1/4 within ``margin`` has
    no ground state in general, so the request is refused.
    """
    res = hardy_constant(domain, grid)
    if not res.extrapolated < QUARTER - margin:
        raise HardyRefusal(
            f"C_H = {res.extrapolated:.6f} equals 1/4 within {margin:g}: a positive "
            "superharmonic function exists for every mu <= 1/4 but no ground state is guaranteed")
    if np.any(res.eigenfunction.values <= 0):
        raise HardyRefusal("discrete eigenfunction changes sign; refine the grid")
    return res.eigenfunction, res


def ground_state_exponent(c_h: float) -> float:
    """``a_+ = 1/2 + sqrt(1/4 - C_H)``, the boundary exponent of ``phi_H``."""
    return 0.5 + math.sqrt(max(QUARTER - c_h, 0.0))
