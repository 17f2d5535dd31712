"""Solvers and verifiers for ``-L_mu u + |u|^{q-1} u = 0`` on radial domains.

Every problem is posed on a contiguous block of nodes of one finite-volume
grid, with Dirichlet values either on the grid's end surfaces or at the
neighbouring nodes outside the block.  Restricting one global system this way
keeps the rows of different sub-problems identical, so discrete comparison
arguments (nested truncations, glued super-solutions) hold exactly and not
only up to interpolation error.
"""
from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.linalg import eigh_tridiagonal
from scipy.special import hyp2f1

from . import _core
from .extrapolation import fit_power_limit, iterated_aitken
from .exponents import ExponentPair, classify, exponents
from .geometry import (Grid, GridFunction, RadialDomain, TraceEstimate, delta, make_grid,
                       normalized_trace, region_grids, surface_integral,
                       weighted_lq_norm)
from .hardy import QUARTER, hardy_constant
from .linear import fit_boundary_exponent, harmonic_profile, kernel_lq_test
from .operator import DiscreteOperator

MIN_TRACE_POWER = 0.35
NEWTON_TOL = 1e-11
ARMIJO = 1e-4


class SolverFailure(RuntimeError):
    """A nonlinear solve did not reach its tolerance."""

    def __init__(self, message: str, history=()):
        super().__init__(message)
        self.history = tuple(history)


class OrderingViolation(SolverFailure):
    """Monotone iteration left the order interval ``[sub, super]``."""

    def __init__(self, message: str, node: int, iteration: int, history=()):
        super().__init__(message, history)
        self.node = node
        self.iteration = iteration


class NonuniquenessRefusal(RuntimeError):
    """The Hardy constant is too close to 1/4 for the non-uniqueness construction."""


# ---------------------------------------------------------------------------
# problem and report types


@dataclass(frozen=True)
class NonlinearProblem:
    """``-L_mu u + |u|^{q-1}u = 0`` with trace ``c dS`` on every boundary component."""

    domain: RadialDomain
    mu: float
    q: float
    trace_mass: float = 0.0
    inner_data: float | None = None

    def __post_init__(self):
        exponents(self.mu)
        if not self.q > 1:
            raise ValueError(f"q must exceed 1, got {self.q!r}")
        if self.trace_mass < 0:
            raise ValueError("trace mass must be nonnegative")

    @property
    def pair(self) -> ExponentPair:
        return exponents(self.mu)

    @property
    def beta(self) -> float:
        """Keller-Osserman exponent ``2/(q-1)``."""
        return 2.0 / (self.q - 1.0)

    def key(self) -> tuple:
        return (self.domain, float(self.mu), float(self.q))

    def describe(self) -> dict:
        return {"domain": self.domain.describe(), "mu": self.mu, "q": self.q,
                "trace_mass": self.trace_mass, "inner_data": self.inner_data}


@dataclass(frozen=True)
class SolveReport:
    solution: GridFunction = field(repr=False)
    iterations: int
    final_residual: float
    ordering_certificate: bool
    trace: TraceEstimate | None
    ko_constant: float
    energy: float
    status: str = "solved"
    residual_history: tuple = ()
    invariants: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.status == "solved"

    def as_dict(self) -> dict:
        g = self.solution.grid
        return {
            "status": self.status,
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "ordering_certificate": self.ordering_certificate,
            "trace": None if self.trace is None else self.trace.as_dict(),
            "ko_constant": self.ko_constant,
            "energy": self.energy,
            "mesh": {"n": g.n, "gamma": g.grading_power, "lo": g.lo, "hi": g.hi},
            "residual_history": list(self.residual_history),
            "invariants": _jsonable(self.invariants),
            "notes": _jsonable(self.notes),
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.as_dict(), fh, indent=2, sort_keys=True)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


class SolutionArchive:
    """Per-run library of solutions, keyed by problem, for maximality and ordering checks.

    Writes happen under a lock until :meth:`seal`; afterwards the archive is
    read-only and safe to share between threads.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._items: dict = {}
        self._sealed = False

    def add(self, problem: NonlinearProblem, label: str, report: SolveReport) -> None:
        with self._lock:
            if self._sealed:
                raise RuntimeError("archive is sealed")
            self._items.setdefault(problem.key(), []).append((label, report))

    def seal(self) -> None:
        with self._lock:
            self._sealed = True

    @property
    def sealed(self) -> bool:
        return self._sealed

    def solutions(self, problem: NonlinearProblem) -> list:
        with self._lock:
            return list(self._items.get(problem.key(), []))

    def __len__(self) -> int:
        with self._lock:
            return sum(len(v) for v in self._items.values())

    def dominated_by(self, problem: NonlinearProblem, upper: GridFunction, rtol: float = 1e-8):
        """Labels of archived solutions exceeding ``upper`` somewhere (by more than ``rtol``)."""
        bad = []
        for label, rep in self.solutions(problem):
            u = rep.solution
            if u is upper:
                continue
            r = u.r
            inside = (r >= upper.grid.nodes[0]) & (r <= upper.grid.nodes[-1])
            if not np.any(inside):
                continue
            top = upper.interp(r[inside])
            if np.any(u.values[inside] > top + rtol * np.abs(top) + 1e-300):
                bad.append(label)
        return bad


# ---------------------------------------------------------------------------
# restricted discrete systems


@dataclass(frozen=True, eq=False)
class _System:
    """Rows ``i0..i1-1`` of ``S u + V |u|^{q-1}u = b`` with the outside values moved to ``b``."""

    grid: Grid
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    vol: np.ndarray
    bc: np.ndarray
    q: float

    @classmethod
    def build(cls, op: DiscreteOperator, q: float, lo_value: float = 0.0, hi_value: float = 0.0,
              span: tuple | None = None) -> "_System":
        """``lo_value``/``hi_value`` sit on the end surface, or at the node just outside ``span``."""
        n = op.grid.n
        i0, i1 = (0, n) if span is None else span
        if not 0 <= i0 < i1 <= n or i1 - i0 < 3:
            raise ValueError("need a block of at least three nodes")
        bc = np.zeros(i1 - i0)
        bc[0] += op.k_lo * lo_value if i0 == 0 else -op.sub[i0 - 1] * lo_value
        bc[-1] += op.k_hi * hi_value if i1 == n else -op.sup[i1 - 1] * hi_value
        return cls(_subgrid(op.grid, i0, i1), np.array(op.sub[i0:i1 - 1]),
                   np.array(op.diag[i0:i1]), np.array(op.sup[i0:i1 - 1]),
                   np.array(op.volumes[i0:i1]), bc, float(q))

    def power(self, u):
        return np.abs(u) ** (self.q - 1.0) * u

    def residual(self, u) -> np.ndarray:
        return _core.tridiag_matvec(self.sub, self.diag, self.sup, u) + self.vol * self.power(u) - self.bc

    def scale(self, u) -> np.ndarray:
        s = np.abs(self.diag * u) + np.abs(self.bc) + self.vol * np.abs(u) ** self.q
        s[1:] += np.abs(self.sub * u[:-1])
        s[:-1] += np.abs(self.sup * u[1:])
        return s

    def relative_residual(self, u) -> float:
        """Componentwise backward error ``max |F_i| / (sum of |terms| in row i)``."""
        f = np.abs(self.residual(u))
        s = self.scale(u)
        return float(np.max(np.where(s > 0, f / np.maximum(s, 1e-300), f)))

    def energy(self, u) -> float:
        su = _core.tridiag_matvec(self.sub, self.diag, self.sup, u)
        return float(0.5 * u @ su - self.bc @ u + np.sum(self.vol * np.abs(u) ** (self.q + 1)) / (self.q + 1))

    def negative_pivots(self, shift=0.0) -> int:
        piv, _ = _core.tridiag_factor(self.sub, self.diag + shift * self.vol, self.sup)
        return int(np.sum(piv <= 0))


def _subgrid(grid: Grid, i0: int, i1: int) -> Grid:
    if i0 == 0 and i1 == grid.n:
        return grid
    return Grid(grid.domain, np.array(grid.faces[i0:i1 + 1]), np.array(grid.nodes[i0:i1]),
                grid.grading_power, grid.lo_end if i0 == 0 else "surface",
                grid.hi_end if i1 == grid.n else "surface")


def _newton(system: _System, u0, tol: float = NEWTON_TOL, maxiter: int = 200):
    """Damped Newton; Armijo backtracking (factor 1/2, at most 30) on the weighted residual norm."""
    u = np.array(u0, dtype=float)
    history = []
    for it in range(maxiter + 1):
        res = system.relative_residual(u)
        history.append(res)
        if res <= tol:
            # one extra full step: the backward-error test can pass before the
            # nonlinear term is resolved in the forward sense
            jd = system.diag + system.q * system.vol * np.abs(u) ** (system.q - 1.0)
            trial = u + _core.tridiag_solve(system.sub, jd, system.sup, -system.residual(u))
            res_t = system.relative_residual(trial) if np.all(np.isfinite(trial)) else np.inf
            if res_t <= tol:
                u = trial
                history.append(res_t)
            return u, it, history, True
        if it == maxiter:
            break
        f = system.residual(u)
        sc = system.scale(u)
        # rows with vanishing scale (e.g. u = 0 away from the data) get a floor
        w = 1.0 / np.maximum(sc, 1e-8 * float(np.max(sc)) + 1e-300)
        phi = float(np.linalg.norm(f * w))
        jd = system.diag + system.q * system.vol * np.abs(u) ** (system.q - 1.0)
        du = _core.tridiag_solve(system.sub, jd, system.sup, -f)
        if not np.all(np.isfinite(du)):
            break
        t = 1.0
        for _ in range(31):
            trial = u + t * du
            if float(np.linalg.norm(system.residual(trial) * w)) <= (1.0 - ARMIJO * t) * phi:
                break
            t *= 0.5
        else:
            # no decrease along the Newton direction: stagnation
            history.append(system.relative_residual(trial))
            return u, it + 1, history, False
        u = trial
    return u, len(history) - 1, history, False


def _ko_sup(u: GridFunction, beta: float, dist=None) -> float:
    d = u.grid.delta if dist is None else dist
    return float(np.max(u.values * d ** beta))


def _report(system: _System, u, iterations, history, ordered, status="solved", trace=None,
            beta=None, invariants=None, notes=None) -> SolveReport:
    gf = GridFunction(system.grid, u)
    ko = _ko_sup(gf, beta) if beta is not None else math.nan
    return SolveReport(gf, int(iterations), float(system.relative_residual(u)), bool(ordered), trace,
                       ko, system.energy(u), status, tuple(float(h) for h in history),
                       invariants or {}, notes or {})


# ---------------------------------------------------------------------------
# interior Dirichlet problems


@dataclass(frozen=True)
class Region:
    """``{delta_min < delta < delta_max}``: an interior domain ``D_R`` or a strip."""

    delta_min: float
    delta_max: float = math.inf
    component: str | None = None

    def grid(self, domain: RadialDomain, n: int, grading_power: float) -> Grid:
        if not self.delta_min > 0:
            raise ValueError("region must stay at positive distance from the boundary "
                             "(the potential mu/delta^2 has to be bounded)")
        grids = region_grids(domain, self.delta_min, min(self.delta_max, 1e300), n, grading_power)
        if len(grids) > 1:
            if self.component is None:
                raise ValueError("the strip has one piece per boundary component; pass component=")
            names = [c.name for c in domain.components]
            grids = [grids[names.index(self.component)]]
        return grids[0]


def _end_values(grid: Grid, boundary_values) -> tuple[float, float]:
    if callable(boundary_values):
        return float(boundary_values(grid.lo)), float(boundary_values(grid.hi))
    if np.ndim(boundary_values) == 0:
        v = float(boundary_values)
        return v, v
    lo, hi = boundary_values
    return float(lo), float(hi)


def solve_dirichlet(problem: NonlinearProblem, region, boundary_values=0.0, n: int = 2048,
                    grading_power: float = 2.0, tol: float = NEWTON_TOL) -> SolveReport:
    """Unique solution in a region at positive distance from the boundary.

    ``region`` is a :class:`Region` or a ready grid; ``boundary_values`` is a
    constant, a ``(low-r, high-r)`` pair or a callable of ``r``.  Newton is
    started from 0 and from ``2 sup f``; the two limits must agree (comparison
    principle).  If Newton stagnates, monotone iteration between 0 and the
    constant supersolution ``max f`` takes over.
    """
    grid = region if isinstance(region, Grid) else region.grid(problem.domain, n, grading_power)
    if float(np.min(grid.delta)) <= 0 or min(grid.face_delta("lo"), grid.face_delta("hi")) <= 0 \
            and not _touches_center_only(grid):
        raise ValueError("region touches the boundary; use solve_with_trace")
    f_lo, f_hi = _end_values(grid, boundary_values)
    op = DiscreteOperator(grid, problem.mu)
    system = _System.build(op, problem.q, f_lo, f_hi)
    top = 2.0 * max(abs(f_lo), abs(f_hi)) or 1.0
    runs = []
    for start in (np.zeros(grid.n), np.full(grid.n, top)):
        u, it, hist, ok = _newton(system, start, tol)
        runs.append((u, it, hist, ok))
    notes = {}
    if not all(r[3] for r in runs):
        notes["fallback"] = "Newton stagnated; monotone iteration between 0 and a constant"
        sup_const = np.full(grid.n, _constant_supersolution(system, problem, max(f_lo, f_hi, 0.0)))
        w, it, hist, ordered = _monotone(system, np.zeros(grid.n), sup_const)
        u, it2, hist2, ok = _newton(system, w, tol)
        if not ok:
            raise SolverFailure("Dirichlet solve failed", hist + hist2)
        runs = [(u, it + it2, hist + hist2, True)] * 2
    (u, it, hist, _), (u2, it_b, _, _) = runs
    gap = float(np.max(np.abs(u - u2)) / max(float(np.max(np.abs(u))), 1e-300))
    notes["restart_gap"] = gap
    inv = {"unique_across_starts": gap <= 1e-8, "iterations_from_large_start": it_b}
    return _report(system, u, it, hist, True, beta=problem.beta, invariants=inv, notes=notes)


def _constant_supersolution(system: _System, problem: NonlinearProblem, top: float) -> float:
    """Smallest dyadic multiple of ``top`` (or of the potential scale) that is a supersolution."""
    dmin = float(np.min(system.grid.delta))
    c = max(top, (max(problem.mu, 0.0) / dmin ** 2) ** (1.0 / (problem.q - 1.0)), 1e-300)
    for _ in range(200):
        if _sign_check(system, np.full(system.grid.n, c), +1)[0]:
            return c
        c *= 2.0
    raise SolverFailure("no constant supersolution found", [])


def _touches_center_only(grid: Grid) -> bool:
    return grid.lo_end == "center" and grid.face_delta("hi") > 0


# ---------------------------------------------------------------------------
# monotone iteration


def _monotone(system: _System, sub, sup, lam=None, tol: float = 1e-12, maxiter: int = 1_000_000,
              slack: float = 1e-9):
    sup = np.asarray(sup, dtype=float)
    sub = np.asarray(sub, dtype=float)
    q = system.q
    if lam is None:
        lam = 1.1 * q * float(np.max(np.abs(sup))) ** (q - 1.0)
    # (S + lam V) must be a nonsingular M-matrix for the map to preserve order
    while system.negative_pivots(lam) > 0:
        lam *= 2.0
    w, it, inc, bad_it, bad_node, bad_kind = _core.monotone_iterate(
        system.sub, system.diag, system.sup, system.vol, system.bc, float(lam), q,
        sup, sub, tol, maxiter, slack)
    if bad_kind:
        what = "increased" if bad_kind == 1 else "dropped below the subsolution"
        raise OrderingViolation(f"iterate {what} at node {bad_node} (iteration {bad_it}, lambda={lam:g})",
                                int(bad_node), int(bad_it))
    return np.asarray(w), int(it), [float(inc)], True


def _sign_check(system: _System, u, sign: int, rtol: float = 1e-9) -> tuple[bool, int]:
    """``sign * F(u) >= -rtol * scale`` at every row; returns (ok, worst row)."""
    f = sign * system.residual(u)
    s = system.scale(u)
    worst = int(np.argmin(f + rtol * s))
    return bool(np.all(f >= -rtol * s)), worst


def monotone_iteration(problem: NonlinearProblem, sub: GridFunction, super: GridFunction,
                       boundary_values=0.0, lam: float | None = None, tol: float = 1e-12,
                       maxiter: int = 1_000_000, polish: bool = True) -> SolveReport:
    """Order-preserving iteration ``w <- (S + lam V)^{-1}(lam V w - V w^q + b)`` from ``super``.

    ``lam`` defaults to ``1.1 q sup(super)^{q-1}`` and is doubled until
    ``S + lam V`` is positive definite.  Every iterate is checked to be no
    larger than its predecessor and no smaller than ``sub``.  The limit is
    optionally polished by Newton, and must stay inside ``[sub, super]``.
    """
    grid = super.grid
    if sub.grid is not grid:
        raise ValueError("sub and super must live on the same grid")
    lo, hi = _end_values(grid, boundary_values)
    system = _System.build(DiscreteOperator(grid, problem.mu), problem.q, lo, hi)
    s, S = sub.values, super.values
    if np.any(s < 0) or np.any(s > S):
        i = int(np.argmax((s < 0) | (s > S)))
        raise OrderingViolation(f"inputs not ordered 0 <= sub <= super at node {i}", i, 0)
    ok_sub, i_sub = _sign_check(system, s, -1)
    ok_sup, i_sup = _sign_check(system, S, +1)
    if not ok_sub:
        raise OrderingViolation(f"sub is not a discrete subsolution (node {i_sub})", i_sub, 0)
    if not ok_sup:
        raise OrderingViolation(f"super is not a discrete supersolution (node {i_sup})", i_sup, 0)
    w, it, hist, ordered = _monotone(system, s, S, lam, tol, maxiter)
    notes = {"monotone_iterations": it}
    if polish:
        u, it2, hist2, ok = _newton(system, w)
        inside = np.all(u >= s * (1 - 1e-9)) and np.all(u <= S * (1 + 1e-9) + 1e-300)
        if ok and inside:
            notes["newton_polish_change"] = float(np.max(np.abs(u - w)) / max(np.max(np.abs(w)), 1e-300))
            w = u
            hist = hist + hist2
        else:
            notes["newton_polish"] = "rejected"
    sandwich = bool(np.all(w >= s * (1 - 1e-9)) and np.all(w <= S * (1 + 1e-9) + 1e-300))
    return _report(system, w, it, hist, ordered and sandwich, beta=problem.beta,
                   invariants={"sandwich": sandwich}, notes=notes)


# ---------------------------------------------------------------------------
# moderate solutions with prescribed trace


def _boundary_area(domain: RadialDomain) -> float:
    comps = domain.components[:1] if domain.kind == "slab" else domain.components
    return float(sum(domain.area_factor(c.r) for c in comps))


def _interior_span(grid: Grid, delta_cut: float) -> tuple[int, int]:
    """Nodes with ``delta > delta_cut`` as a contiguous block (its neighbours carry the data)."""
    inside = np.nonzero(grid.delta > delta_cut)[0]
    i0, i1 = int(inside[0]), int(inside[-1]) + 1
    if grid.lo_end == "surface" and i0 == 0 or i1 == grid.n:
        raise ValueError("cut lies inside the first cell; refine the grid")
    return i0, i1


def _restricted(op, q, data, span):
    i0, i1 = span
    lo = data[i0 - 1] if i0 > 0 else 0.0
    return _System.build(op, q, lo, data[i1], span)


def _strip_rho(domain: RadialDomain, rho):
    rho = 0.5 * domain.inradius if rho is None else float(rho)
    if not 0 < rho <= domain.inradius:
        raise ValueError("strip width must lie in (0, inradius]")
    return rho


def solve_with_trace(problem: NonlinearProblem, n: int = 4096, grading_power: float = 2.0,
                     rho: float | None = None, levels=(64, 128, 256, 512), eps_count: int = 6,
                     loss_threshold: float = 0.5,
                     trace_tol: float = 0.02, archive: SolutionArchive | None = None) -> SolveReport:
    """Moderate solution with normalized trace ``c dS`` by exhaustion.

    On each truncation ``{delta > rho/m}`` the equation is solved with the
    data ``h_c = c h`` (``h`` the alpha_- harmonic profile of unit trace) at
    the first node outside.  ``h_c`` is a supersolution, so the truncated
    solutions decrease with ``m``.  ``rho`` defaults to ``inradius/8``.

    The trace is read from the ratios ``R_m(eps) = T_{u_m}(eps) / T_{h_c}(eps)``
    on ``eps = rho 2^-k``, ``k < eps_count``.  The nonlinear loss accumulates like a
    Riccati equation, so ``Y = R^{1-q} - 1`` behaves like a power of the cut
    and of ``eps``: it is extrapolated first in ``m`` (a non-shrinking
    sequence means the truncated solutions collapse to 0) and then in
    ``eps``, both by iterated Aitken passes.  Near ``q*`` the leading power
    ``2 + (q-1) alpha_-`` goes to 0 and its square is not negligible, which
    is why the ``eps`` ladder is long.  An extrapolated trace below ``loss_threshold * c |boundary|`` is
    reported as trace loss.
    """
    dom = problem.domain
    q = problem.q
    rho = _strip_rho(dom, 0.125 * dom.inradius if rho is None else rho)
    c = float(problem.trace_mass)
    grid = make_grid(dom, n, grading_power)
    op = DiscreteOperator(grid, problem.mu)
    h = harmonic_profile(dom, problem.mu, "alpha_minus", n=min(n, 4096), grading_power=grading_power)
    hc = c * h(grid.nodes)
    target = c * _boundary_area(dom)
    pre = _kernel_in_lq(dom, h, problem, grid)
    levels = tuple(sorted(levels))
    if eps_count < 3:
        raise ValueError("eps_count must be >= 3")
    eps = [rho * 0.5 ** k for k in range(eps_count)]
    if eps[-1] < 2.0 * rho / levels[0]:
        raise ValueError("the coarsest truncation must leave the smallest eps resolved "
                         "(levels[0] >= 2^eps_count)")
    t_h = [_surface_value(dom, h, e) for e in eps]
    sols, ratios = [], []
    total_it = 0
    monotone_in_m = True
    # h_c is a supersolution only up to its discretization error; the discrete
    # harmonic function of the deepest truncation is an exact one
    deep = _interior_span(grid, rho / levels[-1])
    sys_deep = _restricted(op, q, hc, deep)
    data = hc.copy()
    data[deep[0]:deep[1]] = _core.tridiag_solve(sys_deep.sub, sys_deep.diag, sys_deep.sup, sys_deep.bc)
    for m in levels:
        span = _interior_span(grid, rho / m)
        system = _restricted(op, q, data, span)
        start = data[span[0]:span[1]]
        u, it, hist, ok = _newton(system, start)
        if not ok:
            w, it_m, _, _ = _monotone(system, np.zeros_like(start), start)
            u, it2, hist2, ok = _newton(system, w)
            it, hist = it + it_m + it2, hist + hist2
        if not ok:
            raise SolverFailure(f"truncation rho/{m} did not converge", hist)
        total_it += it
        if sols:
            prev_span, prev = sols[-1][0], sols[-1][1]
            cur = u[prev_span[0] - span[0]:prev_span[1] - span[0]]
            if np.any(cur > prev * (1 + 1e-9) + 1e-300):
                monotone_in_m = False
        sols.append((span, u, system, hist))
        if c > 0:
            gf = GridFunction(system.grid, u)
            ratios.append([surface_integral(gf, e).total / (c * th) for e, th in zip(eps, t_h)])
    span, u, system, hist = sols[-1]
    if c > 0:
        trace, detail = _two_stage_trace(ratios, levels, eps, q, target, trace_tol)
    else:
        trace = TraceEstimate(tuple(eps), (0.0,) * len(eps), 0.0, math.nan, True, 0.0, {}, "zero data")
        detail = {}
    # T_u(eps) approaches the trace like eps^p; p -> 0 as q -> q*
    power = 2.0 + (q - 1.0) * problem.pair.alpha_minus
    if c > 0 and trace.converged and power < MIN_TRACE_POWER and not trace.note.startswith("truncated"):
        trace = replace(trace, converged=False,
                        note=f"correction power {power:.3g} < {MIN_TRACE_POWER}: eps ladder too short; "
                             + trace.note)
    estimate = trace.extrapolated_limit
    status = "trace_loss" if c > 0 and not estimate >= loss_threshold * target else "solved"
    if status == "trace_loss" and pre is True:
        # h_c in L^q(delta^alpha_+) guarantees a solution with this trace: the estimate is unresolved
        status = "unresolved"
        trace = replace(trace, converged=False, note="trace loss contradicts h_c in L^q; " + trace.note)
    # identity u + G[u^q] = h_c on the finest truncation
    green = _core.tridiag_solve(system.sub, system.diag, system.sup, system.vol * system.power(u))
    ref = hc[span[0]:span[1]]
    if c > 0:
        identity = float(np.max(np.abs(u + green - ref) / np.abs(ref)))
    else:
        identity = float(np.max(np.abs(u + green)))
    inv = {
        "nonincreasing_in_m": monotone_in_m,
        "identity_error": identity,
        "kernel_in_Lq": pre,
        "trace_correction_power": power,
        "trace_target": target,
        "trace_relative_error": abs(estimate - target) / target if target > 0 else abs(estimate),
        # u + G[u^q] is the discrete harmonic function with data h_c, so this is exact
        "below_h_c": bool(np.all(u <= (u + green) * (1 + 1e-12) + 1e-300) and np.all(green >= 0)),
        "h_c_excess": float(max(np.max(u / ref - 1.0), 0.0)) if c > 0 else 0.0,
        "regime": classify(problem.mu, dom.dim, q).regime.value,
    }
    notes = {"levels": list(levels), "rho": rho, **detail}
    rep = _report(system, u, total_it, hist, monotone_in_m, status, trace, problem.beta, inv, notes)
    if archive is not None:
        archive.add(problem, f"trace c={c:g}", rep)
    return rep


def solve_strip(problem: NonlinearProblem, rho: float | None = None, n: int = 4096,
                grading_power: float = 2.0, component: str | None = None,
                archive: SolutionArchive | None = None) -> SolveReport:
    """Zero-trace solution of the strip ``{delta < rho}`` with ``inner_data`` on ``{delta = rho}``.

    The strip is the block of nodes with ``delta < rho``; the boundary face
    carries 0 and the first node beyond the block carries ``inner_data``.
    The report records the fitted boundary exponent next to ``alpha_+`` and
    the normalized trace of the solution.
    """
    if problem.trace_mass != 0:
        raise ValueError("strip problems are solved with zero boundary trace only")
    if problem.inner_data is None or problem.inner_data < 0:
        raise ValueError("inner_data (a nonnegative value on the inner surface) is required")
    dom = problem.domain
    rho = _strip_rho(dom, rho)
    grid = make_grid(dom, n, grading_power)
    op = DiscreteOperator(grid, problem.mu)
    blocks = _strip_blocks(grid, rho)
    if component is None:
        if len(blocks) != 1:
            raise ValueError("the strip has one piece per boundary component; pass component=")
        comp, (i0, i1), _ = blocks[0]
    else:
        comp, (i0, i1), _ = next(b for b in blocks if b[0].name == component)
    g = float(problem.inner_data)
    lo, hi = (0.0, g) if comp.side < 0 else (g, 0.0)
    system = _System.build(op, problem.q, lo, hi, (i0, i1))
    u, it, hist, ok = _newton(system, np.zeros(i1 - i0))
    if not ok:
        w, it_m, _, _ = _monotone(system, np.zeros(i1 - i0), np.full(i1 - i0, max(g, 1e-300)))
        u, it2, hist2, ok = _newton(system, w)
        it, hist = it + it_m + it2, hist + hist2
        if not ok:
            raise SolverFailure("strip problem did not converge", hist)
    gf = GridFunction(system.grid, u)
    inv = {"alpha_plus": problem.pair.alpha_plus, "component": comp.name, "rho": rho}
    trace = None
    if g > 0:
        fit = fit_boundary_exponent(gf, component=comp.name)
        inv["boundary_exponent"] = fit.exponent
        inv["exponent_window"] = list(fit.window)
        trace = normalized_trace(gf, problem.pair, rho=rho, component=comp.name)
    rep = _report(system, u, it, hist, True, "solved", trace, problem.beta, inv)
    if archive is not None:
        archive.add(problem, f"strip rho={rho:g}", rep)
    return rep


def _surface_value(dom: RadialDomain, h, eps: float) -> float:
    comps = dom.components[:1] if dom.kind == "slab" else dom.components
    total = 0.0
    for comp in comps:
        r = dom.radius_at(comp, eps)
        total += float(dom.area_factor(r) * h(np.array([r]))[0])
    return total


def _two_stage_trace(ratios, levels, eps, q, target, rtol):
    """Extrapolate ``Y = R^{1-q} - 1`` in the cut, then in ``eps``; see :func:`solve_with_trace`."""
    R = np.asarray(ratios)
    cuts = [1.0 / m for m in levels]
    y_lim, m_notes = [], []
    for j in range(len(eps)):
        y = R[:, j] ** (1.0 - q) - 1.0
        # growth over the finest three cuts means the truncated solutions collapse
        tail = fit_power_limit(cuts[-3:], y[-3:], rtol=rtol)
        fit = iterated_aitken(cuts, y, rtol=rtol)
        if tail.note == "differences do not shrink":
            y_lim.append(math.inf)
        elif math.isfinite(fit.limit):
            y_lim.append(fit.limit)
        else:
            y_lim.append(float(y[-1]))
        m_notes.append(tail.note or f"rate {tail.rate:.3g}")
    if any(math.isinf(v) for v in y_lim):
        values = tuple(target * (1.0 + v) ** (-1.0 / (q - 1.0)) if math.isfinite(v) else 0.0
                       for v in y_lim)
        est = TraceEstimate(tuple(eps), values, 0.0, math.nan, True, math.nan, {},
                            "truncated solutions collapse: Y grows without bound in m")
    else:
        # the trace moves like (1+Y)/(q-1), so Y errors are judged on that scale
        fit = iterated_aitken(eps, y_lim, rtol=rtol, abs_floor=q - 1.0)
        values = tuple(target * (1.0 + v) ** (-1.0 / (q - 1.0)) for v in y_lim)
        # an unconverged table still beats the last sample; the flag records it
        y0 = fit.limit if math.isfinite(fit.limit) else y_lim[-1]
        # unless it leaves the admissible range or jumps farther than the ladder moved
        if 1.0 + y0 <= 0.0 or (not fit.converged and abs(y0 - y_lim[-1]) > abs(y_lim[0] - y_lim[-1])):
            y0 = y_lim[-1]
        err = fit.residual
        limit = target * max(1.0 + y0, 1e-300) ** (-1.0 / (q - 1.0))
        est = TraceEstimate(tuple(eps), values, float(limit), float(fit.rate), bool(fit.converged),
                            float(err), {}, fit.note or "two-stage extrapolation")
    detail = {"ratios": R.tolist(), "Y_limits_in_m": [str(v) if math.isinf(v) else v for v in y_lim],
              "m_fits": m_notes}
    return est, detail


def _kernel_in_lq(dom, h, problem, grid) -> bool | None:
    """Whether ``h`` is in ``L^q(delta^{alpha_+})`` on the strip.

    A converged refinement test decides.  Otherwise the tail exponent
    ``q beta + alpha_+`` (``beta`` fitted from ``h`` at the surface) does: near
    the threshold the refinement levels move too slowly to tell a barely
    integrable power from a divergent one.
    """
    try:
        strips = region_grids(dom, 0.0, _strip_rho(dom, None), max(grid.n // 4, 256), grid.grading_power)
        verdicts = []
        for g in strips:
            if weighted_lq_norm(h, problem.q, problem.pair.alpha_plus, grid=g).converged:
                verdicts.append(True)
                continue
            fit = fit_boundary_exponent(GridFunction(g, h(g.nodes)))
            tail = problem.q * fit.exponent + problem.pair.alpha_plus
            verdicts.append(bool(tail > -1.0 + 1e-3))
        return all(verdicts)
    except ValueError:
        return None


# ---------------------------------------------------------------------------
# maximal solutions and Keller-Osserman constants


def boundary_layer_constant(mu: float, q: float) -> float:
    """``C`` with ``C delta^{-2/(q-1)}`` solving the one-dimensional equation exactly.

    ``C^{q-1} = b(b+1) + mu`` with ``b = 2/(q-1)``; for ``mu = 0`` this is
    ``(2(q+1)/(q-1)^2)^{1/(q-1)}``.
    """
    exponents(mu)
    b = 2.0 / (q - 1.0)
    return (b * (b + 1.0) + mu) ** (1.0 / (q - 1.0))


def classical_ko_constant(dim: int, q: float) -> float:
    """Center value of the large solution of ``-Delta u + u^q = 0`` in the unit ball.

    Shooting from ``u(0) = 1`` gives the blow-up radius ``R1``; scaling gives
    ``U(0) = R1^{2/(q-1)}``, which bounds ``u delta^{2/(q-1)}`` for every
    subsolution in any domain.
    """
    beta = 2.0 / (q - 1.0)
    big = 1e10

    def rhs(r, y):
        u, v = y
        if r == 0.0:
            return [v, u ** q / dim]
        return [v, u ** q - (dim - 1) / r * v]

    def blow(r, y):
        return y[0] - big
    blow.terminal = True
    sol = solve_ivp(rhs, (0.0, 1e6), [1.0, 0.0], method="DOP853", rtol=1e-12, atol=1e-14,
                    events=blow)
    r_e = float(sol.t_events[0][0])
    # remaining distance from the one-dimensional profile C d^{-beta}
    c1 = boundary_layer_constant(0.0, q)
    r1 = r_e + (c1 / big) ** (1.0 / beta)
    return r1 ** beta


@dataclass(frozen=True)
class KOCheck:
    constant: float
    subsolution: bool
    worst_row: int
    refined_constant: float | None = None
    stable: bool | None = None
    violation: bool = False
    distance: str = "boundary"


def keller_osserman_check(u: GridFunction, q: float, mu: float, boundary_values=None,
                          refined: GridFunction | None = None, rho: float | None = None,
                          offset: float = 0.0, min_distance: float = 0.0,
                          rtol: float = 0.05) -> KOCheck:
    """``sup u delta^{2/(q-1)}`` for a verified discrete subsolution.

    The sign check uses the interior rows only (the end rows depend on data
    outside the grid) unless ``boundary_values`` are given.  With ``rho`` the
    distance is taken to the boundary of the strip ``{delta < rho}``; with
    ``offset`` it is ``delta - offset``, the distance to the boundary of a
    truncated domain ``{delta > offset}``.  Nodes closer than ``min_distance``
    are left out of the sup.  A ``refined`` solution on a finer mesh flags
    growth of the sup beyond ``rtol``.
    """
    beta = 2.0 / (q - 1.0)
    grid = u.grid
    op = DiscreteOperator(grid, mu)
    if boundary_values is None:
        system = _System.build(op, q, 0.0, 0.0)
        f = system.residual(u.values)[1:-1]
        s = system.scale(u.values)[1:-1]
        ok = bool(np.all(f <= 1e-8 * s))
        worst = int(np.argmax(f - 1e-8 * s)) + 1
    else:
        lo, hi = _end_values(grid, boundary_values)
        system = _System.build(op, q, lo, hi)
        ok, worst = _sign_check(system, u.values, -1, 1e-8)
    if not ok:
        raise ValueError(f"input is not a discrete subsolution (row {worst})")

    def dist(g):
        d = g.delta - offset
        return d if rho is None else np.minimum(d, rho - g.delta)

    def sup(v):
        d = dist(v.grid)
        if np.any(d <= 0):
            raise ValueError("grid leaves the region")
        keep = d >= min_distance
        return float(np.max(np.maximum(v.values[keep], 0.0) * d[keep] ** beta))

    value = sup(u)
    kind = "strip" if rho is not None else ("truncated" if offset > 0 else "boundary")
    if refined is None:
        return KOCheck(value, ok, worst, distance=kind)
    fine = sup(refined)
    stable = abs(fine - value) <= rtol * value
    return KOCheck(value, ok, worst, fine, stable, fine > value * (1 + rtol), kind)


def maximal_solution(problem: NonlinearProblem, n: int = 4096, grading_power: float = 2.0,
                     cut: float = 1e-3, core: float = 1e-4, tol: float = 1e-3, k0: float = 1.0,
                     k_max: float = 1e40, archive: SolutionArchive | None = None) -> SolveReport:
    """Large solution of ``D = {delta > cut * scale}`` as the limit of data ``k`` on its boundary.

    ``k`` is doubled until the sup-norm change on ``{x >= core * scale}``
    (``x = delta - cut`` the distance to the boundary of ``D``) drops below
    ``tol``.  A finite grid has no discrete large solution: the node next to
    the data keeps growing like ``k^{1/q}``, so distances below ``core`` are
    treated as an unresolved layer and excluded from the Keller-Osserman sup.
    The boundary-layer constant is the intercept of a quadratic fit of
    ``u x^{2/(q-1)}`` on ``core <= x/scale <= 10 core``.  Inside that window
    the potential ``mu/delta^2`` is bounded by ``mu/cut^2``, so the layer sees
    the ``mu = 0`` constant; the untruncated value is reported alongside.
    """
    dom = problem.domain
    beta = problem.beta
    if not 0 < core < 0.1 * dom.inradius / dom.scale:
        raise ValueError("core must be a small fraction of the inradius")
    grid = region_grids(dom, cut * dom.scale, 2.0 * dom.inradius, n, grading_power)[0]
    op = DiscreteOperator(grid, problem.mu)
    x = grid.delta - cut * dom.scale
    core_mask = x >= core * dom.scale
    k = float(k0)
    u = None
    k_hist = []
    total = 0
    saturated = False
    history = []
    while k <= k_max:
        system = _System.build(op, problem.q, k, k)
        start = np.full(grid.n, k ** (1.0 / problem.q)) if u is None else u
        un, it, hist, ok = _newton(system, start)
        if not ok:
            w, it_m, _, _ = _monotone(system, np.zeros(grid.n), np.full(grid.n, k))
            un, it2, hist2, ok = _newton(system, w)
            it, hist = it + it_m + it2, hist + hist2
            if not ok:
                raise SolverFailure(f"solve with k={k:g} failed", hist)
        total += it
        history = hist
        if u is not None:
            change = float(np.max(np.abs(un[core_mask] - u[core_mask])) / np.max(np.abs(un[core_mask])))
            k_hist.append((k, change))
            if change < tol:
                u = un
                saturated = True
                break
        else:
            k_hist.append((k, math.nan))
        u = un
        k *= 2.0
    prof = u * x ** beta
    window = (x >= core * dom.scale) & (x <= 10 * core * dom.scale)
    coef = np.polynomial.polynomial.polyfit(x[window], prof[window], 2)
    ko = float(np.max(prof[core_mask]))
    inv = {"saturated": saturated,
           "boundary_layer_constant": float(coef[0]),
           "boundary_layer_oracle": boundary_layer_constant(0.0, problem.q),
           "boundary_layer_oracle_untruncated": boundary_layer_constant(problem.mu, problem.q),
           "ko_sup_location_delta": float(grid.delta[core_mask][np.argmax(prof[core_mask])])}
    if problem.mu <= 0:
        inv["classical_ko_constant"] = classical_ko_constant(dom.dim, problem.q)
    notes = {"k_history": k_hist, "final_k": k, "cut": cut * dom.scale, "core": core * dom.scale}
    gf = GridFunction(grid, u)
    rep = SolveReport(gf, total, float(system.relative_residual(u)), True, None, ko,
                      system.energy(u), "solved" if saturated else "not_saturated",
                      tuple(float(v) for v in history), inv, notes)
    if archive is not None:
        bad = archive.dominated_by(problem, gf)
        rep.invariants["dominates_archive"] = not bad
        rep.invariants["archive_size"] = len(archive.solutions(problem))
        if bad:
            rep.invariants["exceeded_by"] = bad
        archive.add(problem, "maximal", rep)
    return rep


# ---------------------------------------------------------------------------
# non-uniqueness above the Hardy constant


@dataclass(frozen=True)
class NonuniquenessResult:
    U0: SolveReport
    certificate: dict
    ground_state: GridFunction = field(repr=False)
    supersolution: GridFunction = field(repr=False)
    tau: float = math.nan
    mu: float = math.nan

    def as_dict(self) -> dict:
        return {"mu": self.mu, "tau": self.tau, "certificate": _jsonable(self.certificate),
                "U0": self.U0.as_dict()}


def _fv_ground_state(op: DiscreteOperator):
    """Lowest pair of ``(S_mu + mu W) phi = lam W phi`` with ``W = V / delta^2``.

    Using the rows of ``S_mu`` itself (end closure included) makes
    ``S_mu phi = (lam - mu) W phi`` hold exactly.
    """
    w = op.volumes / op.grid.delta ** 2
    s = 1.0 / np.sqrt(w)
    d = (op.diag + op.mu * w) * s * s
    e = op.sub * s[:-1] * s[1:]
    lam, vec = eigh_tridiagonal(d, e, select="i", select_range=(0, 0))
    phi = vec[:, 0] * s
    phi = phi / phi[np.argmax(np.abs(phi))]
    return float(lam[0]), phi


def _dyadic_tau(lam, mu, q, phi, dist) -> float:
    """Largest ``2^-j`` with ``tau^{q-1} phi^{q-1} <= (mu - lam)/delta^2`` at every node."""
    bound = np.min(((mu - lam) / dist ** 2) ** (1.0 / (q - 1.0)) / phi)
    return 2.0 ** math.floor(math.log2(bound))


def _strip_blocks(grid: Grid, rho: float):
    """Per boundary surface: (block of nodes with delta < rho, index of the first node beyond)."""
    blocks = []
    inside = grid.delta < rho
    r = grid.nodes
    for comp in grid.domain.components:
        near = inside & (np.abs(r - comp.r) < rho * (1 + 1e-12))
        idx = np.nonzero(near)[0]
        if idx.size == 0:
            continue
        i0, i1 = int(idx[0]), int(idx[-1]) + 1
        # the strip of an outer surface is entered from below, that of an inner one from above
        beyond = i0 - 1 if comp.side > 0 else i1
        blocks.append((comp, (i0, i1), beyond))
    return blocks


def nonuniqueness_demo(domain: RadialDomain, q: float, margin: float = 1e-2, n: int = 2048,
                       grading_power: float = 2.0, rho: float | None = None,
                       inner: float | None = None, trace_tol: float = 0.02) -> NonuniquenessResult:
    """Two solutions of the zero-trace problem when ``C_H < mu < 1/4``.

    ``mu = (C_H + 1/4)/2``.  The subsolution is ``tau phi`` with ``phi`` the
    discrete ground state of the scheme's own Hardy quotient and ``tau`` the
    largest dyadic value that keeps the subsolution inequality at every
    node.  The supersolution glues ``U_{0,k}`` (zero on the boundary, ``k`` on
    ``{delta = rho}``) with the interior solution ``u_R`` carrying twice its
    values on ``{delta = R}``: it is ``U_{0,k}`` for ``delta <= R``, ``u_R`` for
    ``delta >= rho`` and the minimum in between.  Monotone iteration from the
    supersolution then gives ``U_0 >= tau phi``, while ``0`` is the other
    solution.
    """
    if domain.kind != "annulus":
        raise ValueError("the construction is set up on annuli")
    grid = make_grid(domain, n, grading_power)
    hres = hardy_constant(domain, grid)
    c_h = hres.extrapolated
    if not c_h < QUARTER - margin:
        raise NonuniquenessRefusal(
            f"radial Hardy bound C_H = {c_h:.6f} is not below 1/4 - {margin:g}: for mu < C_H the "
            "zero-trace problem has at most one solution, and no mu in (C_H, 1/4) is available")
    mu = 0.5 * (c_h + QUARTER)
    problem = NonlinearProblem(domain, mu, q)
    pair = problem.pair
    rho = 0.5 * domain.inradius if rho is None else float(rho)
    inner = 0.25 * rho if inner is None else float(inner)
    op = DiscreteOperator(grid, mu)
    lam, phi = _fv_ground_state(op)
    if np.any(phi <= 0):
        phi = -phi
    if not (np.all(phi > 0) and lam < mu):
        raise NonuniquenessRefusal(f"discrete ground level {lam:.6f} is not below mu = {mu:.6f}")
    full = _System.build(op, q)
    tau = _dyadic_tau(lam, mu, q, phi, grid.delta)
    while not _sign_check(full, tau * phi, -1, 1e-10)[0]:
        tau *= 0.5

    # U_{0,k} on each strip, u_R inside {delta > R}
    blocks = _strip_blocks(grid, rho)
    strip_pd = True
    span_R = _interior_span(grid, inner)
    k = 1.0
    for _ in range(60):
        U = np.full(grid.n, np.nan)
        for comp, (i0, i1), beyond in blocks:
            lo = 0.0 if comp.side < 0 else k
            hi = k if comp.side < 0 else 0.0
            sysk = _System.build(op, q, lo, hi, (i0, i1))
            strip_pd &= sysk.negative_pivots() == 0
            u, _, hist, ok = _newton(sysk, np.zeros(i1 - i0))
            if not ok:
                raise SolverFailure("strip problem did not converge", hist)
            U[i0:i1] = u
        U_ext = U.copy()
        for comp, (i0, i1), beyond in blocks:
            U_ext[beyond] = k
        data = 2.0 * U_ext
        sys_R = _restricted(op, q, data, span_R)
        start = np.full(span_R[1] - span_R[0], np.nanmax(data[[span_R[0] - 1, span_R[1]]]))
        uR, _, hist, ok = _newton(sys_R, start)
        if not ok:
            raise SolverFailure("interior problem did not converge", hist)
        uR_full = np.full(grid.n, np.inf)
        uR_full[span_R[0]:span_R[1]] = uR
        at_rho = [uR_full[b] for _, _, b in blocks]
        if k > 1.5 * max(at_rho):
            break
        k *= 2.0
    hat = np.where(np.isnan(U), uR_full, np.minimum(np.nan_to_num(U, nan=np.inf), uR_full))
    hat = np.where(np.isfinite(hat), hat, 0.0)
    ok_sup, worst = _sign_check(full, hat, +1, 1e-9)
    if not ok_sup:
        raise SolverFailure(f"glued function is not a discrete supersolution (node {worst})")
    if np.any(hat <= 0):
        raise SolverFailure("glued supersolution is not positive at every node")
    while np.any(tau * phi > hat):
        tau *= 0.5
    sub = GridFunction(grid, tau * phi)
    sup = GridFunction(grid, hat)
    rep = monotone_iteration(problem, sub, sup)
    U0 = rep.solution
    ratio = float(np.min(U0.values / phi))
    # the eps ladder has to start below the radius of a small inner surface
    trace_rho = min(rho, domain.lo) if domain.lo > 0 else rho
    tr = normalized_trace(U0, pair, rho=trace_rho, rtol=trace_tol)
    fit = fit_boundary_exponent(U0)
    fine = _fine_mesh_check(problem, U0)
    cert = {
        "C_H": c_h,
        "C_H_discrete": hres.constant,
        "mu": mu,
        "discrete_ground_level": lam,
        "tau": tau,
        "k": k,
        "rho": rho,
        "R": inner,
        "trace_rho": trace_rho,
        "strip_coercive": bool(strip_pd),
        "min_ratio_to_phi": ratio,
        "lower_bound_holds": ratio >= tau * (1 - 1e-9) and tau > 0,
        "trace_limit": tr.extrapolated_limit,
        "trace_converged": tr.converged,
        "trace_zero": tr.converged and abs(tr.extrapolated_limit) < trace_tol,
        "residual": rep.final_residual,
        "zero_residual": 0.0,
        "sup_U0": float(np.max(U0.values)),
        "boundary_exponent": fit.exponent,
        "alpha_plus": pair.alpha_plus,
        "ground_state_exponent": 0.5 + math.sqrt(QUARTER - c_h),
        **fine,
    }
    cert["two_solutions"] = bool(cert["lower_bound_holds"] and cert["trace_zero"]
                                 and rep.final_residual < 1e-9 and cert["sup_U0"] > 0)
    return NonuniquenessResult(rep, cert, GridFunction(grid, phi), sup, tau, mu)


def _extend_interp(u: GridFunction, r) -> np.ndarray:
    """``u.interp`` with power-law continuation (end slope in log delta) past the end nodes."""
    x, d, v = u.grid.nodes, u.grid.delta, u.values
    out = np.empty(len(r))
    lo, hi = r < x[0], r > x[-1]
    mid = ~(lo | hi)
    out[mid] = u.interp(r[mid])
    fine_delta = np.asarray(delta(u.grid.domain, r))
    for mask, a, b in ((lo, 0, 1), (hi, -1, -2)):
        if np.any(mask):
            slope = math.log(v[b] / v[a]) / math.log(d[b] / d[a])
            out[mask] = v[a] * (fine_delta[mask] / d[a]) ** slope
    return out


def _fine_mesh_check(problem: NonlinearProblem, u: GridFunction) -> dict:
    """Residual of ``u`` on the doubled mesh, and the Newton solution started from it there."""
    fine = u.grid.refined(2)
    system = _System.build(DiscreteOperator(fine, problem.mu), problem.q)
    guess = _extend_interp(u, fine.nodes)
    # normwise: near the boundary the graded cells have h ~ delta, where the
    # rowwise residual of any interpolant is O(1) times the curvature of log u
    f = np.abs(system.residual(guess))
    raw = float(np.sum(f) / np.sum(system.scale(guess)))
    v, it, hist, ok = _newton(system, guess)
    change = float(np.max(np.abs(v - guess)) / np.max(np.abs(guess)))
    return {"fine_interpolated_residual": raw,
            "fine_interpolated_residual_rowwise": system.relative_residual(guess),
            "fine_residual": float(hist[-1]),
            "fine_converged": bool(ok), "fine_relative_change": change,
            "fine_min": float(np.min(v))}


# ---------------------------------------------------------------------------
# Riesz-kernel criterion in the half-space model


@dataclass(frozen=True)
class RieszCheck:
    sufficient_holds: bool
    necessary_holds: bool
    profile: str
    decay_exponents: dict
    kernel_lq_agrees: bool | None
    inconclusive: bool = False

    def as_dict(self) -> dict:
        return _jsonable(self.__dict__.copy())


def _conv_on_axis(dim: int, t: float, kernel: str) -> float:
    """Convolution of the unit-disk indicator with ``Gamma_1`` or ``P_0`` at ``(0, t)``.

    ``int_0^1 s^{N-2} (s^2 + t^2)^{-b} ds`` in closed form (elementary for
    ``N = 2, 3``, a hypergeometric function otherwise).
    """
    area = 2.0 * math.pi ** ((dim - 1) / 2) / math.gamma((dim - 1) / 2)
    if kernel == "riesz":
        if dim == 2:
            val = math.asinh(1.0 / t)
        elif dim == 3:
            val = 0.5 * math.log1p(1.0 / (t * t))
        else:
            b = (dim - 1) / 2
            val = t ** (-2 * b) / (dim - 1) * hyp2f1(b, (dim - 1) / 2, (dim + 1) / 2, -1.0 / t ** 2)
    else:
        if dim == 2:
            val = math.atan(1.0 / t)
        elif dim == 3:
            val = 1.0 - t / math.sqrt(1.0 + t * t)
        else:
            b = dim / 2
            val = t ** (1 - 2 * b) / (dim - 1) * hyp2f1(b, (dim - 1) / 2, (dim + 1) / 2, -1.0 / t ** 2)
    return area * val


def _cutoff_integral(integrand, lo: float, hi: float) -> float:
    """``int_lo^hi`` with Gauss panels uniform in ``log t``."""
    x, w = np.polynomial.legendre.leggauss(16)
    edges = np.geomspace(lo, hi, max(int(math.log2(hi / lo)) + 1, 2))
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        la, lb = math.log(a), math.log(b)
        s = 0.5 * (lb - la) * x + 0.5 * (lb + la)
        t = np.exp(s)
        total += 0.5 * (lb - la) * float(np.sum(w * integrand(t) * t))
    return total


def _decay(values, levels) -> float:
    d1 = values[1] - values[0]
    d2 = values[2] - values[1]
    if d2 <= 0:
        return math.inf
    if d1 <= 0:
        return -math.inf
    return math.log(d1 / d2) / math.log(levels[1] / levels[2])


def riesz_criterion_check(mu: float, dim: int, q: float, f_profile: str = "constant",
                          m: int = 16, threshold: float = 0.02) -> RieszCheck:
    """Finiteness of the weighted ``L^q`` norms behind the Riesz-kernel criterion.

    Weight ``x_N^{1 + (q-1) alpha_-}`` near the origin of the half-space, for
    the convolution of the boundary density with ``Gamma_1 = |x|^{1-N}``
    (sufficient side) and with the Poisson kernel ``x_N |x|^{-N}`` (necessary
    side, meaningful for ``mu >= 0``).  ``f_profile`` is ``"constant"`` (the
    indicator of the unit boundary disk) or ``"dirac"`` (a unit point mass).
    The integral is cut at ``m^-1, m^-2, m^-4 ...``; its increments decaying
    like a power means a finite integral, a flat or growing sequence means
    divergence.
    """
    pair = exponents(mu)
    w = 1.0 + (q - 1.0) * pair.alpha_minus
    levels = (float(m) ** -2, float(m) ** -4, float(m) ** -6)
    out = {}
    for kernel in ("riesz", "poisson"):
        vals = []
        for eta in levels:
            if f_profile == "constant":
                # the convolution is comparable to its value on the axis for |x'| < 1/2
                def integrand(t, kernel=kernel):
                    return np.array([_conv_on_axis(dim, float(s), kernel) for s in t]) ** q * t ** w
                vals.append(_cutoff_integral(integrand, eta, 0.5))
            elif f_profile == "dirac":
                vals.append(_dirac_integral(dim, q, w, eta, kernel))
            else:
                raise ValueError("f_profile is 'constant' or 'dirac'")
        out[kernel] = _decay(vals, levels)
    fin = {k: v > threshold for k, v in out.items()}
    inconclusive = any(abs(v - threshold) < 0.5 * threshold for v in out.values() if math.isfinite(v))
    agrees = None
    if f_profile == "dirac":
        agrees = kernel_lq_test(mu, dim, q).verdict == ("finite" if fin["riesz"] else "divergent")
    return RieszCheck(fin["riesz"], fin["poisson"], f_profile, out, agrees, inconclusive)


def _dirac_integral(dim: int, q: float, w: float, eta: float, kernel: str) -> float:
    """``int_{eta < |x| < 1, x_N > 0} K(x)^q x_N^w dx`` in polar form."""
    sphere = 2.0 * math.pi ** ((dim - 1) / 2) / math.gamma((dim - 1) / 2)
    if kernel == "riesz":
        radial_exp = -q * (dim - 1) + w + dim - 1
        ang_exp = w
    else:
        radial_exp = q * (1 - dim) + w + dim - 1
        ang_exp = q + w
    if ang_exp <= -1:
        return math.inf
    # theta is the angle from the boundary plane: x_N = r sin(theta)
    ang, _ = quad(lambda th: math.sin(th) ** ang_exp * math.cos(th) ** (dim - 2), 0.0, math.pi / 2,
                  limit=200)
    if abs(radial_exp + 1) < 1e-14:
        radial = -math.log(eta)
    else:
        radial = (1.0 - eta ** (radial_exp + 1)) / (radial_exp + 1)
    return sphere * ang * radial


__all__ = [
    "KOCheck",
    "NonlinearProblem",
    "NonuniquenessRefusal",
    "NonuniquenessResult",
    "OrderingViolation",
    "Region",
    "RieszCheck",
    "SolutionArchive",
    "SolveReport",
    "SolverFailure",
    "boundary_layer_constant",
    "classical_ko_constant",
    "keller_osserman_check",
    "maximal_solution",
    "monotone_iteration",
    "nonuniqueness_demo",
    "riesz_criterion_check",
    "solve_dirichlet",
    "solve_strip",
    "solve_with_trace",
]
