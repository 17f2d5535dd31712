"""Radial domains, boundary-graded grids and the integral functionals on them.

All domains are reduced to one radial coordinate ``r``: the distance from the
center for balls and annuli, the height ``x_N`` for the slab. Integrals carry
the ``|S^{N-1}| r^{N-1}`` volume factor (per unit cross-section for slabs).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exponents import ExponentPair
from .extrapolation import PowerLawFit, iterated_aitken

KINDS = ("ball", "annulus", "slab")


def sphere_area(dim: int) -> float:
    """Surface measure of the unit sphere S^{dim-1}."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


@dataclass(frozen=True)
class BoundaryComponent:
    name: str
    r: float
    # +1 if the domain lies below r (delta = r_b - r), -1 if above
    side: int


@dataclass(frozen=True)
class RadialDomain:
    """Ball ``|x| < R``, annulus ``a < |x| < b`` or slab ``0 < x_N < H`` in R^N."""

    kind: str
    dim: int
    lo: float
    hi: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}; expected one of {KINDS}")
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.dim}")
        if self.kind == "ball" and (self.lo != 0.0 or not self.hi > 0):
            raise ValueError("ball needs radius R > 0")
        if self.kind == "annulus" and not 0 < self.lo < self.hi:
            raise ValueError("annulus needs 0 < a < b")
        if self.kind == "slab" and (self.lo != 0.0 or not self.hi > 0):
            raise ValueError("slab needs height H > 0")

    @classmethod
    def ball(cls, radius: float = 1.0, dim: int = 3) -> "RadialDomain":
        return cls("ball", dim, 0.0, float(radius))

    @classmethod
    def annulus(cls, inner: float, outer: float, dim: int = 3) -> "RadialDomain":
        return cls("annulus", dim, float(inner), float(outer))

    @classmethod
    def slab(cls, height: float = 1.0, dim: int = 2) -> "RadialDomain":
        return cls("slab", dim, 0.0, float(height))

    @classmethod
    def parse(cls, text: str, dim: int) -> "RadialDomain":
        """Parse ``ball:R``, ``annulus:a,b`` or ``slab:H``."""
        kind, _, args = text.partition(":")
        vals = [float(v) for v in args.split(",")] if args else []
        if kind == "ball":
            return cls.ball(*(vals or [1.0]), dim=dim)
        if kind == "annulus":
            if len(vals) != 2:
                raise ValueError("annulus is written annulus:a,b")
            return cls.annulus(vals[0], vals[1], dim=dim)
        if kind == "slab":
            return cls.slab(*(vals or [1.0]), dim=dim)
        raise ValueError(f"unknown domain {text!r}")

    @property
    def components(self) -> tuple[BoundaryComponent, ...]:
        if self.kind == "ball":
            return (BoundaryComponent("outer", self.hi, +1),)
        if self.kind == "annulus":
            return (BoundaryComponent("inner", self.lo, -1), BoundaryComponent("outer", self.hi, +1))
        return (BoundaryComponent("bottom", 0.0, -1), BoundaryComponent("top", self.hi, +1))

    @property
    def inradius(self) -> float:
        if self.kind == "ball":
            return self.hi
        return 0.5 * (self.hi - self.lo)

    @property
    def scale(self) -> float:
        return self.hi - self.lo

    @property
    def radial_weight(self) -> bool:
        return self.kind != "slab"

    def describe(self) -> dict:
        d = {"kind": self.kind, "dim": self.dim}
        if self.kind == "ball":
            d["radius"] = self.hi
        elif self.kind == "annulus":
            d.update(inner=self.lo, outer=self.hi)
        else:
            d["height"] = self.hi
        return d

    def area_factor(self, r):
        """Surface measure of {radial coordinate = r}."""
        r = np.asarray(r, dtype=float)
        if self.kind == "slab":
            return np.ones_like(r)
        return sphere_area(self.dim) * r ** (self.dim - 1)

    def shell_volume(self, r0, r1):
        """Measure of {r0 < radial coordinate < r1}."""
        r0 = np.asarray(r0, dtype=float)
        r1 = np.asarray(r1, dtype=float)
        if self.kind == "slab":
            return r1 - r0
        n = self.dim
        return sphere_area(n) * (r1 ** n - r0 ** n) / n

    def radius_at(self, comp: BoundaryComponent, eps):
        return comp.r - comp.side * np.asarray(eps, dtype=float)


def delta(domain: RadialDomain, r):
    """Distance to the boundary at radial coordinate ``r`` (vectorized)."""
    r_arr = np.asarray(r, dtype=float)
    tol = 1e-12 * domain.scale
    if np.any(r_arr < domain.lo - tol) or np.any(r_arr > domain.hi + tol):
        raise ValueError(f"r outside the closure [{domain.lo}, {domain.hi}] of the {domain.kind}")
    if domain.kind == "ball":
        d = domain.hi - r_arr
    else:
        d = np.minimum(r_arr - domain.lo, domain.hi - r_arr)
    d = np.maximum(d, 0.0)
    return float(d) if np.ndim(d) == 0 else d


# ---------------------------------------------------------------------------
# grids

END_KINDS = ("center", "surface")


@dataclass(frozen=True, eq=False)
class Grid:
    """Cell-centred radial grid on ``[faces[0], faces[-1]]``.

    ``lo_end``/``hi_end`` are ``"center"`` (the symmetry point of a ball) or
    ``"surface"`` (a Dirichlet surface: the boundary itself or an interior
    level set of ``delta``).
    """

    domain: RadialDomain
    faces: np.ndarray
    nodes: np.ndarray
    grading_power: float
    lo_end: str = "surface"
    hi_end: str = "surface"
    _delta: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        for arr in (self.faces, self.nodes):
            arr.setflags(write=False)
        d = np.asarray(delta(self.domain, self.nodes))
        d.setflags(write=False)
        object.__setattr__(self, "_delta", d)
        if np.any(d <= 0):
            raise ValueError("grid nodes must lie strictly inside the domain")

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def delta(self) -> np.ndarray:
        return self._delta

    @property
    def lo(self) -> float:
        return float(self.faces[0])

    @property
    def hi(self) -> float:
        return float(self.faces[-1])

    @property
    def volumes(self) -> np.ndarray:
        return self.domain.shell_volume(self.faces[:-1], self.faces[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.faces)

    def face_delta(self, which: str) -> float:
        return float(delta(self.domain, self.lo if which == "lo" else self.hi))

    def refined(self, factor: int = 2) -> "Grid":
        return interval_grid(self.domain, self.lo, self.hi, self.n * factor, self.grading_power,
                             self.lo_end, self.hi_end)


def _graded_unit(t, gamma: float, cluster_lo: bool, cluster_hi: bool):
    """Map [0,1] -> [0,1] with power-law clustering at the requested ends."""
    t = np.asarray(t, dtype=float)
    if cluster_lo and cluster_hi:
        # smooth everywhere; a glued pair of power maps would put a kink in the
        # spacing at t = 1/2 and cost an order of accuracy there
        a, b = t ** gamma, (1.0 - t) ** gamma
        return a / (a + b)
    if cluster_hi:
        return 1.0 - (1.0 - t) ** gamma
    if cluster_lo:
        return t ** gamma
    return t


def interval_grid(domain: RadialDomain, lo: float, hi: float, n: int, grading_power: float = 2.0,
                  lo_end: str = "surface", hi_end: str = "surface") -> Grid:
    """Graded grid on a sub-interval of the domain, clustered at every surface end."""
    if lo_end not in END_KINDS or hi_end not in END_KINDS:
        raise ValueError("end kinds are 'center' or 'surface'")
    if not hi > lo:
        raise ValueError("empty interval")
    t_faces = np.arange(n + 1) / n
    t_nodes = (np.arange(n) + 0.5) / n
    cl, ch = lo_end == "surface", hi_end == "surface"
    faces = lo + (hi - lo) * _graded_unit(t_faces, grading_power, cl, ch)
    nodes = lo + (hi - lo) * _graded_unit(t_nodes, grading_power, cl, ch)
    faces[0], faces[-1] = lo, hi
    return Grid(domain, faces, nodes, float(grading_power), lo_end, hi_end)


def make_grid(domain: RadialDomain, n: int, grading_power: float = 2.0) -> Grid:
    """Cell-centred grid on the whole domain, graded toward every boundary component."""
    if n < 16:
        raise ValueError(f"need n >= 16 cells, got {n}")
    if grading_power < 1:
        raise ValueError("grading power must be >= 1")
    lo_end = "center" if domain.kind == "ball" else "surface"
    return interval_grid(domain, domain.lo, domain.hi, n, grading_power, lo_end, "surface")


def region_grids(domain: RadialDomain, delta_min: float, delta_max: float, n: int,
                 grading_power: float = 2.0) -> list[Grid]:
    """Grids on ``{delta_min < delta < delta_max}``, one per connected component.

    ``delta_max >= inradius`` means no inner cutoff (the region reaches the
    center of a ball or the mid-surface of an annulus/slab).
    """
    if delta_min < 0 or not delta_max > delta_min:
        raise ValueError("need 0 <= delta_min < delta_max")
    if delta_min >= domain.inradius:
        raise ValueError("delta_min must be smaller than the inradius")
    if domain.kind == "ball":
        if delta_max >= domain.hi:
            return [interval_grid(domain, 0.0, domain.hi - delta_min, n, grading_power, "center")]
        return [interval_grid(domain, domain.hi - delta_max, domain.hi - delta_min, n, grading_power)]
    a, b = domain.lo, domain.hi
    if delta_max >= domain.inradius:
        return [interval_grid(domain, a + delta_min, b - delta_min, n, grading_power)]
    return [interval_grid(domain, a + delta_min, a + delta_max, n, grading_power),
            interval_grid(domain, b - delta_max, b - delta_min, n, grading_power)]


# ---------------------------------------------------------------------------
# grid functions


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable) -> "GridFunction":
        return cls(grid, fn(grid.nodes))

    @property
    def r(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def delta(self) -> np.ndarray:
        return self.grid.delta

    def __mul__(self, c: float) -> "GridFunction":
        return GridFunction(self.grid, c * self.values)

    __rmul__ = __mul__

    def __add__(self, other: "GridFunction") -> "GridFunction":
        if other.grid is not self.grid:
            raise ValueError("grid functions live on different grids")
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return self + (-1.0) * other

    def interp(self, r) -> np.ndarray:
        """Interpolate in ``(log delta, log u)`` when the bracket is positive, else linearly."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        x = self.grid.nodes
        v = self.values
        if np.any(r < x[0] - 1e-14 * abs(x[0] + 1)) or np.any(r > x[-1] + 1e-14 * abs(x[-1] + 1)):
            raise ValueError("interpolation point outside the node range")
        j = np.clip(np.searchsorted(x, r) - 1, 0, len(x) - 2)
        x0, x1 = x[j], x[j + 1]
        v0, v1 = v[j], v[j + 1]
        d0, d1 = self.grid.delta[j], self.grid.delta[j + 1]
        dr = np.asarray(delta(self.grid.domain, r))
        lin = v0 + (v1 - v0) * (r - x0) / (x1 - x0)
        pos = (v0 > 0) & (v1 > 0) & (d0 > 0) & (d1 > 0) & (np.abs(np.log(d1 / d0)) > 1e-12)
        out = lin.copy()
        if np.any(pos):
            with np.errstate(divide="ignore", invalid="ignore"):
                s = np.log(dr / d0) / np.log(d1 / d0)
                loglog = np.exp(np.log(v0) + s * (np.log(v1) - np.log(v0)))
            out = np.where(pos, loglog, lin)
        return out

    def to_csv(self, path, fitted=None) -> None:
        """Write ``r, delta, value`` (plus an optional fitted-model column)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            header = ["r", "delta", "value"] + (["fitted"] if fitted is not None else [])
            w.writerow(header)
            for i in range(self.grid.n):
                row = [repr(float(self.r[i])), repr(float(self.delta[i])), repr(float(self.values[i]))]
                if fitted is not None:
                    row.append(repr(float(fitted[i])))
                w.writerow(row)

    @classmethod
    def read_csv(cls, path, grid: Grid) -> "GridFunction":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        r = np.array([float(row["r"]) for row in rows])
        if len(r) != grid.n or not np.allclose(r, grid.nodes, rtol=1e-14, atol=0):
            raise ValueError("CSV nodes do not match the grid")
        return cls(grid, np.array([float(row["value"]) for row in rows]))


# ---------------------------------------------------------------------------
# surface integrals and traces


@dataclass(frozen=True)
class SurfaceIntegral:
    eps: float
    total: float
    components: dict


def _resolvable_eps(grid: Grid, comp: BoundaryComponent) -> tuple[float, float] | None:
    """Admissible eps-range for a boundary component, or None if not covered."""
    dom = grid.domain
    lo_d = delta(dom, grid.lo)
    hi_d = delta(dom, grid.hi)
    w = grid.widths
    if comp.side > 0:
        # eps measured from above: the grid must reach toward comp.r
        if abs(grid.hi - comp.r) > 0.5 * (comp.r - grid.lo):
            return None
        eps_lo = hi_d + 2.0 * w[-1]
        eps_hi = comp.r - grid.nodes[0]
    else:
        if abs(grid.lo - comp.r) > 0.5 * (grid.hi - comp.r):
            return None
        eps_lo = lo_d + 2.0 * w[0]
        eps_hi = grid.nodes[-1] - comp.r
    if dom.kind != "ball":
        eps_hi = min(eps_hi, dom.inradius)
    return float(eps_lo), float(eps_hi)


def covered_components(grid: Grid) -> list[BoundaryComponent]:
    return [c for c in grid.domain.components if _resolvable_eps(grid, c) is not None]


def surface_integral(u: GridFunction, eps: float, component: str | None = None) -> SurfaceIntegral:
    """Integral of ``u`` over ``Sigma_eps = {delta = eps}``, per boundary component.

    The components covered by the grid are integrated separately and summed.
    """
    grid = u.grid
    comps = covered_components(grid)
    if component is not None:
        comps = [c for c in comps if c.name == component]
        if not comps:
            raise ValueError(f"component {component!r} not covered by the grid")
    if not comps:
        raise ValueError("grid does not reach any boundary component")
    parts = {}
    for c in comps:
        lo, hi = _resolvable_eps(grid, c)
        if not lo <= eps <= hi:
            raise ValueError(f"eps={eps:g} outside the resolvable range [{lo:.3g}, {hi:.3g}] "
                             f"for component {c.name!r}")
        r = grid.domain.radius_at(c, eps)
        parts[c.name] = float(grid.domain.area_factor(r) * u.interp(r)[0])
    return SurfaceIntegral(float(eps), float(sum(parts.values())), parts)


def resolvable_range(grid: Grid, component: str | None = None) -> tuple[float, float]:
    ranges = [_resolvable_eps(grid, c) for c in covered_components(grid)
              if component is None or c.name == component]
    if not ranges:
        raise ValueError("grid does not reach the requested boundary component")
    return max(r[0] for r in ranges), min(r[1] for r in ranges)


@dataclass(frozen=True)
class TraceEstimate:
    """Normalized boundary trace ``T(eps) = eps^(-alpha_-) * int_{Sigma_eps} u dS``."""

    eps_sequence: tuple
    normalized_values: tuple
    extrapolated_limit: float
    fitted_rate: float
    converged: bool
    fit_residual: float = math.nan
    components: dict = field(default_factory=dict)
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "eps_sequence": list(self.eps_sequence),
            "normalized_values": list(self.normalized_values),
            "extrapolated_limit": self.extrapolated_limit,
            "fitted_rate": self.fitted_rate,
            "converged": self.converged,
            "fit_residual": self.fit_residual,
            "components": dict(self.components),
            "note": self.note,
        }


def trace_from_samples(eps, values, rtol: float = 2e-2, abs_floor: float = 0.0) -> TraceEstimate:
    """Build a TraceEstimate from samples of T on a decreasing geometric eps ladder."""
    eps = tuple(float(e) for e in eps)
    values = tuple(float(v) for v in values)
    scale = max(max(abs(v) for v in values), abs_floor, 1e-300)
    fit = iterated_aitken(eps, values, rtol=rtol, abs_floor=abs_floor)
    limit = fit.limit
    converged = fit.converged
    note = fit.note
    if converged and abs(limit) < 1e-12 * scale:
        limit = 0.0
    same_sign = all(v > 0 for v in values) or all(v < 0 for v in values)
    if converged and same_sign and limit * values[-1] < 0 and abs(limit) > rtol * scale:
        # a limit on the far side of zero from every sample is an artifact of the fit
        converged = False
        note = "extrapolated limit crosses zero; " + note
    if not converged and np.all(np.isfinite(values)) and note == "differences do not shrink":
        note += "; no limit reported"
    return TraceEstimate(eps, values, float(limit), float(fit.rate), bool(converged),
                         float(fit.residual), {}, note)


def default_eps_ladder(rho: float, count: int, floor: float) -> list[float]:
    eps = [rho / 8.0 * 0.5 ** k for k in range(count)]
    return [e for e in eps if e >= floor]


def normalized_trace(u: GridFunction, pair: ExponentPair, eps_count: int = 10,
                     rho: float | None = None, component: str | None = None,
                     rtol: float = 2e-2) -> TraceEstimate:
    """Estimate the normalized boundary trace of ``u``.

    ``T(eps)`` is sampled on ``eps_k = rho/8 * 2^-k`` inside the resolvable
    range and extrapolated by repeated Aitken passes, which remove
    ``T ~ L + C eps^p`` and its next corrections. Oscillating or growing
    sequences come back with ``converged=False`` and a NaN limit.
    """
    if eps_count < 3:
        raise ValueError("eps_count must be >= 3")
    grid = u.grid
    if rho is None:
        rho = grid.domain.inradius
    comps = [c for c in covered_components(grid) if component is None or c.name == component]
    lo, hi = resolvable_range(grid, component)
    eps = [e for e in default_eps_ladder(rho, eps_count, lo) if e <= hi]
    if len(eps) < 3:
        raise ValueError(f"only {len(eps)} eps values in the resolvable range [{lo:.3g}, {hi:.3g}]")
    am = pair.alpha_minus
    per = {c.name: [] for c in comps}
    for e in eps:
        s = surface_integral(u, e)
        for c in comps:
            per[c.name].append(s.components[c.name] * e ** (-am))
    totals = [sum(per[c.name][k] for c in comps) for k in range(len(eps))]
    est = trace_from_samples(eps, totals, rtol=rtol)
    comp_limits = {}
    if len(comps) > 1:
        for c in comps:
            f = trace_from_samples(eps, per[c.name], rtol=rtol)
            comp_limits[c.name] = f.extrapolated_limit
    else:
        comp_limits[comps[0].name] = est.extrapolated_limit
    return TraceEstimate(est.eps_sequence, est.normalized_values, est.extrapolated_limit,
                         est.fitted_rate, est.converged, est.fit_residual, comp_limits, est.note)


# ---------------------------------------------------------------------------
# weighted L^q norms


@dataclass(frozen=True)
class LqNorm:
    value: float
    error_estimate: float
    converged: bool
    levels: tuple
    observed_rate: float


def _midpoint_sum(grid: Grid, integrand_nodes: np.ndarray) -> float:
    """Midpoint rule; a cell touching ``delta = 0`` uses the local power law instead.

    Fitting ``f ~ delta^p`` through the two nodes nearest the boundary and
    integrating it exactly over the end cell keeps integrable singularities
    from converging at the midpoint rule's slow rate ``h^{gamma (p+1)}``.
    Fits with ``p <= -0.95`` keep the midpoint value, so divergence (and
    near-divergence) still shows up under refinement.
    """
    f = np.asarray(integrand_nodes, dtype=float)
    contrib = f * grid.volumes
    dom = grid.domain
    for end, i0, i1 in (("lo", 0, 1), ("hi", -1, -2)):
        kind = grid.lo_end if end == "lo" else grid.hi_end
        if kind != "surface" or grid.face_delta(end) > 0:
            continue
        d0, d1 = grid.delta[i0], grid.delta[i1]
        g0, g1 = f[i0], f[i1]
        if g0 <= 0 or g1 <= 0:
            continue
        p = math.log(g1 / g0) / math.log(d1 / d0)
        if p <= -0.95:
            continue
        width = grid.widths[i0]
        # exact for g = g0 (delta/d0)^p with the area factor frozen at the node
        contrib[i0] = g0 * d0 ** -p * width ** (p + 1) / (p + 1) * dom.area_factor(grid.nodes[i0])
    return float(np.sum(contrib))


def _coarsened(grid: Grid, factor: int) -> Grid:
    return interval_grid(grid.domain, grid.lo, grid.hi, grid.n // factor, grid.grading_power,
                         grid.lo_end, grid.hi_end)


def weighted_lq_norm(u, q: float, weight_exp: float, grid: Grid | None = None,
                     rtol: float = 1e-2) -> LqNorm:
    """``int |u|^q delta^weight_exp dx`` by the radial midpoint rule.

    ``u`` is a GridFunction, or a callable of ``r`` together with ``grid``.
    The rule is repeated on the grid coarsened by 2 and 4 (callables are
    re-sampled; grid functions are interpolated in log-log variables); the
    three levels give an observed rate and a Richardson error estimate.
    Integrals whose levels keep growing are reported with
    ``converged=False`` rather than raised.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if callable(u) and not isinstance(u, GridFunction):
        if grid is None:
            raise ValueError("a callable integrand needs a grid")

        def sample(g):
            return np.abs(u(g.nodes)) ** q * g.delta ** weight_exp
    else:
        grid = u.grid

        def sample(g):
            vals = u.values if g is grid else u.interp(g.nodes)
            return np.abs(vals) ** q * g.delta ** weight_exp
    if grid.n < 64:
        raise ValueError("need at least 64 cells for the refinement estimate")
    levels = []
    for factor in (4, 2, 1):
        g = grid if factor == 1 else _coarsened(grid, factor)
        levels.append(_midpoint_sum(g, sample(g)))
    i4, i2, i1 = levels
    d_coarse, d_fine = i2 - i4, i1 - i2
    scale = max(abs(i1), 1e-300)
    if abs(d_fine) <= 1e-13 * scale:
        return LqNorm(i1, abs(d_fine), True, tuple(levels), math.inf)
    if max(abs(d_coarse), abs(d_fine)) <= 1e-3 * rtol * scale:
        # a divergent integral moves by O(1/log) of itself per halving, never this little
        return LqNorm(i1, abs(d_fine), True, tuple(levels), math.nan)
    if d_coarse == 0 or d_fine / d_coarse <= 0:
        rate = math.nan
        err = abs(d_fine)
        converged = err <= rtol * scale
        return LqNorm(i1, err, converged, tuple(levels), rate)
    growth = abs(d_coarse / d_fine)
    rate = math.log(growth, 2)
    if growth <= 2 ** 0.1:
        return LqNorm(i1, math.inf, False, tuple(levels), rate)
    err = abs(d_fine) / (growth - 1.0)
    return LqNorm(i1, err, err <= rtol * scale, tuple(levels), rate)


def integrate_profile(domain: RadialDomain, fn: Callable, n: int = 4096,
                      grading_power: float = 2.0) -> float:
    """Midpoint-rule integral of a radial profile over the whole domain."""
    g = make_grid(domain, n, grading_power)
    return _midpoint_sum(g, fn(g.nodes))


__all__ = [
    "BoundaryComponent",
    "Grid",
    "GridFunction",
    "LqNorm",
    "PowerLawFit",
    "RadialDomain",
    "SurfaceIntegral",
    "TraceEstimate",
    "covered_components",
    "delta",
    "integrate_profile",
    "interval_grid",
    "make_grid",
    "normalized_trace",
    "region_grids",
    "resolvable_range",
    "sphere_area",
    "surface_integral",
    "trace_from_samples",
    "weighted_lq_norm",
]
