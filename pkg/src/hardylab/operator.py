"""Finite-volume assembly of ``-(Delta + mu/delta^2)`` on radial grids."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _core
from .exponents import exponents
from .geometry import Grid, GridFunction


def face_conductances(grid: Grid) -> tuple[np.ndarray, float, float]:
    """Flux coefficients ``A_f / (r_{i+1} - r_i)`` at interior faces and at the two ends.

    Each interior coefficient is the series combination of the two
    half-cell conductances on either side of the face (a harmonic mean).
    A ``center`` end carries no flux.
    """
    dom = grid.domain
    r, f = grid.nodes, grid.faces
    area = dom.area_factor(f)
    half_lo = (f[1:-1] - r[:-1]) / area[1:-1]
    half_hi = (r[1:] - f[1:-1]) / area[1:-1]
    interior = 1.0 / (half_lo + half_hi)
    k_lo = 0.0 if grid.lo_end == "center" else float(area[0] / (r[0] - f[0]))
    k_hi = 0.0 if grid.hi_end == "center" else float(area[-1] / (f[-1] - r[-1]))
    return interior, k_lo, k_hi


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Volume-weighted tridiagonal form ``S`` of ``-L_mu`` with Dirichlet ends.

    ``S u - k_lo g_lo e_0 - k_hi g_hi e_last = V * (-L_mu u)`` where ``g`` are
    the end values; ``S`` is symmetric. ``weight_delta`` replaces the
    distance in the potential (e.g. the distance to a strip's boundary).

    At an end whose face lies on the boundary (``delta = 0``) the default
    ``closure="power"`` sets the end row so that it is exact for the local
    power ``delta^{alpha_+}``.  The plain two-point flux (``closure="flux"``)
    is exact only for ``alpha_+ = 1``; for other ``mu`` it mixes a spurious
    ``delta^{alpha_-}`` component of relative size ``h^{alpha_+ - alpha_-}``
    into zero-data solutions.
    """

    grid: Grid
    mu: float
    weight_delta: np.ndarray | None = None
    closure: str = "power"
    sub: np.ndarray = field(init=False, repr=False)
    diag: np.ndarray = field(init=False, repr=False)
    sup: np.ndarray = field(init=False, repr=False)
    k_lo: float = field(init=False)
    k_hi: float = field(init=False)

    def __post_init__(self):
        g = self.grid
        kin, k_lo, k_hi = face_conductances(g)
        d = g.delta if self.weight_delta is None else np.asarray(self.weight_delta, dtype=float)
        vol = g.volumes
        diag = np.zeros(g.n)
        diag[:-1] += kin
        diag[1:] += kin
        diag[0] += k_lo
        diag[-1] += k_hi
        diag -= self.mu * vol / d ** 2
        if self.closure not in ("power", "flux"):
            raise ValueError("closure must be 'power' or 'flux'")
        if self.closure == "power" and g.n >= 2:
            a = exponents(self.mu).alpha_plus
            if g.lo_end == "surface" and g.face_delta("lo") == 0.0:
                diag[0] = kin[0] * (d[1] / d[0]) ** a
                k_lo = float(diag[0] - kin[0] + self.mu * vol[0] / d[0] ** 2)
            if g.hi_end == "surface" and g.face_delta("hi") == 0.0:
                diag[-1] = kin[-1] * (d[-2] / d[-1]) ** a
                k_hi = float(diag[-1] - kin[-1] + self.mu * vol[-1] / d[-1] ** 2)
        off = -kin
        for a in (off, diag):
            a.setflags(write=False)
        object.__setattr__(self, "sub", off)
        object.__setattr__(self, "sup", off)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "k_lo", k_lo)
        object.__setattr__(self, "k_hi", k_hi)

    @property
    def dim(self) -> int:
        return self.grid.domain.dim

    @property
    def volumes(self) -> np.ndarray:
        return self.grid.volumes

    def boundary_vector(self, g_lo: float = 0.0, g_hi: float = 0.0) -> np.ndarray:
        b = np.zeros(self.grid.n)
        b[0] += self.k_lo * g_lo
        b[-1] += self.k_hi * g_hi
        return b

    def weighted_apply(self, u: np.ndarray, g_lo: float = 0.0, g_hi: float = 0.0) -> np.ndarray:
        return _core.tridiag_matvec(self.sub, self.diag, self.sup, np.asarray(u, dtype=float)) \
            - self.boundary_vector(g_lo, g_hi)

    def apply(self, u, g_lo: float = 0.0, g_hi: float = 0.0) -> GridFunction:
        vals = u.values if isinstance(u, GridFunction) else np.asarray(u, dtype=float)
        return GridFunction(self.grid, self.weighted_apply(vals, g_lo, g_hi) / self.volumes)

    def solve(self, rhs, g_lo: float = 0.0, g_hi: float = 0.0, shift=None) -> np.ndarray:
        """Solve ``-L_mu v + shift v = rhs`` with end values ``g``."""
        rhs = rhs.values if isinstance(rhs, GridFunction) else np.asarray(rhs, dtype=float)
        diag = self.diag if shift is None else self.diag + np.asarray(shift) * self.volumes
        b = rhs * self.volumes + self.boundary_vector(g_lo, g_hi)
        return _core.tridiag_solve(self.sub, diag, self.sup, b)


def stiffness_and_mass(grid: Grid, weight_delta=None):
    """Tridiagonal Dirichlet form ``int (u')^2`` and diagonal ``int u^2 / delta^2``."""
    op = DiscreteOperator(grid, 0.0)
    d = grid.delta if weight_delta is None else np.asarray(weight_delta, dtype=float)
    return op, grid.volumes / d ** 2
