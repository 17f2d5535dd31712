"""Limit extrapolation for sequences sampled on geometric parameter ladders."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PowerLawFit:
    """Fit of ``v(s) ~ limit + coef * s**rate`` as ``s -> 0``."""

    limit: float
    coef: float
    rate: float
    residual: float
    converged: bool
    note: str = ""


def fit_power_limit(s, values, rtol: float = 1e-2) -> PowerLawFit:
    """Extrapolate ``values`` to ``s -> 0`` assuming ``v = L + C s^p``.

    ``s`` must be strictly decreasing with a constant ratio. The last three
    samples fix (L, C, p) by Aitken's delta-squared process; any earlier
    samples only enter the residual. ``converged`` requires p > 0, no sign
    flip in successive differences, and the model to reproduce every sample
    within ``rtol`` of the sample scale.
    """
    s = np.asarray(s, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(s) < 3 or len(s) != len(v):
        raise ValueError("need at least three samples")
    if not np.all(np.diff(s) < 0):
        raise ValueError("parameter sequence must be strictly decreasing")
    if not np.all(np.isfinite(v)):
        return PowerLawFit(math.nan, math.nan, math.nan, math.inf, False, "non-finite samples")
    ratio = s[-2] / s[-1]
    scale = max(float(np.max(np.abs(v))), 1e-300)
    d1 = v[-2] - v[-3]
    d2 = v[-1] - v[-2]
    if abs(d2) <= 1e-14 * scale and abs(d1) <= 1e-14 * scale:
        return PowerLawFit(float(v[-1]), 0.0, math.inf, 0.0, True, "constant sequence")
    if d1 == 0.0 or d2 / d1 <= 0.0:
        return PowerLawFit(math.nan, math.nan, math.nan, math.inf, False,
                           "successive differences change sign")
    growth = d1 / d2
    if growth <= 1.0:
        return PowerLawFit(math.nan, math.nan, math.log(growth) / math.log(ratio), math.inf,
                           False, "differences do not shrink")
    p = math.log(growth) / math.log(ratio)
    limit = v[-1] + d2 / (growth - 1.0)
    coef = (v[-1] - limit) / s[-1] ** p
    model = limit + coef * s ** p
    residual = float(np.max(np.abs(model - v))) / scale
    return PowerLawFit(float(limit), float(coef), float(p), residual, residual <= rtol)


def richardson(coarse: float, fine: float, ratio: float, order: float) -> float:
    """Classical two-level Richardson extrapolation for an ``h**order`` error."""
    f = ratio ** order
    return (f * fine - coarse) / (f - 1.0)


def observed_order(e_coarse: float, e_fine: float, ratio: float = 2.0) -> float:
    return math.log(abs(e_coarse) / abs(e_fine)) / math.log(ratio)


MAX_STEP_RATIO = 0.95


def _aitken_pass(w: np.ndarray):
    """One delta-squared pass over the longest tail with monotone, shrinking steps."""
    d = np.diff(w)
    if len(d) < 2:
        return None
    with np.errstate(divide="ignore", invalid="ignore"):
        r = d[1:] / d[:-1]
    # ratios near 1 mean the differences sit at the noise floor, not on a power
    ok = (r > 0) & (r < MAX_STEP_RATIO)
    k = len(ok)
    while k > 0 and ok[k - 1]:
        k -= 1
    if k == len(ok):
        return None
    return (w[2:] + d[1:] * r / (1.0 - r))[k:]


def iterated_aitken(s, values, rtol: float = 1e-2, abs_floor: float = 0.0) -> PowerLawFit:
    """Repeated Aitken delta-squared on a geometric ladder.

    One pass removes the leading power ``C s^p``; further passes remove the
    next corrections, which a single fit would absorb into the limit. Each
    pass uses only the tail of the ladder where successive differences keep
    one sign and shrink.  The error estimate is the change between the last
    two table levels; ``converged`` requires it below ``rtol`` times the
    sample scale (or ``abs_floor`` when larger).
    """
    s = np.asarray(s, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(s) < 3 or len(s) != len(v):
        raise ValueError("need at least three samples")
    if not np.all(np.diff(s) < 0):
        raise ValueError("parameter sequence must be strictly decreasing")
    if not np.all(np.isfinite(v)):
        return PowerLawFit(math.nan, math.nan, math.nan, math.inf, False, "non-finite samples")
    scale = max(float(np.max(np.abs(v))), abs_floor, 1e-300)
    base = fit_power_limit(s[-3:], v[-3:], rtol=math.inf)
    if base.note == "constant sequence":
        return base
    table = [v]
    while True:
        nxt = _aitken_pass(table[-1])
        if nxt is None or len(nxt) == 0:
            break
        table.append(nxt)
    if len(table) < 2:
        return PowerLawFit(math.nan, math.nan, base.rate, math.inf, False,
                           "successive differences change sign or do not shrink")
    limit = float(table[-1][-1])
    if len(table[-1]) >= 2:
        prev = float(table[-1][-2])
    else:
        prev = float(table[-2][-1])
    err = abs(limit - prev)
    if abs(limit) <= 1e-12 * scale:
        limit = 0.0
    return PowerLawFit(limit, base.coef, base.rate, err / scale, err <= rtol * scale,
                       f"{len(table) - 1} acceleration levels")
