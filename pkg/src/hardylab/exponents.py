"""Characteristic exponents of ``Delta + mu/delta^2`` and the critical powers built on them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction


class DomainError(ValueError):
    """Parameter outside the admissible range."""


def _check_mu(mu: float) -> float:
    mu = float(mu)
    if not math.isfinite(mu) or not mu < 0.25:
        raise DomainError(f"mu must satisfy -inf < mu < 1/4 (got {mu!r}); "
                          "mu = 1/4 merges the exponents and is excluded")
    return mu


@dataclass(frozen=True)
class ExponentPair:
    mu: float
    alpha_plus: float
    alpha_minus: float

    @property
    def gap(self) -> float:
        """``alpha_+ - alpha_- = 2 sqrt(1/4 - mu)``."""
        return self.alpha_plus - self.alpha_minus


def exponents(mu: float) -> ExponentPair:
    """Roots of ``a(a-1) + mu = 0``: ``alpha_pm = 1/2 +- sqrt(1/4 - mu)``."""
    mu = _check_mu(mu)
    ap = 0.5 + math.sqrt(0.25 - mu)
    # mu/alpha_+ avoids the cancellation in 1/2 - sqrt(1/4 - mu) for small |mu|
    am = mu / ap
    return ExponentPair(mu, ap, am)


@dataclass(frozen=True)
class ExtendedReal:
    """A real number or +infinity, tagged explicitly."""

    value: float | None = None

    @classmethod
    def infinity(cls) -> "ExtendedReal":
        return cls(None)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def exceeded_by(self, q: float) -> bool:
        """True when ``q >= self``."""
        return (not self.is_infinite) and q >= self.value

    def to_json(self):
        return "inf" if self.is_infinite else self.value

    def __repr__(self) -> str:
        return "ExtendedReal(+inf)" if self.is_infinite else f"ExtendedReal({self.value!r})"


@dataclass(frozen=True)
class CriticalExponents:
    mu: float
    dim: int
    q_c: float
    q_star: ExtendedReal
    pair: ExponentPair = field(repr=False)


def critical_q(mu: float, dim: int) -> CriticalExponents:
    """``q_c = (N + alpha_+)/(N - 1 - alpha_-)`` and ``q* = 1 - 2/alpha_-``.

    ``q*`` is ``+inf`` for ``mu >= 0`` and whenever it overflows a float.
    """
    if int(dim) != dim or dim < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {dim!r}")
    dim = int(dim)
    p = exponents(mu)
    # exact rational arithmetic on the float exponents, rounded once
    am = Fraction(p.alpha_minus)
    q_c = float(1 + 2 / (dim - 1 - am))
    q_star = ExtendedReal.infinity()
    if p.mu < 0:
        try:
            q_star = ExtendedReal(float(1 - 2 / am))
        except OverflowError:
            pass  # alpha_- is subnormal: q* lies beyond the float range
    return CriticalExponents(p.mu, dim, q_c, q_star, p)


class Regime(str, Enum):
    ALL_MEASURES = "all_measures"
    L1_ONLY = "L1_only"
    DIRAC_EXCLUDED = "dirac_excluded"
    NO_NONTRIVIAL = "no_nontrivial"


@dataclass(frozen=True)
class ExistenceClassification:
    regime: Regime
    reasons: tuple
    mu: float
    dim: int
    q: float


def classify(mu: float, dim: int, q: float) -> ExistenceClassification:
    """Which boundary data admit moderate solutions of ``-L_mu u + u^q = 0``.

    ``dirac_excluded`` covers ``q_c <= q < q*``: every L^1 density is still
    admissible but a point mass is not. ``L1_only`` is kept as a label for
    that data class and never returned for ``q < q_c``.
    """
    q = float(q)
    if not q > 1:
        raise DomainError(f"q must exceed 1, got {q!r}")
    crit = critical_q(mu, dim)
    qs = crit.q_star
    if qs.exceeded_by(q):
        reasons = (f"q={q:g} >= q*={qs.value:g}: no positive moderate solution for any nonzero measure",
                   f"alpha_-={crit.pair.alpha_minus:g} <= -2/(q-1)={-2.0 / (q - 1.0):g}")
        return ExistenceClassification(Regime.NO_NONTRIVIAL, reasons, crit.mu, crit.dim, q)
    qs_txt = "inf" if qs.is_infinite else f"{qs.value:g}"
    if q < crit.q_c:
        reasons = (f"q={q:g} < q_c={crit.q_c:g}: every finite boundary measure admissible",
                   f"q < q*={qs_txt}: every L^1 density admissible")
        return ExistenceClassification(Regime.ALL_MEASURES, reasons, crit.mu, crit.dim, q)
    reasons = (f"q={q:g} >= q_c={crit.q_c:g}: no solution with Dirac boundary data",
               f"q < q*={qs_txt}: every L^1 density admissible")
    return ExistenceClassification(Regime.DIRAC_EXCLUDED, reasons, crit.mu, crit.dim, q)
