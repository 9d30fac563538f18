"""Closed-form values of C(k, p) and upper bounds for it."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import DomainError, InvariantViolation

_TWO_THIRDS = Fraction(2, 3)
C_3_23 = math.sqrt(2 * (1103 + 33 * math.sqrt(33)) / 1153)


def _is_two_thirds(p) -> bool:
    if isinstance(p, Fraction):
        return p == _TWO_THIRDS
    return abs(float(p) - 2 / 3) <= 4 * 2.220446049250313e-16


def _pow_one_minus_half_p(p: float, exponent: float) -> float:
    """(1 - p/2)**exponent without cancellation for small p."""
    return math.exp(exponent * math.log1p(-p / 2))


def c1(p: float) -> float:
    """C(1, p) = sqrt(2/p) (1 - p/2)^(1/p - 1/2)."""
    return math.sqrt(2 / p) * _pow_one_minus_half_p(p, 1 / p - 0.5)


def c2(p: float) -> float:
    """C(2, p) = (2/p) (1 - p/2)^(2/p - 1)."""
    return (2 / p) * _pow_one_minus_half_p(p, 2 / p - 1)


def closed_form_C(k: int, p) -> Optional[float]:
    """Known exact value of C(k, p), or None."""
    if k < 1:
        raise DomainError("k must be >= 1")
    pf = float(p)
    if not pf > 0:
        raise DomainError(f"p must be positive, got {p}")
    if pf >= 1:
        return 1.0
    if k == 1:
        return c1(pf)
    if k == 2:
        return c2(pf)
    if k == 3 and _is_two_thirds(p):
        return C_3_23
    return None


def dual_bound(k: int, p) -> float:
    """Gamma(k/2 + 1/p) / (Gamma(k/2 + 1) Gamma(1/p)).

    Valid as an upper bound for C(k, p) only under the conjectured sharp
    constant 1 in the area-integral embedding (known when 1/p is an integer).
    """
    pf = float(p)
    if not 0 < pf < 1:
        raise DomainError(f"dual bound needs 0 < p < 1, got {p}")
    if k < 0:
        raise DomainError("k must be >= 0")
    s = 1 / pf
    return math.exp(math.lgamma(k / 2 + s) - math.lgamma(k / 2 + 1) - math.lgamma(s))


def hl_bound(k: int, p) -> float:
    """k^(1/p - 1) C(1, p), the Hardy-Littlewood form with C(1, p) as constant."""
    pf = float(p)
    if not 0 < pf < 1:
        raise DomainError(f"Hardy-Littlewood bound needs 0 < p < 1, got {p}")
    return k ** (1 / pf - 1) * c1(pf)


@dataclass(frozen=True)
class BoundReport:
    k: int
    p: float
    closed_form: Optional[float]
    hl_bound: float
    dual_bound: float
    dual_bound_conditional: bool
    inverse_p_integer: bool
    monomial_lower: float = 1.0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def report(k: int, p) -> BoundReport:
    pf = float(p)
    if not pf > 0:
        raise DomainError(f"p must be positive, got {p}")
    cf = closed_form_C(k, p)
    if pf >= 1:
        # trivial regime: every bound collapses to the monomial value
        hl = du = 1.0
    else:
        hl, du = hl_bound(k, p), dual_bound(k, p)
    inv = 1 / pf
    rep = BoundReport(k, pf, cf, hl, du, True, abs(inv - round(inv)) <= 1e-12)
    if cf is not None:
        slack = 1e-12 * max(1.0, cf)
        if not (rep.monomial_lower - slack <= cf <= min(hl, du) + slack):
            raise InvariantViolation(f"bounds out of order at k={k}, p={p}: {rep}")
    return rep
