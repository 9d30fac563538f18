"""Closed-form structured extremal candidates for k = 1, k = 2 and (k, p) = (3, 2/3).

Each Blaschke count l = 0..k reduces the flip equation to a
small polynomial system; the solutions are written out below and every
one is validated against the generic residual before it is tabled.
Parameters are stored in the gauge used to solve each case; the rotation
f(z) -> e^{-ik t} f(e^{it} z) acts on them as a -> e^{-it} a.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from . import _family
from .errors import DomainError, StaleCandidate
from .hardy import FactoredFunction
from .series import Poly

RESIDUAL_TOL = 1e-9
_UNIT_EPS = 1e-12


def _to_float(p) -> float:
    return float(p) if isinstance(p, Fraction) else float(p)


@dataclass(frozen=True)
class StructuredCandidate:
    k: int
    p: float
    l: int
    alphas: Tuple[complex, ...]
    lam: complex
    value: float = float("nan")
    branch_label: str = ""
    rejected: bool = False
    reason: str = ""

    @property
    def q(self) -> float:
        return 2.0 / self.p - 1.0

    def residual(self) -> List[complex]:
        return _family.flip_residual(self.alphas, self.lam, self.l, self.q)

    def residual_norm(self) -> float:
        return max(abs(r) for r in self.residual())

    def symmetric(self) -> dict:
        """Elementary symmetric functions of the parameters (beta, gamma, ..., product)."""
        e = np.poly(np.array(self.alphas, dtype=complex))
        return {f"e{n}": complex((-1) ** n * e[n]) for n in range(1, self.k + 1)}

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "p": self.p,
            "l": self.l,
            "alphas": [[a.real, a.imag] for a in self.alphas],
            "lambda": [self.lam.real, self.lam.imag],
            "value": self.value,
            "branch_label": self.branch_label,
            "residual": self.residual_norm(),
            "rejected": self.rejected,
            "reason": self.reason,
        }


def candidate_value(c: StructuredCandidate) -> float:
    """|lambda| * ||h||_2^{2(1 - 1/p)}, valid only at a solution of the flip equation."""
    res = c.residual_norm()
    if not res <= RESIDUAL_TOL:
        raise StaleCandidate(f"flip residual {res:.3g} exceeds {RESIDUAL_TOL:g}")
    _, h = _family.build_gh(c.alphas, c.l)
    return abs(c.lam) * _family.h_norm_sq(h) ** (1.0 - 1.0 / c.p)


def _admissibility(alphas: Sequence[complex], l: int) -> str:
    for j, a in enumerate(alphas):
        if j < l and not abs(a) < 1 - _UNIT_EPS:
            return f"Blaschke zero alpha_{j + 1} has modulus {abs(a):.6g} >= 1"
        if abs(a) > 1 + _UNIT_EPS:
            return f"alpha_{j + 1} has modulus {abs(a):.6g} > 1"
    return ""


def make_candidate(k, p, l, alphas, lam, label="") -> StructuredCandidate:
    alphas = tuple(complex(a) for a in alphas)
    c = StructuredCandidate(k=k, p=_to_float(p), l=l, alphas=alphas, lam=complex(lam), branch_label=label)
    reason = _admissibility(alphas, l)
    return replace(c, value=candidate_value(c), rejected=bool(reason), reason=reason)


def extremal_function(c: StructuredCandidate) -> FactoredFunction:
    """Normalised f = A g h^q with A = ||h||_2^{-2/p}, rotated so that a_k > 0."""
    alphas = list(c.alphas)
    if c.l < c.k and c.lam != 0:
        alphas, _ = _family.rotate(alphas, c.lam, c.l, cmath.phase(c.lam) / (c.k - c.l))
    g, h = _family.build_gh(alphas, c.l)
    A = _family.h_norm_sq(h) ** (-1.0 / c.p)
    return FactoredFunction(Poly(g), Poly(h), c.q, A)


@dataclass(frozen=True)
class CandidateTable:
    k: int
    p: float
    entries: Tuple[StructuredCandidate, ...]
    best: int = field(default=0)

    @classmethod
    def build(cls, k, p, entries) -> "CandidateTable":
        entries = tuple(sorted(entries, key=lambda c: -c.value))
        if not entries:
            raise ValueError("empty candidate table")
        admissible = [i for i, c in enumerate(entries) if not c.rejected]
        best = admissible[0] if admissible else 0
        return cls(k, _to_float(p), entries, best)

    @property
    def best_candidate(self) -> StructuredCandidate:
        return self.entries[self.best]

    def by_l(self, l: int) -> List[StructuredCandidate]:
        return [c for c in self.entries if c.l == l]

    def to_dict(self) -> dict:
        return {"k": self.k, "p": self.p, "best": self.best,
                "entries": [c.to_dict() for c in self.entries]}


def _check_p(p):
    pf = _to_float(p)
    if not 0 < pf < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    return pf


def _roots_from_symmetric(*e) -> List[complex]:
    """Roots of z^k - e1 z^{k-1} + e2 z^{k-2} - ..."""
    coeffs = [1.0] + [(-1) ** (n + 1) * v for n, v in enumerate(e)]
    return [complex(r) for r in np.roots(coeffs)]


def _monomial(k, p, label="monomial"):
    return make_candidate(k, p, k, [0j] * k, 1.0, label)


def candidates_k1(p) -> CandidateTable:
    pf = _check_p(p)
    a = math.sqrt(pf / (2 - pf))
    entries = [_monomial(1, pf), make_candidate(1, pf, 0, [a], 1 / a, "outer")]
    return CandidateTable.build(1, pf, entries)


def candidates_k2(p) -> CandidateTable:
    pf = _check_p(p)
    q = 2 / pf - 1
    entries = [_monomial(2, pf)]

    # l = 1: alpha_1 < 0 < alpha_2, lambda = 1/alpha_2
    s2q, s2overq = math.sqrt(2 * q), math.sqrt(2 / q)
    a1 = -math.sqrt(1 / ((1 + s2overq) * (1 + s2q)))
    a2 = math.sqrt((1 + s2overq) / (1 + s2q))
    entries.append(make_candidate(2, pf, 1, [a1, a2], 1 / a2, "l1"))

    # l = 0, beta != 0: product 1/q, sum sqrt(2/q), lambda = q
    beta, prod = s2overq, 1 / q
    entries.append(make_candidate(2, pf, 0, _roots_from_symmetric(beta, prod), q, "l0"))

    # l = 0, beta = 0: the k = 1 extremal in the variable z^2
    r = q ** -0.25
    entries.append(make_candidate(2, pf, 0, [1j * r, -1j * r], math.sqrt(q), "l0_beta0"))
    return CandidateTable.build(2, pf, entries)


def cubic_xi_roots(polish: bool = True) -> Tuple[Tuple[float, float, float], Tuple[float, float, float]]:
    """Roots of 10 x^3 - 12 x^2 + 2 x + 1 by the trigonometric formulas.

    Returns (raw, polished); polishing is one Newton step.
    """
    th = math.atan(5 * math.sqrt(111) / 117) / 3
    s = math.sqrt(7 / 3)
    raw = (
        0.4 * (1 - s * math.cos(th)),
        0.2 * (2 + s * (math.cos(th) - math.sqrt(3) * math.sin(th))),
        0.2 * (2 + s * (math.cos(th) + math.sqrt(3) * math.sin(th))),
    )
    if not polish:
        return raw, raw

    def newton(x):
        f = ((10 * x - 12) * x + 2) * x + 1
        d = (30 * x - 24) * x + 2
        return x - f / d

    return raw, tuple(newton(x) for x in raw)


P23 = Fraction(2, 3)


def candidates_k3_p23() -> CandidateTable:
    p = P23
    entries = [_monomial(3, p)]

    # l = 2: rho = alpha_3 = sqrt(3)/2, eta = alpha_1 + alpha_2, xi = alpha_1 alpha_2
    rho = math.sqrt(3) / 2
    eta, xi = -math.sqrt(3) / 3, 0.25
    entries.append(make_candidate(3, p, 2, _roots_from_symmetric(eta, xi) + [rho], 1 / rho, "l2"))

    # l = 1: rho = alpha_1, eta = alpha_2 + alpha_3, xi = alpha_2 alpha_3, lambda = 1/xi
    for sign, tag in ((1, "+"), (-1, "-")):
        xi = sign / math.sqrt(2)
        entries.append(make_candidate(3, p, 1, [0j] + _roots_from_symmetric(0.0, xi), 1 / xi,
                                      f"l1_eta0_xi{tag}"))
    _, xis = cubic_xi_roots()
    for i, xi in enumerate(xis, start=1):
        eta = math.sqrt((1 - 2 * xi * xi) / (2 - 3 * xi))
        rho = eta / xi - 2 * eta
        entries.append(make_candidate(3, p, 1, [rho] + _roots_from_symmetric(eta, xi), 1 / xi,
                                      f"l1_cubic_xi{i}"))

    # l = 0: alpha = product, beta = sum, gamma = second symmetric function
    s33 = math.sqrt(33)
    for sgn, tag in ((-1, "minus"), (1, "plus")):
        alpha = math.sqrt(15 + sgn * s33) / 8
        beta = -sgn * math.sqrt(3 - sgn * s33 / 3) / 2
        gamma = (1 - sgn * s33) / 8
        entries.append(make_candidate(3, p, 0, _roots_from_symmetric(beta, gamma, alpha), 1 / alpha,
                                      f"l0_{tag}"))
    # beta = gamma = 0: the k = 1 extremal in the variable z^3
    a = 1 / math.sqrt(2)
    cube = a ** (1 / 3)
    alphas = [cube * complex(math.cos(2 * math.pi * j / 3), math.sin(2 * math.pi * j / 3)) for j in range(3)]
    entries.append(make_candidate(3, p, 0, alphas, 1 / a, "l0_beta0"))
    return CandidateTable.build(3, p, entries)


def closed_form_table(k: int, p):
    """Candidate table for the closed-form cases, or None."""
    pf = _to_float(p)
    if k == 1:
        return candidates_k1(pf)
    if k == 2:
        return candidates_k2(pf)
    if k == 3 and is_two_thirds(p):
        return candidates_k3_p23()
    return None


def is_two_thirds(p) -> bool:
    if isinstance(p, Fraction):
        return p == P23
    return abs(float(p) - 2 / 3) <= 4 * np.finfo(float).eps


def phi(q: float) -> float:
    if q < 1:
        raise DomainError(f"phi needs q >= 1, got {q}")
    return math.sqrt((1 + math.sqrt(2 / q)) / (1 + math.sqrt(2 * q))) * q * (1 + 1 / q) ** (1 - q)


def psi(q: float) -> float:
    if q < 1:
        raise DomainError(f"psi needs q >= 1, got {q}")
    return math.sqrt(2) / (1 + q) - math.log1p(1 / q)
