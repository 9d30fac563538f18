"""Levenberg-Marquardt solution of the flip-equation system at arbitrary (k, p, l).

Unknowns are the k zero parameters and the multiplier lambda, as 2k + 2
reals. The rotation symmetry leaves a flat direction, which is removed by
one extra real equation Im(alpha_k) = 0; on convergence alpha_k is made
nonnegative by a half-turn.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _family
from ._parallel import pmap
from .candidates import StructuredCandidate, _admissibility, make_candidate
from .errors import DomainError

CONVERGED_TOL = 1e-11
DISTINCT_TOL = 1e-6
_FD_STEP = 1e-7


@dataclass(frozen=True)
class FlipSystem:
    k: int
    p: float
    l: int
    gauge: str = "alpha_k"

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("k must be >= 1")
        if not 0 < self.p < 1:
            raise DomainError(f"solver needs 0 < p < 1, got {self.p}")
        if not 0 <= self.l <= self.k:
            raise DomainError(f"l must lie in 0..{self.k}")
        if self.gauge != "alpha_k":
            raise DomainError(f"unknown gauge {self.gauge!r}")

    @property
    def q(self) -> float:
        return 2.0 / self.p - 1.0


@dataclass(frozen=True)
class SolveReport:
    candidate: Optional[StructuredCandidate]
    iterations: int
    final_residual: float
    starts_tried: int
    status: str  # converged | diverged | left_domain
    raw_alphas: Tuple[complex, ...] = ()
    raw_lam: complex = 0j
    descriptor: Tuple[float, ...] = ()
    max_imag: float = float("nan")
    hits: int = 1

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "starts_tried": self.starts_tried,
            "hits": self.hits,
            "max_imag": self.max_imag,
            "candidate": self.candidate.to_dict() if self.candidate else None,
        }


def residual(sys: FlipSystem, alphas: Sequence[complex], lam: complex) -> List[complex]:
    return _family.flip_residual([complex(a) for a in alphas], complex(lam), sys.l, sys.q)


def _unpack(x: np.ndarray, k: int):
    alphas = [complex(x[j], x[k + j]) for j in range(k)]
    return alphas, complex(x[2 * k], x[2 * k + 1])


def _pack(alphas, lam) -> np.ndarray:
    a = np.asarray(alphas, dtype=complex)
    return np.concatenate([a.real, a.imag, [lam.real, lam.imag]])


def _F(x: np.ndarray, sys: FlipSystem) -> np.ndarray:
    k = sys.k
    alphas, lam = _unpack(x, k)
    r = _family.flip_residual(alphas, lam, sys.l, sys.q)
    out = np.empty(2 * k + 3)
    for n, v in enumerate(r):
        out[n] = v.real
        out[k + 1 + n] = v.imag
    out[-1] = x[2 * k - 1]  # Im(alpha_k)
    return out


def _jac(x: np.ndarray, sys: FlipSystem) -> np.ndarray:
    m = x.size
    J = np.empty((2 * sys.k + 3, m))
    for i in range(m):
        e = np.zeros(m)
        e[i] = _FD_STEP
        J[:, i] = (_F(x + e, sys) - _F(x - e, sys)) / (2 * _FD_STEP)
    return J


def _complex_norm(Fx: np.ndarray, k: int) -> float:
    return float(np.linalg.norm(Fx[: 2 * k + 2]))


def _out_of_domain(x: np.ndarray, sys: FlipSystem) -> bool:
    k = sys.k
    for j in range(sys.l):
        if math.hypot(x[j], x[k + j]) > 1 + 1e-9:
            return True
    return False


def _finish(sys, x, it, res, starts_tried) -> SolveReport:
    k, l = sys.k, sys.l
    alphas, lam = _unpack(x, k)
    if alphas[-1].real < 0:
        alphas, lam = _family.rotate(alphas, lam, l, math.pi)
    reason = _admissibility(alphas, l)
    if reason:
        return SolveReport(None, it, res, starts_tried, "left_domain", tuple(alphas), lam)
    can_alphas, can_lam, desc = _family.canonicalize(alphas, lam, l)
    cand = make_candidate(k, sys.p, l, can_alphas, can_lam, "solver")
    max_imag = max(abs(v) for v in desc[1::2])
    return SolveReport(cand, it, res, starts_tried, "converged", tuple(alphas), lam, desc, max_imag)


def solve(sys: FlipSystem, start_alphas: Sequence[complex], start_lam: complex,
          max_iter: int = 200, tol: float = CONVERGED_TOL) -> SolveReport:
    """Damped Gauss-Newton from one start."""
    k = sys.k
    if len(start_alphas) != k:
        raise DomainError(f"need {k} start parameters")
    x = _pack(start_alphas, complex(start_lam))
    if _out_of_domain(x, sys):
        raise DomainError("start lies outside the admissible domain")
    Fx = _F(x, sys)
    cost = float(Fx @ Fx)
    mu = 1e-3
    for it in range(max_iter + 1):
        res = _complex_norm(Fx, k)
        if res <= tol and abs(Fx[-1]) <= tol:
            return _finish(sys, x, it, res, 1)
        if it == max_iter:
            break
        J = _jac(x, sys)
        A = J.T @ J
        g = J.T @ Fx
        accepted = False
        for _ in range(30):
            try:
                step = -np.linalg.solve(A + mu * np.eye(A.shape[0]), g)
            except np.linalg.LinAlgError:
                mu *= 4
                continue
            x_new = x + step
            if _out_of_domain(x_new, sys):
                x_new = x + 0.5 * step
                if _out_of_domain(x_new, sys):
                    a, lam = _unpack(x_new, k)
                    return SolveReport(None, it, res, 1, "left_domain", tuple(a), lam)
            F_new = _F(x_new, sys)
            c_new = float(F_new @ F_new)
            if np.isfinite(c_new) and c_new < cost:
                x, Fx, cost = x_new, F_new, c_new
                mu = max(mu / 3, 1e-15)
                accepted = True
                break
            mu *= 4
        if not accepted:
            break
    a, lam = _unpack(x, k)
    return SolveReport(None, it, _complex_norm(Fx, k), 1, "diverged", tuple(a), lam)


def random_starts(sys: FlipSystem, n_starts: int, seed: int):
    """Parameters uniform in the disc of radius 0.95; lambda = 1/|prod| clipped to [0.1, 10]."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_starts):
        r = 0.95 * np.sqrt(rng.random(sys.k))
        t = 2 * np.pi * rng.random(sys.k)
        alphas = list(r * np.exp(1j * t))
        prod = float(np.prod(r))
        lam0 = min(max(1.0 / prod if prod > 0 else 10.0, 0.1), 10.0)
        out.append((alphas, complex(lam0)))
    return out


def _solve_start(start, sys):
    alphas, lam = start
    return solve(sys, alphas, lam)


def run_starts(sys: FlipSystem, n_starts: int, seed: int = 0) -> List[SolveReport]:
    """Every start's report, in start order."""
    if n_starts < 1:
        raise DomainError("n_starts must be >= 1")
    return pmap(functools.partial(_solve_start, sys=sys), random_starts(sys, n_starts, seed))


def _dedupe(reports: Sequence[SolveReport], key) -> List[SolveReport]:
    distinct: List[SolveReport] = []
    for rep in reports:
        d = key(rep)
        for i, other in enumerate(distinct):
            if _family.descriptor_distance(d, key(other)) < DISTINCT_TOL:
                distinct[i] = _with_hits(other, other.hits + 1)
                break
        else:
            distinct.append(rep)
    return distinct


def _with_hits(rep: SolveReport, hits: int) -> SolveReport:
    from dataclasses import replace

    return replace(rep, hits=hits)


def _raw_key(rep: SolveReport):
    a = list(rep.raw_alphas)
    l = rep.candidate.l
    a = _family._sort_group(a[:l]) + _family._sort_group(a[l:])
    return tuple(x for v in (*a, rep.raw_lam) for x in (v.real, v.imag))


def solve_multistart(sys: FlipSystem, n_starts: int, seed: int = 0) -> List[SolveReport]:
    """Distinct converged solutions (canonical gauge), sorted by descriptor."""
    reports = [r for r in run_starts(sys, n_starts, seed) if r.converged]
    distinct = _dedupe(reports, key=lambda r: r.descriptor)
    distinct = [
        SolveReport(r.candidate, r.iterations, r.final_residual, n_starts, r.status, r.raw_alphas,
                    r.raw_lam, r.descriptor, r.max_imag, r.hits)
        for r in distinct
    ]
    return sorted(distinct, key=lambda r: tuple(round(x, 8) for x in r.descriptor))


def multistart_summary(sys: FlipSystem, n_starts: int, seed: int = 0) -> dict:
    """Status tallies plus distinct counts in the solver gauge and the canonical gauge."""
    reports = run_starts(sys, n_starts, seed)
    conv = [r for r in reports if r.converged]
    return {
        "starts": n_starts,
        "converged": len(conv),
        "diverged": sum(r.status == "diverged" for r in reports),
        "left_domain": sum(r.status == "left_domain" for r in reports),
        "distinct_raw": len(_dedupe(conv, key=_raw_key)),
        "distinct_canonical": len(_dedupe(conv, key=lambda r: r.descriptor)),
    }
