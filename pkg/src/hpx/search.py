"""Brute-force lower-bound oracles for C(k, p) and the conjecture probes.

``structured_search`` maximises over the structured family directly
(Nelder-Mead, exact norms from coefficients). ``polynomial_search`` makes
no structural assumption: it maximises Re a_k / ||f||_p over arbitrary
polynomials of a given degree with quadrature norms.
"""
from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from . import _family
from ._parallel import pmap
from .bounds import closed_form_C
from .errors import DomainError
from .hardy import FactoredFunction, hp_norm, zeros_in_closed_disc
from .series import Poly

CLAMP = 1 - 1e-6


@dataclass(frozen=True)
class SearchSettings:
    starts: int = 64
    max_evals: int = 20_000
    restarts: int = 6
    quad_nodes: int = 512
    quad_tol: float = 1e-10
    seed: int = 20240601


@dataclass(frozen=True)
class SearchResult:
    objective: float
    params: tuple
    mode: str
    starts: int
    evals: int
    seed: int
    k: int = 0
    p: float = 0.0
    l: Optional[int] = None
    degree: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "params": [[complex(v).real, complex(v).imag] for v in self.params],
            "mode": self.mode,
            "starts": self.starts,
            "evals": self.evals,
            "seed": self.seed,
            "k": self.k,
            "p": self.p,
            "l": self.l,
            "degree": self.degree,
        }


def _order_key(res):
    # deterministic total order: objective first, then parameters
    return (-res[0], tuple(round(x, 12) for x in res[1]))


def _child_seeds(seed: int, n: int) -> List[int]:
    ss = np.random.SeedSequence(seed)
    return [int(s.generate_state(1)[0]) for s in ss.spawn(n)]


# ---------------------------------------------------------------- structured

def _clamp_params(x: np.ndarray, k: int) -> List[complex]:
    out = []
    for j in range(k):
        a = complex(x[j], x[k + j])
        r = abs(a)
        if r > CLAMP:
            a *= CLAMP / r
        out.append(a)
    return out


def _structured_objective(x, k, l, p):
    return -_family.normalized_value(_clamp_params(x, k), l, p)


def _simplex(x0: np.ndarray, scale: float) -> np.ndarray:
    n = x0.size
    s = np.tile(x0, (n + 1, 1))
    for i in range(n):
        s[i + 1, i] += scale
    return s


def _nelder_mead(fun, x0, max_evals, restarts, scale=0.1):
    """Nelder-Mead with simplex reinitialisation at 0.1x scale on stall."""
    best_x, best_f = np.asarray(x0, float), fun(np.asarray(x0, float))
    evals = 1
    for _ in range(restarts + 1):
        budget = max_evals - evals
        if budget <= 0:
            break
        r = minimize(fun, best_x, method="Nelder-Mead",
                     options={"initial_simplex": _simplex(best_x, scale), "maxfev": budget,
                              "xatol": 1e-10, "fatol": 1e-14, "adaptive": best_x.size > 4})
        evals += r.nfev
        improved = best_f - r.fun
        if r.fun < best_f:
            best_x, best_f = r.x, r.fun
        if improved < 1e-13:
            break
        scale *= 0.1
    return best_x, best_f, evals


def _structured_start(seed, k, l, p, max_evals, restarts):
    rng = np.random.default_rng(seed)
    r = 0.95 * np.sqrt(rng.random(k))
    t = 2 * np.pi * rng.random(k)
    x0 = np.concatenate([r * np.cos(t), r * np.sin(t)])
    fun = functools.partial(_structured_objective, k=k, l=l, p=p)
    x, f, evals = _nelder_mead(fun, x0, max_evals, restarts)
    return (-f, tuple(x), evals)


def structured_search(k: int, p: float, l: int, n_starts: int = 64, seed: int = 0,
                      settings: Optional[SearchSettings] = None) -> SearchResult:
    """Maximise |a_k| / ||f||_p over the l-Blaschke structured family."""
    settings = settings or SearchSettings()
    p = float(p)
    if not 0 < p < 1:
        raise DomainError(f"structured search needs 0 < p < 1, got {p}")
    if not 0 <= l <= k:
        raise DomainError(f"l must lie in 0..{k}")
    fn = functools.partial(_structured_start, k=k, l=l, p=p, max_evals=settings.max_evals,
                           restarts=settings.restarts)
    runs = pmap(fn, _child_seeds(seed, n_starts))
    evals = sum(r[2] for r in runs)
    best = min(((v, x) for v, x, _ in runs), key=_order_key)
    alphas = _clamp_params(np.array(best[1]), k)
    if l < k:
        ak = _family.coefficient_k(alphas, l, 2 / p - 1)
        if ak != 0:
            alphas, _ = _family.rotate(alphas, 1.0, l, -cmath.phase(ak) / (k - l))
    return SearchResult(float(best[0]), tuple(alphas), "structured", n_starts, evals, seed, k, p, l=l)


# ---------------------------------------------------------------- polynomial

def _poly_objective(x, k, p, N):
    """-(Re c_k) / ||f||_p and its gradient, with the p-mean on N nodes."""
    m1 = x.size // 2
    c = x[:m1] + 1j * x[m1:]
    f = np.fft.ifft(c, N) * N
    mod = np.abs(f)
    mod = np.maximum(mod, 1e-300)
    S = float(np.mean(mod ** p))
    norm = S ** (1 / p)
    val = c[k].real / norm
    W = mod ** (p - 2) * np.conj(f)
    G = np.fft.ifft(W)[:m1]  # mean(W * w^n) over nodes w
    dS = np.concatenate([p * G.real, -p * G.imag])
    # d(val) = d(Re c_k)/norm - val/(p S) dS
    grad = -(val / (p * S)) * dS
    grad[k] += 1.0 / norm
    return -val, -grad


def _poly_start(seed, k, p, m, N, max_evals):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=m + 1) + 1j * rng.normal(size=m + 1)
    c /= np.linalg.norm(c)
    x0 = np.concatenate([c.real, c.imag])
    r = minimize(_poly_objective, x0, args=(k, p, N), jac=True, method="BFGS",
                 options={"maxiter": max_evals, "gtol": 1e-12})
    x = r.x / np.linalg.norm(r.x)
    return (-float(r.fun), tuple(x), int(r.nfev))


def polynomial_search(k: int, p: float, m: int, n_starts: int = 64, quad_tol: float = 1e-10,
                      seed: int = 0, settings: Optional[SearchSettings] = None) -> SearchResult:
    """Maximise Re a_k / ||f||_{H^p} over polynomials of degree m (normalised in H^2).

    The search itself uses a fixed node count; the winner is re-evaluated
    with the adaptive quadrature of :func:`hardy.hp_norm`.
    """
    settings = settings or SearchSettings()
    p = float(p)
    if not p > 0:
        raise DomainError("p must be positive")
    if m < 0:
        raise DomainError("degree must be nonnegative")
    if m < k:
        return SearchResult(0.0, tuple([0j] * (m + 1)), "polynomial", n_starts, 0, seed, k, p, degree=m)
    N = max(settings.quad_nodes, 8 * (m + 1))
    fn = functools.partial(_poly_start, k=k, p=p, m=m, N=N, max_evals=settings.max_evals)
    runs = pmap(fn, _child_seeds(seed, n_starts))
    evals = sum(r[2] for r in runs)
    best = min(((v, x) for v, x, _ in runs), key=_order_key)
    x = np.array(best[1])
    coeffs = x[: m + 1] + 1j * x[m + 1:]
    # unimodular gauge: make a_k real positive
    if coeffs[k] != 0:
        coeffs = coeffs * np.exp(-1j * np.angle(coeffs[k]))
    f = FactoredFunction(Poly(coeffs), Poly([1.0]), 1.0, 1.0, check=False)
    est = hp_norm(f, p, quad_tol)
    value = float(coeffs[k].real) / est.value
    return SearchResult(value, tuple(complex(c) for c in coeffs), "polynomial", n_starts, evals, seed,
                        k, p, degree=m)


# ---------------------------------------------------------------- scan

@dataclass(frozen=True)
class ScanRow:
    k: int
    p: float
    best_l: int
    best_value: float
    closed_form: Optional[float]
    gap: Optional[float]
    zero_free: bool
    a0_nonzero: bool
    by_l: tuple = field(default=(), compare=False)

    CSV_COLUMNS = ("k", "p", "best_l", "best_value", "closed_form", "gap", "zero_free", "a0_nonzero")

    def to_dict(self) -> dict:
        d = {c: getattr(self, c) for c in self.CSV_COLUMNS}
        d["by_l"] = list(self.by_l)
        return d


@dataclass
class ScanReport:
    rows: List[ScanRow]
    anomalies: List[dict]

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows], "anomalies": self.anomalies}


def _scan_row(k, p, settings: SearchSettings, seed: int) -> ScanRow:
    results = [structured_search(k, p, l, settings.starts, seed + 7919 * l, settings) for l in range(k + 1)]
    values = [r.objective for r in results]
    best_l = int(np.argmax(values))
    win = results[best_l]
    g, _ = _family.build_gh(list(win.params), best_l)
    inside = [r for r in zeros_in_closed_disc(Poly(g), 0.0) if abs(r) < 1 - 1e-9]
    a0 = abs(g[0]) > 1e-9
    cf = closed_form_C(k, p)
    gap = None if cf is None else values[best_l] - cf
    return ScanRow(k, float(p), best_l, values[best_l], cf, gap, not inside, a0, tuple(values))


def scan(k_max: int, p_grid: Sequence[float], settings: Optional[SearchSettings] = None,
         tol: float = 1e-7) -> ScanReport:
    """One row per (k, p); conjecture counter-sightings go to ``anomalies``."""
    settings = settings or SearchSettings()
    if any(not 0 < float(p) < 1 for p in p_grid):
        raise DomainError("p grid must lie inside (0, 1)")
    rows = [_scan_row(k, p, settings, settings.seed) for p in p_grid for k in range(1, k_max + 1)]
    rows.sort(key=lambda r: (r.k, r.p))
    anomalies = []
    for r in rows:
        if r.best_l != 0:
            anomalies.append({"kind": "best_l_nonzero", "k": r.k, "p": r.p, "best_l": r.best_l})
        if not r.zero_free:
            anomalies.append({"kind": "extremal_vanishes_in_disc", "k": r.k, "p": r.p})
        if not r.a0_nonzero:
            anomalies.append({"kind": "extremal_vanishes_at_origin", "k": r.k, "p": r.p})
        if r.best_value < 1 - tol:
            anomalies.append({"kind": "below_monomial", "k": r.k, "p": r.p, "value": r.best_value})
    by_p = {}
    for r in rows:
        by_p.setdefault(r.p, {})[r.k] = r.best_value
    for p, col in sorted(by_p.items()):
        ks = sorted(col)
        for a, b in zip(ks, ks[1:]):
            if not col[b] > col[a] + tol:
                anomalies.append({"kind": "not_strictly_increasing", "p": p, "k": a,
                                  "values": [col[a], col[b]]})
    return ScanReport(rows, anomalies)
