"""Named verification suites run by ``hpx verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List

import numpy as np

from . import _family
from .bounds import closed_form_C, dual_bound, hl_bound
from .candidates import (candidates_k1, candidates_k2, candidates_k3_p23, cubic_xi_roots,
                         extremal_function, phi)
from .fejer_riesz import modulus_squared, spectral_factor, TrigPoly
from .hardy import check_norm_identities, hp_norm
from .search import SearchSettings, polynomial_search, structured_search
from .series import Poly
from .solver import FlipSystem, solve_multistart

P_GRID = [round(0.1 * i, 1) for i in range(1, 10)]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _close(name, got, want, tol, rel=False) -> Check:
    err = abs(got - want) / (abs(want) if rel else 1.0)
    return Check(name, bool(err <= tol), f"got {got!r}, want {want!r}, err {err:.3g}, tol {tol:g}")


def _tables():
    return [candidates_k1(p) for p in P_GRID] + [candidates_k2(p) for p in P_GRID] + [candidates_k3_p23()]


def reference_values(budget: str = "small") -> List[Check]:
    out = []
    for p in P_GRID:
        out.append(_close(f"C(1,{p}) closed form vs l=0 candidate", candidates_k1(p).best_candidate.value,
                          closed_form_C(1, p), 1e-12, rel=True))
        out.append(_close(f"C(2,{p}) closed form vs l=0 candidate", candidates_k2(p).best_candidate.value,
                          closed_form_C(2, p), 1e-12, rel=True))
    c3 = closed_form_C(3, Fraction(2, 3))
    out.append(_close("C(3,2/3) = 1.4973...", c3, 1.4973, 1e-4))
    out.append(_close("C(3,2/3) vs best candidate", candidates_k3_p23().best_candidate.value, c3, 1e-12))
    labels = {"l2": 1.0573, "l1_eta0_xi+": 1.1547, "l1_cubic_xi1": 1.0739, "l1_cubic_xi2": 1.1958,
              "l1_cubic_xi3": 1.1067, "l0_minus": 1.4973}
    table = {c.branch_label: c.value for c in candidates_k3_p23().entries}
    for lab, want in labels.items():
        out.append(_close(f"k=3 p=2/3 branch {lab}", table[lab], want, 1e-4))
    _, xis = cubic_xi_roots()
    for got, want in zip(xis, (-0.2049, 0.6281, 0.7768)):
        out.append(_close(f"cubic root {want}", got, want, 1e-4))
    out.append(_close("dual bound (3,2/3) = 16/(3 pi)", dual_bound(3, Fraction(2, 3)), 16 / (3 * math.pi), 1e-12))
    out.append(_close("phi(1) = 1", phi(1.0), 1.0, 1e-12))
    return out


def identities(budget: str = "small") -> List[Check]:
    out = []
    for t in _tables():
        for c in t.entries:
            out.append(Check(f"residual k={t.k} p={t.p:.4g} {c.branch_label}", c.residual_norm() <= 1e-9,
                             f"{c.residual_norm():.3g}"))
        best = t.best_candidate
        f = extremal_function(best)
        est = hp_norm(f, best.p)
        out.append(_close(f"||f||_p = 1 at k={t.k} p={t.p:.4g}", est.value, 1.0, 1e-7))
        rep = check_norm_identities(f, best.p, 1e-8)
        out.append(Check(f"norm identities k={t.k} p={t.p:.4g}", rep.ok, f"{rep.residual_h:.3g}"))
        ak = f.taylor(t.k)[t.k]
        out.append(_close(f"a_k of extremal k={t.k} p={t.p:.4g}", ak.real, closed_form_C(t.k, best.p), 1e-9))
        out.append(variational_identity_check(best))
    for p in P_GRID:
        out.append(_close(f"C(2,{p}) = C(1,{p})^2", closed_form_C(2, p), closed_form_C(1, p) ** 2, 1e-10, rel=True))
        out.append(_close(f"dual bound (2,{p}) = 1/p", dual_bound(2, p) * p, 1.0, 1e-12))
    out.append(fejer_riesz_roundtrip_check(100 if budget == "full" else 25, seed=1))
    P = spectral_factor(TrigPoly.from_nonnegative([2.0, 1.0]))
    out.append(Check("Fejer-Riesz circle zero 2+2cos", P.allclose(Poly([1, 1]), 1e-8), repr(P)))
    for p in P_GRID:
        for k in (1, 2, 3):
            cf = closed_form_C(k, p)
            ok = cf is None or (1 <= cf <= dual_bound(k, p) + 1e-12 and cf <= hl_bound(k, p) + 1e-12)
            out.append(Check(f"bounds sandwich k={k} p={p}", ok))
    return out


def variational_identity_check(cand, tol: float = 1e-7) -> Check:
    """|L_k(z^n f) - L_k(f) <z^n, |h|^2>| for n = 1..k+2 at a normalised extremal."""
    f = extremal_function(cand)
    k = cand.k
    coeffs = f.taylor(k)
    Lf = coeffs[k]
    h = Poly(f.h.coeffs / math.sqrt(float(np.sum(np.abs(f.h.coeffs) ** 2))))
    Q = modulus_squared(h)
    worst = 0.0
    for n in range(1, k + 3):
        lhs = coeffs[k - n] if n <= k else 0j
        worst = max(worst, abs(lhs - Lf * Q.coeff(-n)))
    return Check(f"variational identity k={k} p={cand.p:.4g} {cand.branch_label}", worst <= tol, f"{worst:.3g}")


def fejer_riesz_roundtrip_check(n: int, seed: int) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        d = int(rng.integers(1, 9))
        roots = rng.uniform(1.05, 3.0, d) * np.exp(2j * np.pi * rng.random(d))
        c = np.array([1.0 + 0j])
        for w in roots:
            c = np.convolve(c, [1.0, -1.0 / w])
        c = c * (rng.normal() + 1j * rng.normal())
        ref = c * np.conj(c[0]) / abs(c[0])
        P = spectral_factor(modulus_squared(c))
        worst = max(worst, float(np.max(np.abs(P.coeffs - ref))))
    return Check(f"Fejer-Riesz round trip x{n}", worst <= 1e-9, f"{worst:.3g}")


def oracle(budget: str = "small") -> List[Check]:
    full = budget == "full"
    settings = SearchSettings(starts=16 if full else 6, max_evals=20_000)
    out = []
    grid = P_GRID if full else [0.3, 0.5, 0.7]
    for p in grid:
        best = max(structured_search(2, p, l, settings.starts, 11, settings).objective for l in range(3))
        out.append(_close(f"structured max over l, k=2 p={p}", best, closed_form_C(2, p), 1e-7))
    best = max(structured_search(3, 2 / 3, l, settings.starts, 11, settings).objective for l in range(4))
    out.append(_close("structured max over l, k=3 p=2/3", best, closed_form_C(3, Fraction(2, 3)), 1e-7))
    r = polynomial_search(2, 0.5, 8, 16 if full else 8, seed=5)
    out.append(Check("polynomial search k=2 p=1/2 m=8", 27 / 16 - 1e-4 <= r.objective <= 27 / 16 + 1e-8,
                     f"{r.objective!r}"))
    r = polynomial_search(3, 2 / 3, 9, 16 if full else 8, seed=5)
    cf = closed_form_C(3, Fraction(2, 3))
    out.append(Check("polynomial search k=3 p=2/3 m=9", cf - 1e-3 <= r.objective <= cf + 1e-8, f"{r.objective!r}"))
    out.extend(solver_recovery_checks(200 if full else 60))
    return out


def solver_recovery_checks(n_starts: int, p_values=(0.25, 0.5, 0.75)) -> List[Check]:
    out = []
    cases = [(t, l) for p in p_values for t in (candidates_k1(p), candidates_k2(p)) for l in range(t.k + 1)]
    t3 = candidates_k3_p23()
    cases += [(t3, l) for l in range(4)]
    for t, l in cases:
        found = solve_multistart(FlipSystem(t.k, t.p, l), n_starts, seed=2024)
        known = [c for c in t.by_l(l) if not c.rejected]
        known_desc = [_family.canonicalize(list(c.alphas), c.lam, l)[2] for c in known]
        got = [r.descriptor for r in found]
        missing = [c.branch_label for c, d in zip(known, known_desc)
                   if min((_family.descriptor_distance(d, g) for g in got), default=np.inf) > 1e-8]
        extra = [g for g in got if min(_family.descriptor_distance(d, g) for d in known_desc) > 1e-6]
        out.append(Check(f"solver recovers k={t.k} p={t.p:.4g} l={l}", not missing and not extra,
                         f"missing={missing} extra={len(extra)} found={len(got)}"))
    return out


SUITES: Dict[str, Callable[[str], List[Check]]] = {
    "paper-values": reference_values,
    "identities": identities,
    "oracle": oracle,
}
