"""H^p quasi-norms of factored functions A * g * h**q by periodic quadrature."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateInput, DomainError, NoConvergence
from .fejer_riesz import modulus_squared
from .series import Poly

MIN_LOG2_NODES = 10
MAX_LOG2_NODES = 20
NEAR_CIRCLE_LOG2_NODES = 18
NEAR_CIRCLE_BAND = 1e-6
ZERO_FREE_TOL = 1e-9


@dataclass(frozen=True)
class NormEstimate:
    value: float
    p: float
    samples: int
    err_estimate: float

    def to_dict(self) -> dict:
        return {"value": self.value, "p": self.p, "samples": self.samples,
                "err_estimate": self.err_estimate}


@dataclass(frozen=True)
class FactoredFunction:
    """f = A * g * h**q with h zero-free in the open disc.

    Zeros of h within ``ZERO_FREE_TOL`` of the circle are tolerated (they
    are handled by the quadrature as near-circle singularities).
    """

    g: Poly
    h: Poly
    q: float
    A: float = 1.0
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "g", Poly(self.g))
        object.__setattr__(self, "h", Poly(self.h))
        if not self.q > 0:
            raise DomainError(f"q must be positive, got {self.q}")
        if not self.A > 0:
            raise DomainError(f"A must be positive, got {self.A}")
        if self.check:
            inside = [r for r in zeros_in_closed_disc(self.h, 0.0) if abs(r) < 1 - ZERO_FREE_TOL]
            if inside:
                raise DomainError(f"h vanishes inside the disc at {inside}")

    def boundary_modulus(self, n: int) -> np.ndarray:
        """|f| at the n-th roots of unity."""
        return self.A * np.abs(_circle_values(self.g, n)) * np.abs(_circle_values(self.h, n)) ** self.q

    def taylor(self, order: int) -> Poly:
        from .series import cauchy_product, series_pow

        return Poly(self.A * cauchy_product(self.g, series_pow(self.h, self.q, order), order).coeffs)


def _circle_values(pol: Poly, n: int) -> np.ndarray:
    c = pol.coeffs
    if c.size > n:
        # fold aliases: z^(j+n) = z^j on the n-th roots of unity
        folded = np.zeros(n, dtype=complex)
        for start in range(0, c.size, n):
            chunk = c[start:start + n]
            folded[: chunk.size] += chunk
        c = folded
    return np.fft.ifft(c, n) * n


def _power_mean(f: FactoredFunction, p: float, n: int) -> float:
    mod = f.boundary_modulus(n)
    return float(np.mean(mod ** p)) ** (1.0 / p)


def has_near_circle_zero(f: FactoredFunction) -> bool:
    for pol in (f.g, f.h):
        if pol.trimmed_degree() == 0:
            continue
        for r in zeros_in_closed_disc(pol, NEAR_CIRCLE_BAND):
            if abs(abs(r) - 1.0) <= NEAR_CIRCLE_BAND:
                return True
    return False


def hp_norm(f: FactoredFunction, p: float, target_tol: float = 1e-13) -> NormEstimate:
    """Boundary p-mean of |f| with node doubling from 2**10 up to 2**20."""
    if not p > 0:
        raise DomainError(f"p must be positive, got {p}")
    if not target_tol > 0:
        raise DomainError("target_tol must be positive")
    log2n = NEAR_CIRCLE_LOG2_NODES if has_near_circle_zero(f) else MIN_LOG2_NODES
    n = 1 << log2n
    prev = _power_mean(f, p, n)
    while True:
        n *= 2
        cur = _power_mean(f, p, n)
        diff = abs(cur - prev)
        if diff < target_tol:
            return NormEstimate(cur, p, n, diff)
        if n >= 1 << MAX_LOG2_NODES:
            est = NormEstimate(cur, p, n, diff)
            raise NoConvergence(f"quadrature did not reach {target_tol:g} (last change {diff:.3g})", est)
        prev = cur


def h2_norm_sq(pol) -> float:
    """Parseval: sum of squared coefficient moduli."""
    c = Poly(pol).coeffs
    return float(np.sum(np.abs(c) ** 2))


@dataclass(frozen=True)
class NormIdentityReport:
    hp_pow: float
    parseval_h: float
    residual_h: float
    parseval_g: Optional[float]
    residual_g: Optional[float]
    ok: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def same_boundary_modulus(g: Poly, h: Poly, tol: float = 1e-12) -> bool:
    a, b = modulus_squared(g).coeffs, modulus_squared(h).coeffs
    n = max(a.size, b.size)
    pa = np.pad(a, ((n - a.size) // 2,))
    pb = np.pad(b, ((n - b.size) // 2,))
    return bool(np.max(np.abs(pa - pb)) <= tol * max(1.0, np.max(np.abs(pb))))


def check_norm_identities(f: FactoredFunction, p: float, tol: float = 1e-8) -> NormIdentityReport:
    """Compare ||f||_p^p with A^p ||h||_2^2 (and A^p ||g||_2^2 when |g| = |h| on the circle).

    The comparison only holds when q = 2/p - 1, i.e. f = g h^(2/p-1).
    """
    est = hp_norm(f, p)
    hp_pow = est.value ** p
    par_h = f.A ** p * h2_norm_sq(f.h)
    res_h = abs(hp_pow - par_h)
    par_g = res_g = None
    ok = res_h <= tol
    if same_boundary_modulus(f.g, f.h):
        par_g = f.A ** p * h2_norm_sq(f.g)
        res_g = abs(hp_pow - par_g)
        ok = ok and res_g <= tol
    return NormIdentityReport(hp_pow, par_h, res_h, par_g, res_g, ok)


def _polish(c_low: np.ndarray, r: complex, steps: int = 3) -> complex:
    dc = np.arange(1, c_low.size) * c_low[1:]
    for _ in range(steps):
        f = np.polyval(c_low[::-1], r)
        d = np.polyval(dc[::-1], r) if dc.size else 0
        if d == 0 or f == 0:
            break
        step = f / d
        if not np.isfinite(step):
            break
        r_new = r - step
        if abs(np.polyval(c_low[::-1], r_new)) >= abs(f):
            break
        r = r_new
    return complex(r)


def all_roots(pol) -> np.ndarray:
    """All roots (companion eigenvalues, Newton polished), low-order input."""
    c = Poly(pol).coeffs
    if np.all(np.abs(c) < 1e-300):
        raise DegenerateInput("polynomial is identically zero")
    d = Poly(c).trimmed_degree()
    c = c[: d + 1]
    if d == 0:
        return np.zeros(0, dtype=complex)
    raw = np.roots(c[::-1])
    return np.array([_polish(c, r) for r in raw], dtype=complex)


def zeros_in_closed_disc(pol, tol: float = 1e-9) -> list:
    """Roots of ``pol`` with modulus <= 1 + tol."""
    return [complex(r) for r in all_roots(pol) if abs(r) <= 1.0 + tol]
