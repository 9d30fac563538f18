"""Truncated power-series arithmetic over complex scalars.

Every routine takes an explicit truncation order ``order`` (keep the
coefficients of z^0..z^order); nothing here carries an implicit tail.
"""
from __future__ import annotations

from typing import Iterable, Sequence, Union

import numpy as np

from .errors import BranchError, DegreeTooHigh, ZeroConstantTerm

Scalar = Union[int, float, complex]


class Poly:
    """Immutable finite coefficient sequence; index n holds the z^n coefficient.

    Trailing zeros are allowed and ignored by ``==``.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Union["Poly", Iterable[Scalar], np.ndarray]):
        if isinstance(coeffs, Poly):
            arr = coeffs._c
        else:
            arr = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                           dtype=complex).ravel()
        if arr.size == 0:
            raise ValueError("Poly needs at least one coefficient")
        arr = arr.copy()
        arr.setflags(write=False)
        self._c = arr

    @classmethod
    def monomial(cls, n: int, coeff: Scalar = 1.0) -> "Poly":
        c = np.zeros(n + 1, dtype=complex)
        c[n] = coeff
        return cls(c)

    @classmethod
    def from_roots_factors(cls, alphas: Sequence[complex]) -> "Poly":
        """Product of (1 + conj(a) z) over ``alphas``."""
        out = np.array([1.0 + 0j])
        for a in alphas:
            out = np.convolve(out, [1.0, np.conj(a)])
        return cls(out)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        """Representational degree (length - 1)."""
        return self._c.size - 1

    def trimmed_degree(self, tol: float = 0.0) -> int:
        nz = np.nonzero(np.abs(self._c) > tol)[0]
        return int(nz[-1]) if nz.size else 0

    def __len__(self) -> int:
        return self._c.size

    def __getitem__(self, n: int) -> complex:
        if 0 <= n < self._c.size:
            return complex(self._c[n])
        if n < 0:
            raise IndexError(n)
        return 0j

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        n = max(len(self), len(other))
        return bool(np.array_equal(_pad(self._c, n), _pad(other._c, n)))

    def __hash__(self) -> int:
        return hash(tuple(self._c[: self.trimmed_degree() + 1]))

    def allclose(self, other: "Poly", atol: float = 1e-12) -> bool:
        n = max(len(self), len(other))
        return bool(np.max(np.abs(_pad(self._c, n) - _pad(other._c, n))) <= atol)

    def __repr__(self) -> str:
        return f"Poly({np.array2string(self._c, precision=6)})"

    def __call__(self, z):
        return eval_poly(self, z)


def _pad(c: np.ndarray, n: int) -> np.ndarray:
    if c.size >= n:
        return c
    return np.concatenate([c, np.zeros(n - c.size, dtype=complex)])


def _as_poly(a) -> Poly:
    return a if isinstance(a, Poly) else Poly(a)


def cauchy_product(a, b, order: int) -> Poly:
    """Coefficients 0..order of the product a*b."""
    if order < 0:
        raise ValueError("truncation order must be >= 0")
    a, b = _as_poly(a), _as_poly(b)
    prod = np.convolve(a.coeffs[: order + 1], b.coeffs[: order + 1])
    return Poly(_pad(prod[: order + 1], order + 1))


def binomial_general(q: float, n: int) -> float:
    """Generalised binomial coefficient q(q-1)...(q-n+1)/n!."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = 1.0
    for j in range(n):
        out *= (q - j) / (j + 1)
    return out


def _is_integer(q: float) -> bool:
    return float(q).is_integer()


def series_pow(h, q: float, order: int) -> Poly:
    """Coefficients 0..order of h(z)**q.

    Uses the J.C.P. Miller recurrence
    ``n h_0 c_n = sum_{j=1}^{min(n, deg h)} ((q+1) j - n) h_j c_{n-j}``.
    For non-integer q the constant term must be real positive so the
    principal branch is unambiguous.
    """
    if order < 0:
        raise ValueError("truncation order must be >= 0")
    h = _as_poly(h)
    hc = h.coeffs
    h0 = complex(hc[0])
    if h0 == 0:
        raise ZeroConstantTerm("h(0) = 0; h**q has no power series at the origin")
    if _is_integer(q):
        c0 = h0 ** int(q)
    else:
        if abs(h0.imag) > 1e-14 * abs(h0) or h0.real <= 0:
            raise BranchError(f"h(0) = {h0!r} is not real positive")
        c0 = complex(h0.real ** q)
    d = min(len(hc) - 1, order)
    c = np.zeros(order + 1, dtype=complex)
    c[0] = c0
    for n in range(1, order + 1):
        acc = 0j
        for j in range(1, min(n, d) + 1):
            acc += ((q + 1) * j - n) * hc[j] * c[n - j]
        c[n] = acc / (n * h0)
    return Poly(c)


def flip(g, k: int) -> Poly:
    """Return z^k g(1/z): coefficient n is g_{k-n}."""
    g = _as_poly(g)
    if g.trimmed_degree() > k:
        raise DegreeTooHigh(f"deg g = {g.trimmed_degree()} exceeds k = {k}")
    c = _pad(g.coeffs, k + 1)[: k + 1]
    return Poly(c[::-1])


def conj_reflect(h) -> Poly:
    """Coefficient-wise conjugation, i.e. z -> conj(h(conj(z)))."""
    return Poly(np.conj(_as_poly(h).coeffs))


def eval_poly(pol, z):
    """Horner evaluation; ``z`` may be a scalar or an array."""
    c = _as_poly(pol).coeffs
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z) + c[-1]
    for a in c[-2::-1]:
        acc = acc * z + a
    return complex(acc) if acc.ndim == 0 else acc


def taylor_coefficient(g, h, q: float, k: int, A: float = 1.0) -> complex:
    """k-th coefficient of A * g * h**q."""
    return complex(A * cauchy_product(g, series_pow(h, q, k), k)[k])


def poly_power_int(h, n: int) -> Poly:
    """Exact integer power by repeated convolution (no truncation)."""
    out = np.array([1.0 + 0j])
    for _ in range(n):
        out = np.convolve(out, _as_poly(h).coeffs)
    return Poly(out)


__all__ = [
    "Poly",
    "cauchy_product",
    "binomial_general",
    "series_pow",
    "flip",
    "conj_reflect",
    "eval_poly",
    "taylor_coefficient",
    "poly_power_int",
]
