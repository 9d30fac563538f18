"""Fast scalar kernels for the structured family g, h built from zero parameters.

The first ``l`` parameters are Blaschke zeros: g gets a factor (z + a),
the rest give g a factor (1 + conj(a) z); h is always prod (1 + conj(a) z).
Plain Python complex arithmetic: these run inside optimiser loops where
numpy call overhead dominates for degrees <= 8.
"""
from __future__ import annotations

import cmath
import math
from typing import List, Sequence, Tuple


def _mul_linear(c: List[complex], a0: complex, a1: complex) -> List[complex]:
    out = [0j] * (len(c) + 1)
    for i, v in enumerate(c):
        out[i] += v * a0
        out[i + 1] += v * a1
    return out


def build_gh(alphas: Sequence[complex], l: int) -> Tuple[List[complex], List[complex]]:
    g = [1 + 0j]
    h = [1 + 0j]
    for j, a in enumerate(alphas):
        ca = a.conjugate()
        h = _mul_linear(h, 1.0, ca)
        if j < l:
            g = _mul_linear(g, a, 1.0)
        else:
            g = _mul_linear(g, 1.0, ca)
    return g, h


def pow_series(h: Sequence[complex], q: float, order: int) -> List[complex]:
    """h**q through ``order`` for h(0) = 1."""
    d = len(h) - 1
    c = [0j] * (order + 1)
    c[0] = 1 + 0j
    h0 = h[0]
    for n in range(1, order + 1):
        acc = 0j
        for j in range(1, min(n, d) + 1):
            acc += ((q + 1) * j - n) * h[j] * c[n - j]
        c[n] = acc / (n * h0)
    return c


def flip_residual(alphas: Sequence[complex], lam: complex, l: int, q: float) -> List[complex]:
    """Entry n = lam * g_{k-n} - conj(c_n), c = coefficients of h**q."""
    k = len(alphas)
    g, h = build_gh(alphas, l)
    c = pow_series(h, q, k)
    return [lam * g[k - n] - c[n].conjugate() for n in range(k + 1)]


def h_norm_sq(h: Sequence[complex]) -> float:
    return sum(v.real * v.real + v.imag * v.imag for v in h)


def coefficient_k(alphas: Sequence[complex], l: int, q: float) -> complex:
    """k-th Taylor coefficient of g * h**q (no normalisation)."""
    k = len(alphas)
    g, h = build_gh(alphas, l)
    c = pow_series(h, q, k)
    return sum(g[j] * c[k - j] for j in range(k + 1))


def normalized_value(alphas: Sequence[complex], l: int, p: float) -> float:
    """|a_k| of A g h^q with A chosen so that ||f||_{H^p} = 1."""
    q = 2.0 / p - 1.0
    k = len(alphas)
    g, h = build_gh(alphas, l)
    c = pow_series(h, q, k)
    ak = sum(g[j] * c[k - j] for j in range(k + 1))
    return abs(ak) / h_norm_sq(h) ** (1.0 / p)


def symmetric_descriptor(alphas: Sequence[complex], l: int):
    """Coefficients of B(z) = prod_{j<l}(z + a_j) and h; permutation invariant."""
    B = [1 + 0j]
    for a in alphas[:l]:
        B = _mul_linear(B, a, 1.0)
    _, h = build_gh(alphas, l)
    return B, h


def rotate(alphas: Sequence[complex], lam: complex, l: int, theta: float):
    """Apply f(z) -> e^{-ik theta} f(e^{i theta} z): a -> e^{-i theta} a."""
    k = len(alphas)
    u = cmath.exp(-1j * theta)
    return [a * u for a in alphas], lam * cmath.exp(-1j * (k - l) * theta)


def canonical_rotation_angles(alphas: Sequence[complex], l: int, tol: float = 1e-9) -> List[float]:
    """Rotations making the first nonzero non-constant coefficient of h real positive."""
    _, h = build_gh(alphas, l)
    for m in range(1, len(h)):
        if abs(h[m]) > tol:
            # h_m -> e^{i m theta} h_m
            base = -cmath.phase(h[m]) / m
            return [base + 2 * math.pi * r / m for r in range(m)]
    return [0.0]


def _sort_group(group):
    return sorted(group, key=lambda a: (round(a.real, 9), round(a.imag, 9)))


def canonicalize(alphas: Sequence[complex], lam: complex, l: int):
    """Unique representative of the rotation and permutation orbit.

    Returns (alphas, lam, descriptor) where the descriptor is a flat tuple
    of floats (B, h, lam) suited to distance comparisons.
    """
    best = None
    for theta in canonical_rotation_angles(alphas, l):
        ra, rl = rotate(alphas, lam, l, theta)
        B, h = symmetric_descriptor(ra, l)
        desc = tuple(x for v in (*h, *B, rl) for x in (v.real, v.imag))
        key = tuple(round(x, 8) for x in desc)
        if best is None or key > best[0]:
            ra = _sort_group(ra[:l]) + _sort_group(ra[l:])
            best = (key, ra, rl, desc)
    _, ra, rl, desc = best
    return ra, rl, desc


def descriptor_distance(d1, d2) -> float:
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(d1, d2)))
