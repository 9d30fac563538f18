"""Fejer-Riesz spectral factorisation of nonnegative trigonometric polynomials.

Small degrees only: the factor is found by pairing the roots of the
Laurent symbol z^k Q(z) with their reflections 1/conj(w).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotNonnegative, PairingFailure
from .series import Poly

GRID_NODES = 4096
PAIR_RTOL = 1e-7
CIRCLE_SNAP = 1e-7


@dataclass(frozen=True)
class TrigPoly:
    """Q(theta) = sum_{|n|<=k} a_n e^{i n theta}; ``coeffs`` runs a_{-k}..a_k."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if c.size % 2 != 1:
            raise ValueError("TrigPoly needs an odd number of coefficients a_{-k}..a_k")
        scale = max(1.0, float(np.max(np.abs(c))))
        if np.max(np.abs(c - np.conj(c[::-1]))) > 1e-12 * scale:
            raise ValueError("coefficients are not Hermitian symmetric")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_nonnegative(cls, a) -> "TrigPoly":
        """Build from a_0..a_k (negative indices by conjugate symmetry)."""
        a = np.asarray(a, dtype=complex)
        return cls(np.concatenate([np.conj(a[:0:-1]), a]))

    @property
    def degree(self) -> int:
        return (self.coeffs.size - 1) // 2

    def coeff(self, n: int) -> complex:
        k = self.degree
        if abs(n) > k:
            return 0j
        return complex(self.coeffs[n + k])

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        k = self.degree
        n = np.arange(-k, k + 1)
        vals = np.exp(1j * np.multiply.outer(theta, n)) @ self.coeffs
        return vals.real

    def sup_norm(self, nodes: int = GRID_NODES) -> float:
        return float(np.max(np.abs(self(2 * np.pi * np.arange(nodes) / nodes))))


def modulus_squared(pol) -> TrigPoly:
    """|P(e^{i theta})|^2 as a TrigPoly: a_n = sum_j p_{j+n} conj(p_j)."""
    p = Poly(pol).coeffs
    full = np.correlate(p, p, mode="full")
    # exact Hermitian symmetry
    full = 0.5 * (full + np.conj(full[::-1]))
    return TrigPoly(full)


def _trim(Q: TrigPoly) -> np.ndarray:
    c = Q.coeffs
    k = Q.degree
    scale = np.max(np.abs(c))
    while k > 0 and abs(c[0]) <= 1e-14 * scale:
        c = c[1:-1]
        k -= 1
    return c


def _pair_off_circle(outside, inside):
    inside = list(inside)
    reps = []
    for w in sorted(outside, key=lambda x: (-abs(x), np.angle(x))):
        target = 1.0 / np.conj(w)
        if not inside:
            raise PairingFailure("unmatched root outside the circle")
        dists = [abs(v - target) for v in inside]
        j = int(np.argmin(dists))
        if dists[j] > PAIR_RTOL * abs(w):
            raise PairingFailure(f"root {w} has no reflection partner (closest miss {dists[j]:.3g})")
        inside.pop(j)
        reps.append(w)
    if inside:
        raise PairingFailure("unmatched roots inside the circle")
    return reps


def _pair_on_circle(roots):
    roots = list(roots)
    if len(roots) % 2:
        raise PairingFailure("odd number of roots on the unit circle")
    reps = []
    while roots:
        w = roots.pop(0)
        j = int(np.argmin([abs(v - w) for v in roots]))
        v = roots.pop(j)
        m = 0.5 * (w + v)
        reps.append(m / abs(m))
    return reps


def spectral_factor(Q: TrigPoly, tol: float = 1e-12) -> Poly:
    """Outer P with |P|^2 = Q on the circle and P(0) > 0."""
    grid = Q(2 * np.pi * np.arange(GRID_NODES) / GRID_NODES)
    if np.min(grid) < -tol:
        raise NotNonnegative(f"Q dips to {np.min(grid):.3g} on the grid")
    c = _trim(Q)
    k = (c.size - 1) // 2
    a0 = c[k].real
    if k == 0:
        if a0 <= 0:
            raise NotNonnegative("Q is identically zero or negative")
        return Poly([np.sqrt(a0)])
    roots = np.roots(c[::-1])
    try:
        return _factor_from_roots(roots, c, a0, Q)
    except PairingFailure:
        # multiple zeros on the circle scatter at roughly eps**(1/m); merge them
        merged = _merge_circle_clusters(roots)
        if merged is None:
            raise
        return _factor_from_roots(merged, c, a0, Q)


def _merge_circle_clusters(roots, link=1e-2):
    """Replace each cluster whose centroid lies on the circle by copies of that point."""
    n = len(roots)
    label = list(range(n))
    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) < link:
                old, new = label[j], label[i]
                label = [new if x == old else x for x in label]
    out, changed = [], False
    for lab in sorted(set(label)):
        group = roots[[i for i in range(n) if label[i] == lab]]
        centre = group.mean()
        if group.size > 1 and abs(abs(centre) - 1.0) < CIRCLE_SNAP:
            out.extend([centre / abs(centre)] * group.size)
            changed = True
        else:
            out.extend(group)
    return np.array(out) if changed else None


def _factor_from_roots(roots, c, a0, Q) -> Poly:
    mods = np.abs(roots)
    on = roots[np.abs(mods - 1.0) < CIRCLE_SNAP]
    outside = roots[mods >= 1.0 + CIRCLE_SNAP]
    inside = roots[mods <= 1.0 - CIRCLE_SNAP]
    reps = _pair_off_circle(outside, inside) + _pair_on_circle(on)
    r = np.array([1.0 + 0j])
    for w in reps:
        r = np.convolve(r, [1.0, -1.0 / w])
    scale = np.sqrt(a0 / np.sum(np.abs(r) ** 2))
    P = Poly(scale * r)
    back = modulus_squared(P).coeffs
    err = np.max(np.abs(back - c)) if back.size == c.size else np.inf
    if err > 1e-9 * max(1.0, Q.sup_norm()):
        raise PairingFailure(f"reconstruction error {err:.3g} exceeds tolerance")
    return P
