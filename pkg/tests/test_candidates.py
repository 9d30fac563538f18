import math

import numpy as np
import pytest

from conftest import C1_REF, C2_REF, C3_23_REF, P_GRID
from hpx.candidates import (CandidateTable, candidate_value, candidates_k1, candidates_k2,
                            candidates_k3_p23, closed_form_table, cubic_xi_roots, extremal_function,
                            make_candidate, phi, psi)
from hpx.errors import DomainError, StaleCandidate
from hpx.hardy import hp_norm, zeros_in_closed_disc
from hpx.series import Poly

S33 = math.sqrt(33)
# mpmath.findroot on the k=2, l=1 flip system at q=3, 30 digits
K2_L1_HALF = (-0.39948941691431886862, 0.72567115994167110974, 1.1575888148188339591)
# mpmath.polyroots of 10x^3 - 12x^2 + 2x + 1
CUBIC_ROOTS = (-0.20494483326889902846, 0.62809962909795894876, 0.7768452041709400797)
# direct evaluation of the phi formula at q=3
PHI_3 = 1.2245700824015699977


def displayed_three_two_thirds_extremal():
    base = [1, math.sqrt(3 + S33 / 3) / 2, (1 + S33) / 8, math.sqrt(15 - S33) / 8]
    c = np.convolve(np.convolve(base, base), base)
    return ((483 - 19 * S33) / 1153) ** 1.5 * c


def test_k1_table():
    for p, ref in zip(P_GRID, C1_REF):
        t = candidates_k1(p)
        assert [c.l for c in t.entries] == [0, 1]
        assert t.best_candidate.value == pytest.approx(ref, rel=1e-12)
        assert t.by_l(1)[0].value == 1.0
    assert candidates_k1(0.5).best_candidate.alphas[0] == pytest.approx(math.sqrt(1 / 3))
    assert candidates_k1(0.5).best_candidate.value == pytest.approx(2 * 0.75 ** 1.5, rel=1e-14)
    assert candidates_k1(1 - 1e-12).best_candidate.value == pytest.approx(1, abs=1e-10)
    with pytest.raises(DomainError):
        candidates_k1(1.0)


def test_k2_table():
    for p, ref in zip(P_GRID, C2_REF):
        t = candidates_k2(p)
        assert t.best_candidate.l == 0 and t.best_candidate.branch_label == "l0"
        assert t.best_candidate.value == pytest.approx(ref, rel=1e-12)
        assert {c.l for c in t.entries} == {0, 1, 2}
    t = candidates_k2(0.5)
    best = t.best_candidate
    assert best.value == pytest.approx(27 / 16, rel=1e-14)
    assert best.lam == pytest.approx(3)
    assert sum(best.alphas) == pytest.approx(math.sqrt(2 / 3))
    assert np.prod(best.alphas) == pytest.approx(1 / 3)
    (l1,) = t.by_l(1)
    assert sorted(a.real for a in l1.alphas) == pytest.approx(sorted(K2_L1_HALF[:2]), abs=1e-13)
    assert l1.value == pytest.approx(K2_L1_HALF[2], rel=1e-12)
    beta0 = [c for c in t.entries if c.branch_label == "l0_beta0"][0]
    assert beta0.value == pytest.approx(C1_REF[4], rel=1e-12)


def test_curious_identity_on_fine_grid():
    for p in np.linspace(0.05, 0.95, 19):
        assert candidates_k2(p).best_candidate.value == pytest.approx(
            candidates_k1(p).best_candidate.value ** 2, rel=1e-10)


def test_k3_table_values():
    t = candidates_k3_p23()
    vals = {c.branch_label: c.value for c in t.entries}
    assert t.best_candidate.branch_label == "l0_minus" and t.best_candidate.l == 0
    assert t.best_candidate.value == pytest.approx(C3_23_REF, abs=1e-12)
    assert vals["l0_plus"] == pytest.approx(math.sqrt(2 * (1103 - 33 * S33) / 1153), abs=1e-12)
    assert vals["l2"] == pytest.approx(16 / math.sqrt(229), abs=1e-12)
    assert vals["l1_eta0_xi+"] == pytest.approx(2 / math.sqrt(3), abs=1e-12)
    assert vals["l3" if "l3" in vals else "monomial"] == 1.0
    for lab, want in (("l1_cubic_xi1", 1.0739), ("l1_cubic_xi2", 1.1958), ("l1_cubic_xi3", 1.1067)):
        assert abs(vals[lab] - want) < 1e-4
    assert {c.l for c in t.entries} == {0, 1, 2, 3}


def test_k3_rejected_branch_is_kept_with_reason():
    t = candidates_k3_p23()
    rejected = [c for c in t.entries if c.rejected]
    assert [c.branch_label for c in rejected] == ["l1_cubic_xi1"]
    assert rejected[0].reason
    assert t.best != t.entries.index(rejected[0])


def test_cubic_roots_trig_formula():
    raw, polished = cubic_xi_roots()
    assert np.allclose(raw, polished, atol=1e-12, rtol=0)
    assert np.allclose(polished, CUBIC_ROOTS, atol=1e-14, rtol=0)


def test_residuals_of_every_closed_form_candidate():
    tables = [candidates_k1(p) for p in P_GRID] + [candidates_k2(p) for p in P_GRID] + [candidates_k3_p23()]
    for t in tables:
        for c in t.entries:
            assert c.residual_norm() <= 1e-9, (t.k, t.p, c.branch_label)


def test_candidate_value_rules():
    trivial = make_candidate(3, 0.4, 3, [0j] * 3, 1.0)
    assert candidate_value(trivial) == 1.0
    c = candidates_k2(0.5).best_candidate
    assert candidate_value(c) == pytest.approx(27 / 16)
    from dataclasses import replace
    with pytest.raises(StaleCandidate):
        candidate_value(replace(c, lam=c.lam * 1.01))


@pytest.mark.parametrize("table", [candidates_k1(0.3), candidates_k2(0.5), candidates_k2(0.8),
                                   candidates_k3_p23()], ids=["k1", "k2a", "k2b", "k3"])
def test_extremal_functions(table):
    for c in table.entries:
        if c.rejected:
            continue
        f = extremal_function(c)
        assert hp_norm(f, c.p).value == pytest.approx(1, abs=1e-7)
        assert f.taylor(c.k)[c.k] == pytest.approx(c.value, abs=1e-9)
        inside = [r for r in zeros_in_closed_disc(f.g, 0.0) if abs(r) < 1 - 1e-9]
        assert (not inside) == (c.l == 0)


def test_displayed_extremals_match():
    for p in (0.25, 0.5, 0.75):
        f = extremal_function(candidates_k2(p).best_candidate)
        s = math.sqrt(2 * p / (2 - p))
        # the displayed function, with 2/p taken as a real power of an outer quadratic
        from hpx.series import series_pow
        want = (1 - p / 2) ** (2 / p) * series_pow(Poly([1, s, p / (2 - p)]), 2 / p, 6).coeffs
        assert np.allclose(f.taylor(6).coeffs, want, atol=1e-12)
    f = extremal_function(candidates_k3_p23().best_candidate)
    want = displayed_three_two_thirds_extremal()
    assert np.allclose(f.taylor(9).coeffs, want, atol=1e-12)


def test_trivial_extremal_is_monomial():
    f = extremal_function(make_candidate(2, 0.5, 2, [0j, 0j], 1.0))
    assert f.taylor(4).allclose(Poly.monomial(2), 1e-15)


def test_closed_form_table_dispatch():
    from fractions import Fraction
    assert closed_form_table(3, Fraction(2, 3)) is not None
    assert closed_form_table(3, Fraction(6666667, 10000000)) is None
    assert closed_form_table(4, 0.5) is None
    assert closed_form_table(2, 0.5).best_candidate.value == pytest.approx(27 / 16)


def test_table_serialises():
    d = candidates_k3_p23().to_dict()
    assert d["best"] == 0 and len(d["entries"]) == 10
    assert {"alphas", "lambda", "value", "branch_label", "residual", "rejected"} <= set(d["entries"][0])
    with pytest.raises(ValueError):
        CandidateTable.build(1, 0.5, [])


def test_phi_psi():
    assert phi(1.0) == pytest.approx(1, abs=1e-12)
    assert phi(3.0) == pytest.approx(PHI_3, rel=1e-14)
    assert phi(3.0) > 1
    assert psi(1 + math.sqrt(2)) > 0
    grid = np.geomspace(1, 1e3, 10_000)
    vals = np.array([phi(q) for q in grid])
    assert np.all(np.diff(vals) >= -1e-15)
    assert all(psi(q) > 0 for q in grid[1:])
    with pytest.raises(DomainError):
        phi(0.5)
    with pytest.raises(DomainError):
        psi(0.99)
