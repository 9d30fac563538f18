import cmath
import math

import numpy as np
import pytest

from hpx import _family
from hpx.candidates import candidates_k1, candidates_k2, candidates_k3_p23
from hpx.errors import DomainError
from hpx.fejer_riesz import modulus_squared, spectral_factor
from hpx.solver import (CONVERGED_TOL, FlipSystem, multistart_summary, residual, run_starts, solve,
                        solve_multistart)


def test_flip_system_domain():
    assert FlipSystem(2, 0.5, 0).q == 3
    for bad in [(0, 0.5, 0), (2, 1.0, 0), (2, 0.5, 3), (2, 0.5, -1)]:
        with pytest.raises(DomainError):
            FlipSystem(*bad)
    with pytest.raises(DomainError):
        FlipSystem(2, 0.5, 0, gauge="beta")


def test_residual_examples():
    roots = np.roots([1, -math.sqrt(2 / 3), 1 / 3])
    assert max(map(abs, residual(FlipSystem(2, 0.5, 0), roots, 3))) <= 1e-14
    for k in (1, 3, 5):
        assert residual(FlipSystem(k, 0.37, k), [0j] * k, 1) == [0j] * (k + 1)
    best = candidates_k3_p23().best_candidate
    assert max(map(abs, residual(FlipSystem(3, 2 / 3, 0), best.alphas, best.lam))) <= 1e-12


def test_solve_from_nearby_start():
    sys_ = FlipSystem(2, 0.5, 0)
    roots = np.roots([1, -math.sqrt(2 / 3), 1 / 3])
    roots = roots * np.exp(-1j * np.angle(roots[1]))  # alpha_2 real, as the gauge demands
    rep = solve(sys_, roots + 0.01, 3.05)
    assert rep.converged and rep.iterations <= 10
    assert rep.final_residual <= CONVERGED_TOL
    c = rep.candidate
    assert sum(c.alphas) == pytest.approx(math.sqrt(2 / 3), abs=1e-10)
    assert np.prod(c.alphas) == pytest.approx(1 / 3, abs=1e-10)
    assert c.lam == pytest.approx(3, abs=1e-10)


def test_solve_trivial_branch():
    rep = solve(FlipSystem(3, 2 / 3, 3), [0.01] * 3, 1.0)
    assert rep.converged
    assert np.allclose(rep.candidate.alphas, 0, atol=1e-10)
    assert rep.candidate.lam == pytest.approx(1)


def test_solve_rejects_bad_start():
    with pytest.raises(DomainError):
        solve(FlipSystem(2, 0.5, 1), [1.2, 0.1], 1.0)
    with pytest.raises(DomainError):
        solve(FlipSystem(2, 0.5, 1), [0.1], 1.0)


def test_k1_outer_solution():
    for p in (0.2, 0.5, 0.9):
        sols = solve_multistart(FlipSystem(1, p, 0), 30, seed=3)
        assert len(sols) == 1
        assert abs(sols[0].candidate.alphas[0]) == pytest.approx(math.sqrt(p / (2 - p)), abs=1e-10)


def _descs(table, l):
    return [_family.canonicalize(list(c.alphas), c.lam, l)[2] for c in table.by_l(l) if not c.rejected]


def _matches(found, wanted):
    got = [r.descriptor for r in found]
    return (all(min(_family.descriptor_distance(w, g) for g in got) <= 1e-8 for w in wanted)
            and all(min(_family.descriptor_distance(w, g) for w in wanted) <= 1e-6 for g in got))


def test_k2_l0_has_two_distinct_solutions():
    # the beta = 0 sub-branch is a genuine second solution next to the main one
    found = solve_multistart(FlipSystem(2, 0.5, 0), 50, seed=1)
    assert len(found) == 2
    assert _matches(found, _descs(candidates_k2(0.5), 0))
    assert max(r.candidate.value for r in found) == pytest.approx(27 / 16, abs=1e-10)


def test_k3_l1_solutions_and_counts():
    found = solve_multistart(FlipSystem(3, 2 / 3, 1), 200, seed=7)
    assert _matches(found, _descs(candidates_k3_p23(), 1))
    assert len(found) == 3
    assert all(r.max_imag <= 1e-8 for r in found)
    s = multistart_summary(FlipSystem(3, 2 / 3, 1), 200, seed=7)
    assert s["distinct_canonical"] == 3
    assert s["distinct_raw"] >= s["distinct_canonical"]
    assert s["converged"] + s["diverged"] + s["left_domain"] == 200


def test_determinism():
    a = solve_multistart(FlipSystem(2, 0.3, 1), 20, seed=11)
    b = solve_multistart(FlipSystem(2, 0.3, 1), 20, seed=11)
    assert [r.descriptor for r in a] == [r.descriptor for r in b]
    assert [r.status for r in run_starts(FlipSystem(2, 0.3, 1), 10, 4)] == \
        [r.status for r in run_starts(FlipSystem(2, 0.3, 1), 10, 4)]


def test_gauge_invariance_of_canonical_form():
    c = candidates_k3_p23().best_candidate
    _, _, d0 = _family.canonicalize(list(c.alphas), c.lam, 0)
    for theta in (0.3, 1.7, -2.2):
        a, lam = _family.rotate(list(c.alphas), c.lam, 0, theta)
        assert _family.descriptor_distance(_family.canonicalize(a, lam, 0)[2], d0) <= 1e-10


def test_converged_h_reproduced_by_spectral_factor():
    for r in solve_multistart(FlipSystem(3, 0.5, 0), 40, seed=2):
        _, h = _family.build_gh(list(r.candidate.alphas), 0)
        assert len(h) <= 4
        P = spectral_factor(modulus_squared(h))
        assert np.allclose(P.coeffs, np.asarray(h) * np.conj(h[0]) / abs(h[0]), atol=1e-9)


def test_variational_identity_at_solver_optimum():
    from hpx.verify import variational_identity_check
    best = max(solve_multistart(FlipSystem(3, 0.5, 0), 40, seed=2), key=lambda r: r.candidate.value)
    assert variational_identity_check(best.candidate).passed
