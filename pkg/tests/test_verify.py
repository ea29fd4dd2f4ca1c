import math

import numpy as np
import pytest

from convproj import fixtures
from convproj.core import HAUSDORFF, MOCP, SolutionSet, cp_solution, kappa_over, lift_maps
from convproj.reductions import translate_cp_to_mocp_solution
from convproj.verify import (
    _bisect,
    appendix_lemma_optimizers,
    appendix_lemma_value,
    brute_appendix_lemma,
    brute_simplex_lemma,
    hausdorff_estimate,
    minimal_cp_tolerance,
    minimal_mocp_tolerance,
    verify_cp_solution,
    verify_mocp_solution,
)


def test_bisect_finds_threshold():
    assert _bisect(lambda e: e >= 0.3721, None, 1e-9) == pytest.approx(0.3721, abs=1e-8)
    assert _bisect(lambda e: True, None, 1e-9) == 0.0
    assert _bisect(lambda e: False, 4.0, 1e-3) == pytest.approx(4.0, abs=1e-3)


def test_cp_minimal_tolerance_quarter_disc():
    spec = fixtures.quarter_ball(2)
    sol = cp_solution(spec, fixtures.quarter_ball_solution_points(2), 1.0, 2.0)
    eps = minimal_cp_tolerance(spec, sol, n_directions=400)
    assert eps == pytest.approx(fixtures.quarter_ball_cp_tolerance(2, 2.0), abs=1e-5)


def test_mocp_minimal_tolerance_segment():
    spec = fixtures.segment(2)
    z = np.zeros((1, 3))
    sol = SolutionSet(z, z[:, 1:], 1.0, 2.0, kind=MOCP)
    eps = minimal_mocp_tolerance(spec, sol, n_directions=400)
    assert eps == pytest.approx(math.sqrt(3.0), abs=1e-5)


def test_verification_fails_below_tolerance():
    spec = fixtures.quarter_ball(2)
    eps = fixtures.quarter_ball_cp_tolerance(2, 2.0)
    sol = cp_solution(spec, fixtures.quarter_ball_solution_points(2), eps, 2.0)
    assert verify_cp_solution(spec, sol, n_directions=400).passed
    cert = verify_cp_solution(spec, sol.replace(epsilon=0.9 * eps), n_directions=400)
    assert not cert.passed
    # the worst direction is the diagonal
    w = cert.worst_direction
    assert abs(w[0] - w[1]) < 1e-3 and w[0] > 0


def test_hausdorff_flavor_gap():
    spec = fixtures.quarter_ball(2)
    h = 1.0 - 1.0 / math.sqrt(2.0)
    sol = cp_solution(spec, fixtures.quarter_ball_solution_points(2), h, 2.0, flavor=HAUSDORFF)
    assert verify_cp_solution(spec, sol, n_directions=400).passed
    assert not verify_cp_solution(spec, sol.replace(epsilon=0.95 * h), n_directions=400).passed
    assert hausdorff_estimate(spec, fixtures.quarter_ball_solution_points(2), 2.0) == pytest.approx(h, abs=1e-6)


def test_self_bounded_solution_with_recession():
    # two points plus the ray (0, 1) cover the disc plus the ray; the gap is
    # the distance from the lower arc to the segment [(-1,-1),(1,-1)] + ray
    spec = fixtures.disc_plus_ray()
    pts = np.array([[-1.0, -1.0], [1.0, -1.0]])
    Z = np.zeros((2, 4))
    sol = SolutionSet(Z, pts, 0.0, 2.0, recession=np.array([[0.0, 1.0]]))
    # those points are not in S, but the containment check only needs images
    assert verify_cp_solution(spec, sol, n_directions=400).passed
    lifted = translate_cp_to_mocp_solution(sol, self_bounded=True)
    assert verify_mocp_solution(spec, lifted, n_directions=400).passed
    # without the ray the upward directions fail
    assert not verify_cp_solution(spec, sol.replace(recession=None), n_directions=400).passed


def test_mocp_verification_of_wrong_kind():
    Y = np.zeros((1, 2))
    with pytest.raises(ValueError):
        verify_mocp_solution(fixtures.quarter_ball(2), SolutionSet(Y, Y, 0.1, 2.0))
    with pytest.raises(ValueError):
        verify_cp_solution(fixtures.quarter_ball(2), SolutionSet(Y, Y, 0.1, 2.0, kind=MOCP))


@pytest.mark.parametrize("m", [2, 3, 4])
def test_simplex_lemma_vertices(m, p):
    r, val = brute_simplex_lemma(m, p)
    assert val == pytest.approx(kappa_over(m, p) * (1.0 if math.isinf(p) else (m + 1) ** (1 / p)), rel=1e-12)
    # the maximizer is a scaled unit vector
    assert np.count_nonzero(r) == 1 and r.max() == pytest.approx(m + 1)


def test_appendix_resolved_closed_form():
    # regression pin: eps (m^{p-1} + 1)^{1/p}, i.e. the operator norm of Q
    for m in (1, 2, 3, 5):
        assert appendix_lemma_value(m, 2.0) == pytest.approx(math.sqrt(m + 1))
        assert appendix_lemma_value(m, 1.0) == pytest.approx(2.0)
        assert appendix_lemma_value(m, math.inf) == pytest.approx(m)
        assert appendix_lemma_value(m, 3.0, eps=0.5) == pytest.approx(0.5 * (m ** 2 + 1) ** (1 / 3))

def test_appendix_value_without_root_is_not_attained():
    # the form without the 1/p root, eps (m^{p-1} + 1), is off for p = 2
    _, _, val = brute_appendix_lemma(2, 2.0)
    assert val == pytest.approx(math.sqrt(3), rel=1e-6)
    assert abs(val - 3.0) > 1.0


def test_appendix_optimizers_feasible(p):
    for m in (1, 2, 3):
        r, b = appendix_lemma_optimizers(m, p, eps=0.7)
        assert np.all(r >= 0)
        assert r.sum() == pytest.approx(b.sum())
        assert np.linalg.norm(b, ord=p) <= 0.7 + 1e-12


def test_appendix_brute_is_blind_and_matches():
    r, b, v = brute_appendix_lemma(2, 3.0, eps=1.0, samples=2000)
    assert v == pytest.approx(appendix_lemma_value(2, 3.0), rel=1e-6)
    assert np.linalg.norm(b, ord=3) <= 1.0 + 1e-9
