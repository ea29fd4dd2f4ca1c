import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from convproj.core import (
    CP,
    MOCP,
    ConeHRep,
    ConvexSetSpec,
    NotConvex,
    NotInterior,
    QuadraticConstraint,
    SolutionSet,
    cp_solution,
    delta_c,
    dual_index,
    format_p,
    kappa_over,
    kappa_under,
    lift_maps,
    norm,
    norms,
    ones_norm,
    parse_p,
    q_opnorm,
)
from convproj.verify import brute_simplex_lemma

p_strategy = st.one_of(st.floats(min_value=1.0, max_value=40.0), st.just(math.inf))


# ---- norms -----------------------------------------------------------------

def test_parse_and_format_p():
    assert parse_p("inf") == math.inf
    assert parse_p("2") == 2.0
    assert format_p(math.inf) == "inf"
    assert format_p(1.5) == "1.5"
    with pytest.raises(ValueError):
        parse_p("0.5")


def test_dual_index_pairs():
    assert dual_index(1) == math.inf
    assert dual_index(math.inf) == 1.0
    assert dual_index(2) == 2.0
    assert dual_index(3) == pytest.approx(1.5)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=6), p_strategy)
def test_norm_matches_numpy(v, p):
    v = np.array(v)
    ref = np.linalg.norm(v, ord=p)
    assert norm(v, p) == pytest.approx(ref, rel=1e-12, abs=1e-12)
    assert norms(v[None, :], p)[0] == pytest.approx(ref, rel=1e-12, abs=1e-12)


@given(st.integers(1, 10), p_strategy)
def test_ones_norm(k, p):
    assert ones_norm(k, p) == pytest.approx(np.linalg.norm(np.ones(k), ord=p), rel=1e-12)


# ---- multipliers -----------------------------------------------------------

@pytest.mark.parametrize("m", range(1, 9))
def test_table_closed_forms(m):
    # the table lists these closed forms for p = 1, 2, inf
    assert kappa_under(m, 1) == pytest.approx(m + 1, abs=1e-12)
    assert kappa_under(m, 2) == pytest.approx(math.sqrt(m * (m + 1)), abs=1e-12)
    assert kappa_under(m, math.inf) == pytest.approx(m, abs=1e-12)
    assert kappa_over(m, 1) == pytest.approx((2 * m - 1) / (m + 1), abs=1e-12)
    assert kappa_over(m, 2) == pytest.approx(math.sqrt((m * m + m - 1) / (m + 1)), abs=1e-12)
    assert kappa_over(m, math.inf) == pytest.approx(m, abs=1e-12)


def test_cli_example_values():
    assert round(kappa_under(2, 2), 6) == 2.449490
    assert round(kappa_over(2, 2), 6) == 1.290994
    assert round(q_opnorm(2, 2), 6) == 1.732051


@pytest.mark.parametrize("m", [2, 3, 4])
@pytest.mark.parametrize("pp", [1.0, 1.5, 2.0, 3.0, math.inf])
def test_kappa_over_from_simplex_enumeration(m, pp):
    # independent oracle: max ||r - 1|| over the scaled simplex, normalized by ||1||
    _, val = brute_simplex_lemma(m, pp)
    assert kappa_over(m, pp) == pytest.approx(val / ones_norm(m + 1, pp), rel=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3, 5])
@pytest.mark.parametrize("pp", [1.0, 2.0, 3.0, math.inf])
def test_kappa_under_from_worst_point(m, pp):
    # the quarter-ball family: lifted gap (sqrt(m)-1)||1||_{m+1} over CP gap (sqrt(m)-1)/m ||1||_m
    ratio = m * ones_norm(m + 1, pp) / ones_norm(m, pp)
    assert kappa_under(m, pp) == pytest.approx(ratio, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 30), p_strategy)
def test_multiplier_bounds(m, p):
    ku, ko, qn = kappa_under(m, p), kappa_over(m, p), q_opnorm(m, p)
    assert ku >= 1.0
    assert ko <= ku + 1e-12
    assert ku * ko >= 1.0 - 1e-12
    assert 1.0 <= qn <= m + 1 + 1e-9
    assert ko >= 0.5 - 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 20), st.floats(1.0, 20.0))
def test_multipliers_monotone_in_m(m, p):
    assert kappa_under(m + 1, p) > kappa_under(m, p)
    assert kappa_over(m + 1, p) >= kappa_over(m, p) - 1e-12


@pytest.mark.parametrize("m", range(1, 6))
@pytest.mark.parametrize("pp", [1.0, 1.5, 2.0, 4.0, math.inf])
def test_q_opnorm_attained_at_ones(m, pp):
    Q = lift_maps(0, m).Q
    one = np.ones(m)
    attained = norm(Q @ one, pp) / norm(one, pp)
    assert attained == pytest.approx(q_opnorm(m, pp), rel=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("pp", [1.0, 1.5, 3.0, math.inf])
def test_q_opnorm_is_maximum(m, pp):
    Q = lift_maps(0, m).Q
    rng = np.random.default_rng(m)

    def neg(y):
        ny = norm(y, pp)
        return 0.0 if ny == 0 else -norm(Q @ y, pp) / ny

    best = max(-minimize(neg, rng.standard_normal(m), method="Nelder-Mead").fun for _ in range(20))
    assert best <= q_opnorm(m, pp) * (1 + 1e-9)
    assert best >= q_opnorm(m, pp) * (1 - 1e-4)


@given(st.integers(0, 3), st.integers(1, 4), st.data())
def test_lift_identities(n, m, data):
    L = lift_maps(n, m)
    z = np.array(data.draw(st.lists(st.floats(-5, 5), min_size=n + m, max_size=n + m)))
    np.testing.assert_allclose(L.P, L.Q @ L.proj_y)
    Pz = L.apply_P(z)
    assert Pz.shape == (m + 1,)
    np.testing.assert_allclose(Pz[:m], z[n:])
    assert Pz.sum() == pytest.approx(0.0, abs=1e-9)
    np.testing.assert_allclose(L.proj_minus1 @ L.Q, np.eye(m))


def test_lift_rejects_m0():
    with pytest.raises(ValueError):
        lift_maps(1, 0)
    with pytest.raises(ValueError):
        kappa_under(0, 2)


# ---- constraints and sets --------------------------------------------------

def test_nonconvex_constraint_rejected():
    with pytest.raises(NotConvex):
        QuadraticConstraint(-np.eye(2), np.zeros(2), 0.0)


def test_ball_constraint_values():
    c = QuadraticConstraint.ball([1.0, 2.0], 1.0, [1.0, 0.25])
    assert c.value([1.0, 2.0]) == pytest.approx(-1.0)
    assert c.value([2.0, 2.0]) == pytest.approx(0.0)
    assert c.value([1.0, 4.0]) == pytest.approx(0.0)


def test_spec_contains_and_residual():
    spec = ConvexSetSpec(1, 1, (QuadraticConstraint.ball(np.zeros(2), 1.0),))
    assert spec.contains([0.0, 0.5])
    assert not spec.contains([1.0, 1.0])
    assert spec.residual([1.0, 1.0]) == pytest.approx(1.0)
    assert list(spec.y_index) == [1]


def test_spec_roundtrip_dict():
    spec = ConvexSetSpec(1, 2, (QuadraticConstraint.linear([1.0, 0.0, 0.0], -1.0),),
                         np.array([[1.0, -1.0, 0.0]]), np.zeros(1))
    d = spec.to_dict()
    assert d["n"] == 1 and d["m"] == 2
    assert len(d["constraints"]) == 1


# ---- cones -------------------------------------------------------------------

def test_orthant_cone_properties():
    C = ConeHRep.orthant(3)
    assert C.is_pointed() and C.is_solid()
    assert C.contains([1.0, 0.0, 2.0])
    assert not C.contains([1.0, -1.0, 2.0])


def test_flat_cone_has_no_interior():
    C = ConeHRep(np.array([[1.0, 0.0], [-1.0, 0.0]]))
    assert not C.is_solid()
    with pytest.raises(NotInterior):
        C.interior_direction()


@pytest.mark.parametrize("m", [2, 3, 5])
def test_delta_orthant_matches_stated_value(m, p):
    # for the orthant and c = 1/||1|| the ball radius is 1/||1||
    c = np.ones(m) / ones_norm(m, p)
    assert delta_c(ConeHRep.orthant(m), c, p) == pytest.approx(1.0 / ones_norm(m, p), rel=1e-12)


def test_delta_rejects_boundary_direction():
    with pytest.raises(NotInterior):
        delta_c(ConeHRep.orthant(2), [1.0, 0.0], 2.0)


# ---- solutions -------------------------------------------------------------

def test_solution_roundtrip_and_validation():
    spec = ConvexSetSpec(0, 2, ())
    sol = cp_solution(spec, [[0.0, 0.0], [1.0, 0.0]], 0.5, math.inf, recession=[[0.0, 1.0]])
    back = SolutionSet.from_dict(sol.to_dict())
    np.testing.assert_array_equal(back.points, sol.points)
    assert back.p == math.inf and back.kind == CP
    np.testing.assert_array_equal(back.recession, [[0.0, 1.0]])
    with pytest.raises(ValueError):
        SolutionSet(np.zeros((0, 2)), np.zeros((0, 2)), 0.1, 2.0)
    with pytest.raises(ValueError):
        SolutionSet(np.zeros((1, 2)), np.zeros((1, 2)), -1.0, 2.0)
    with pytest.raises(ValueError):
        SolutionSet(np.zeros((1, 2)), np.zeros((1, 2)), 0.1, 2.0, kind="other")
    assert sol.replace(kind=MOCP).kind == MOCP
    assert sol.points.flags.writeable is False
