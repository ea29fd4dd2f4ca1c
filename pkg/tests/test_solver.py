import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from convproj import fixtures
from convproj.core import ConvexSetSpec, Infeasible, QuadraticConstraint, Unbounded, lift_maps
from convproj.solver import (
    distance_scalarization,
    interior_point,
    minimize_linear,
    support,
    support_many,
)


def ellipse_support(center, weights, w):
    # {sum_i weights_i (z_i - c_i)^2 <= 1}: h(w) = w^T c + sqrt(sum w_i^2 / weights_i)
    return float(np.dot(w, center) + np.sqrt(np.sum(np.asarray(w) ** 2 / np.asarray(weights))))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3),
       st.lists(st.floats(0.2, 4.0), min_size=3, max_size=3),
       st.lists(st.floats(-1, 1), min_size=2, max_size=2).filter(lambda w: np.linalg.norm(w) > 0.1))
def test_ellipsoid_projection_support_closed_form(center, weights, w):
    # projecting an axis-aligned ellipsoid keeps the support formula in the kept coordinates
    spec = ConvexSetSpec(1, 2, (QuadraticConstraint.ball(center, 1.0, weights),))
    expected = ellipse_support(center, weights, np.r_[0.0, w])
    assert support(spec, w) == pytest.approx(expected, abs=1e-6)


def test_intersection_matches_scipy():
    spec = fixtures.ellipse3d()
    rng = np.random.default_rng(3)
    cons = [{"type": "ineq", "fun": (lambda z, c=c: -c.value(z))} for c in spec.constraints]
    for _ in range(5):
        w = rng.standard_normal(2)
        ours = support(spec, w)
        res = minimize(lambda z: -(w @ z[1:]), np.array([1.5, 1.5, 1.5]), constraints=cons,
                       method="SLSQP", options={"ftol": 1e-12, "maxiter": 500})
        assert ours == pytest.approx(-res.fun, abs=1e-6)


def test_duals_are_nonnegative_and_complementary():
    spec = fixtures.ellipse3d()
    res = minimize_linear(spec, np.array([0.0, 1.0, -1.0]))
    assert res.status == "optimal"
    assert np.all(res.dual >= -1e-9)
    for lam, c in zip(res.dual, spec.constraints):
        assert abs(lam * c.value(res.z_star)) < 1e-6
    assert res.kkt_residual < 1e-5


def test_linear_program_with_equalities():
    spec = fixtures.segment(3)
    # y = x (3, -1, -1) with x in [0, 1]; minimizing y1 gives 0, maximizing gives 3
    assert support(spec, [1.0, 0.0, 0.0]) == pytest.approx(3.0, abs=1e-7)
    assert support(spec, [-1.0, 0.0, 0.0]) == pytest.approx(0.0, abs=1e-7)
    np.testing.assert_allclose(support_many(spec, np.eye(3)), [3.0, 0.0, 0.0], atol=1e-7)


def test_infeasible_detected():
    with pytest.raises(Infeasible):
        minimize_linear(fixtures.disjoint_balls(), np.ones(2))
    with pytest.raises(Infeasible):
        interior_point(fixtures.disjoint_balls())


def test_unbounded_detected():
    with pytest.raises(Unbounded):
        minimize_linear(fixtures.whole_plane(), np.array([1.0, 0.0]))
    with pytest.raises(Unbounded):
        support(fixtures.disc_plus_ray(), [0.0, 1.0])


def test_recession_set_with_finite_value():
    # disc plus the upward ray: the downward support is the disc's
    spec = fixtures.disc_plus_ray()
    assert support(spec, [0.0, -1.0]) == pytest.approx(1.0, abs=1e-6)
    assert support(spec, [1.0, 0.0]) == pytest.approx(1.0, abs=1e-6)


def test_interior_point_is_strict():
    spec = fixtures.ellipse4d()
    z = interior_point(spec)
    assert all(c.value(z) < 0 for c in spec.constraints)


def test_zero_or_wrong_direction_rejected():
    with pytest.raises(ValueError):
        support(fixtures.quarter_ball(2), [0.0, 0.0])
    with pytest.raises(ValueError):
        support(fixtures.quarter_ball(2), [1.0, 0.0, 0.0])


@pytest.mark.parametrize("v", [[-2.0, -2.0, -3.0], [0.0, 0.0, -1.0], [1.0, -1.0, -2.0]])
def test_distance_scalarization_supports_upper_image(v):
    spec = fixtures.quarter_ball(2)
    lift = lift_maps(0, 2)
    d = np.ones(3) / math.sqrt(3)
    res = distance_scalarization(spec, lift, v, d)
    v = np.asarray(v)
    # the attained point lies on v + t d from below
    Pz = lift.P @ res.z_star
    assert np.all(Pz <= v + res.t * d + 1e-6)
    assert np.max(Pz - v - res.t * d) == pytest.approx(0.0, abs=1e-5)
    # the normal supports the upper image: min over S of w^T P z equals w^T (v + t d)
    assert np.all(res.w >= 0) and res.w.sum() == pytest.approx(1.0)
    low = minimize_linear(spec, lift.P.T @ res.w).value
    assert low == pytest.approx(res.w @ (v + res.t * d), abs=1e-5)


def test_distance_scalarization_rejects_bad_direction():
    with pytest.raises(ValueError):
        distance_scalarization(fixtures.quarter_ball(2), lift_maps(0, 2), np.zeros(3), np.array([1.0, 0.0, 1.0]))
