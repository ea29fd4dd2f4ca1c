"""Worked instances: small sets with known projections and solutions.

Variables are ordered ``z = (x, y)`` throughout.
"""
from __future__ import annotations

import math

import numpy as np

from .core import ConeHRep, ConvexSetSpec, QuadraticConstraint, QuadraticFunction


def quarter_ball(m: int = 2) -> ConvexSetSpec:
    """``{y in R^m_+ : ||y||_2 <= 1}`` as a set with no x-part."""
    cons = [QuadraticConstraint.ball(np.zeros(m), 1.0)]
    cons += [QuadraticConstraint.linear(-np.eye(m)[i]) for i in range(m)]
    return ConvexSetSpec(0, m, tuple(cons))


def quarter_ball_solution_points(m: int = 2) -> np.ndarray:
    """The origin and the unit vectors."""
    return np.vstack([np.zeros(m), np.eye(m)])


def quarter_ball_cp_tolerance(m: int, p: float) -> float:
    """Smallest CP tolerance of the unit-vector solution: ``(sqrt(m)-1)/m * m^{1/p}``."""
    return (math.sqrt(m) - 1) / m * (1.0 if math.isinf(p) else m ** (1.0 / p))


def quarter_ball_mocp_tolerance(m: int, p: float) -> float:
    return (math.sqrt(m) - 1) * (1.0 if math.isinf(p) else (m + 1) ** (1.0 / p))


def segment(m: int = 2) -> ConvexSetSpec:
    """``conv{0, (m, -1, ..., -1)}`` written as the image of ``x in [0, 1]``."""
    a = np.r_[float(m), -np.ones(m - 1)]
    E = np.hstack([-a[:, None], np.eye(m)])
    cons = (
        QuadraticConstraint.linear(np.r_[-1.0, np.zeros(m)]),
        QuadraticConstraint.linear(np.r_[1.0, np.zeros(m)], -1.0),
    )
    return ConvexSetSpec(1, m, cons, E, np.zeros(m))


def segment_endpoint(m: int = 2) -> np.ndarray:
    return np.r_[float(m), -np.ones(m - 1)]


def segment_mocp_tolerance(m: int, p: float) -> float:
    return 1.0 if math.isinf(p) else (m + 1) ** (1.0 / p)


def segment_cp_tolerance(m: int, p: float) -> float:
    return float(m) if math.isinf(p) else (m ** p + m - 1) ** (1.0 / p)


def ellipse3d() -> ConvexSetSpec:
    """Two three-dimensional ellipsoids; x is the eliminated coordinate."""
    c1 = QuadraticConstraint.ball([1.0, 1.0, 2.0], 1.0, [1.0, 1.0, 0.25])
    c2 = QuadraticConstraint.ball([2.0, 2.0, 1.0], 1.0, [0.25, 0.25, 1.0])
    return ConvexSetSpec(1, 2, (c1, c2))


def ellipse4d() -> ConvexSetSpec:
    """Two four-dimensional ellipsoids projected to three coordinates."""
    c1 = QuadraticConstraint.ball([2.0, 1.0, 2.0, 1.0], 1.0, [0.25, 1.0, 0.25, 1.0])
    c2 = QuadraticConstraint.ball([1.0, 2.0, 1.0, 2.0], 1.0, [1.0, 0.25, 1.0, 0.25])
    return ConvexSetSpec(1, 3, (c1, c2))


def disc_plus_ray() -> ConvexSetSpec:
    """Unit disc plus ``cone(0, 1)``: ``y1 = x1``, ``y2 >= x2``, ``||x|| <= 1``."""
    disc = QuadraticConstraint.ball(np.zeros(2), 1.0).embed(4, [0, 1])
    up = QuadraticConstraint.linear([0.0, 1.0, 0.0, -1.0])
    E = np.array([[-1.0, 0.0, 1.0, 0.0]])
    return ConvexSetSpec(2, 2, (disc, up), E, np.zeros(1))


def strip_closure():
    """Vertices and rays of ``{0 <= y1 <= 1, y2 >= 0}`` (closure of a non-closed set)."""
    return np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([[0.0, 1.0]])


def disjoint_balls() -> ConvexSetSpec:
    a = QuadraticConstraint.ball([0.0, 0.0], 1.0)
    b = QuadraticConstraint.ball([3.0, 0.0], 1.0)
    return ConvexSetSpec(0, 2, (a, b))


def whole_plane() -> ConvexSetSpec:
    return ConvexSetSpec(0, 2, ())


def half_line_cvop():
    """``min x`` s.t. ``x >= 0`` ordered by ``R_+``."""
    from .reductions import CvopSpec

    X = ConvexSetSpec(1, 0, (QuadraticConstraint.linear([-1.0]),))
    gamma = (QuadraticFunction.linear([1.0]),)
    return CvopSpec(X, gamma, ConeHRep(np.eye(1)), np.ones(1))


def disc_identity_cvop(p: float = 2.0):
    """Identity objective on the unit disc ordered by ``R^2_+``."""
    from .core import normalize_direction
    from .reductions import CvopSpec

    X = ConvexSetSpec(2, 0, (QuadraticConstraint.ball(np.zeros(2), 1.0),))
    gamma = (QuadraticFunction.linear([1.0, 0.0]), QuadraticFunction.linear([0.0, 1.0]))
    return CvopSpec(X, gamma, ConeHRep.orthant(2), normalize_direction(np.ones(2), p))


def upper_semicircle_sample(k: int = 400) -> np.ndarray:
    """Dense sample of the unit circle without the bottom point, as ``(x, y)`` pairs."""
    th = np.linspace(-0.5 * np.pi, 1.5 * np.pi, k + 1)[1:-1]
    return np.column_stack([np.cos(th), np.sin(th)])


def unit_circle_slice() -> ConvexSetSpec:
    """``S = {(x, y) : x^2 + y^2 <= 1}`` projected onto y."""
    return ConvexSetSpec(1, 1, (QuadraticConstraint.ball(np.zeros(2), 1.0),))


FIXTURES = {
    "ex52": quarter_ball,
    "ex53": segment,
    "ellipse3d": ellipse3d,
    "ellipse4d": ellipse4d,
    "ex35": disc_plus_ray,
    "disjoint": disjoint_balls,
}
