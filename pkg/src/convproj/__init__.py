"""Approximate convex projections through multi-objective lifts.

A convex projection asks for ``Y = proj_y S``.  Lifting it to the
multi-objective problem ``min (y, -1^T y)`` over ``S`` lets an outer
approximation solver compute a finite epsilon-solution, which translates
back with the sharp multipliers :func:`kappa_under` / :func:`kappa_over`.
"""
from .benson import BensonResult, MaxIterations, solve_mocp
from .core import (
    CP,
    HAUSDORFF,
    MOCP,
    SHIFT,
    ConeHRep,
    ConvexSetSpec,
    ConvprojError,
    Infeasible,
    LiftMaps,
    NotConvex,
    NotInterior,
    QuadraticConstraint,
    QuadraticFunction,
    SolutionSet,
    Unbounded,
    cp_solution,
    delta_c,
    kappa_over,
    kappa_under,
    lift_maps,
    q_opnorm,
)
from .geometry import Certificate, EmptyPolyhedron, Polyhedron, polytope_ball_support
from .reductions import CvopSpec, classify_boundedness, cp_to_mocp, cvop_to_cp
from .solver import distance_scalarization, minimize_linear, support
from .verify import verify_cp_solution, verify_mocp_solution

__version__ = "0.1.0"
