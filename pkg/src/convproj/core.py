"""Domain types, p-norm helpers, lifting matrices and tolerance multipliers.

Conventions
-----------
* ``p`` is a float in ``[1, inf]``; ``math.inf`` is the max-norm.
* A feasible set lives in ``R^n x R^m`` with points ``z = (x, y)``: the first
  ``n`` coordinates are the eliminated variables, the last ``m`` the ones kept
  by the projection.
* Quadratic constraints read ``z^T A z + b^T z + c0 <= 0`` (no factor 1/2).
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

PSD_TOL = 1e-9
FEAS_TOL = 1e-8


class ConvprojError(Exception):
    """Base class for all errors raised by this package."""


class NotConvex(ConvprojError):
    pass


class NotInterior(ConvprojError):
    pass


class Infeasible(ConvprojError):
    pass


class Unbounded(ConvprojError):
    pass


# --------------------------------------------------------------------------
# norms

def check_p(p: float) -> float:
    p = float(p)
    if not p >= 1.0:
        raise ValueError(f"norm index must be >= 1, got {p}")
    return p


def dual_index(p: float) -> float:
    """Hoelder conjugate q with 1/p + 1/q = 1."""
    p = check_p(p)
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def parse_p(text) -> float:
    if isinstance(text, str) and text.strip().lower() in ("inf", "infinity", "oo"):
        return math.inf
    return check_p(float(text))


def format_p(p: float) -> str:
    return "inf" if math.isinf(p) else f"{p:g}"


def norm(v, p: float) -> float:
    v = np.asarray(v, dtype=float)
    p = check_p(p)
    if v.size == 0:
        return 0.0
    if math.isinf(p):
        return float(np.max(np.abs(v)))
    if p == 1.0:
        return float(np.sum(np.abs(v)))
    if p == 2.0:
        return float(np.sqrt(np.dot(v.ravel(), v.ravel())))
    return float(np.linalg.norm(v.ravel(), ord=p))


def norms(V, p: float) -> np.ndarray:
    """Row-wise p-norms of a 2-D array."""
    V = np.atleast_2d(np.asarray(V, dtype=float))
    p = check_p(p)
    if math.isinf(p):
        return np.max(np.abs(V), axis=1)
    return np.linalg.norm(V, ord=p, axis=1)


def ones_norm(k: int, p: float) -> float:
    """p-norm of the all-ones vector in R^k."""
    p = check_p(p)
    return 1.0 if math.isinf(p) else float(k) ** (1.0 / p)


# --------------------------------------------------------------------------
# multipliers

def kappa_under(m: int, p: float) -> float:
    """Inflation factor for CP solutions reused on the lifted problem."""
    if m < 1:
        raise ValueError("m must be >= 1")
    p = check_p(p)
    if math.isinf(p):
        return float(m)
    if p == 1.0:
        return float(m + 1)
    return float(m) ** ((p - 1.0) / p) * float(m + 1) ** (1.0 / p)


def kappa_over(m: int, p: float) -> float:
    """Inflation factor for lifted-problem solutions reused on the CP."""
    if m < 1:
        raise ValueError("m must be >= 1")
    p = check_p(p)
    if math.isinf(p):
        return float(m)
    if p == 1.0:
        return (2.0 * m - 1.0) / (m + 1.0)
    # m^p overflows for large p; factor it out
    log_num = p * math.log(m) + math.log1p((m - 1.0) * math.exp(-p * math.log(m)))
    return math.exp((log_num - math.log(m + 1.0)) / p)


def q_opnorm(m: int, p: float) -> float:
    """Operator p-norm of Q = (I; -1^T), equal to (m^(p-1) + 1)^(1/p)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    p = check_p(p)
    if math.isinf(p):
        return float(m)
    if p == 1.0:
        return 2.0
    return math.exp(((p - 1.0) * math.log(m) + math.log1p(math.exp((1.0 - p) * math.log(m)))) / p)


# --------------------------------------------------------------------------
# constraints and feasible sets

def _is_psd(A: np.ndarray, tol: float = PSD_TOL) -> bool:
    if not np.any(A):
        return True
    return float(np.linalg.eigvalsh(A).min()) >= -tol


@dataclass(frozen=True, eq=False)
class QuadraticConstraint:
    """``z^T A z + b^T z + c0 <= 0`` with A symmetric PSD."""

    A: np.ndarray
    b: np.ndarray
    c0: float = 0.0

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float).ravel()
        A = np.asarray(self.A, dtype=float) if self.A is not None else np.zeros((b.size, b.size))
        if A.shape != (b.size, b.size):
            raise ValueError(f"A has shape {A.shape}, expected {(b.size, b.size)}")
        if not np.allclose(A, A.T, atol=1e-12):
            raise ValueError("A must be symmetric")
        A = 0.5 * (A + A.T)
        if not _is_psd(A):
            raise NotConvex(f"constraint matrix not PSD (min eig {np.linalg.eigvalsh(A).min():.3e})")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c0", float(self.c0))

    @classmethod
    def linear(cls, b, c0: float = 0.0) -> "QuadraticConstraint":
        b = np.asarray(b, dtype=float)
        return cls(np.zeros((b.size, b.size)), b, c0)

    @classmethod
    def ball(cls, center, radius: float, weights=None) -> "QuadraticConstraint":
        """``sum_i w_i (z_i - center_i)^2 <= radius^2`` (axis-aligned ellipsoid)."""
        center = np.asarray(center, dtype=float)
        w = np.ones_like(center) if weights is None else np.asarray(weights, dtype=float)
        A = np.diag(w)
        return cls(A, -2.0 * w * center, float(np.sum(w * center ** 2) - radius ** 2))

    @property
    def dim(self) -> int:
        return self.b.size

    @property
    def is_linear(self) -> bool:
        return not np.any(self.A)

    def value(self, z) -> float:
        z = np.asarray(z, dtype=float)
        return float(z @ self.A @ z + self.b @ z + self.c0)

    def embed(self, dim: int, index) -> "QuadraticConstraint":
        """Same constraint on the coordinates ``index`` of a larger space."""
        index = np.asarray(index)
        A = np.zeros((dim, dim))
        A[np.ix_(index, index)] = self.A
        b = np.zeros(dim)
        b[index] = self.b
        return QuadraticConstraint(A, b, self.c0)

    def to_dict(self) -> dict:
        return {"A": self.A.tolist(), "b": self.b.tolist(), "c0": self.c0}


# the CVOP objective components share the representation
QuadraticFunction = QuadraticConstraint


@dataclass(frozen=True, eq=False)
class ConvexSetSpec:
    """Convex set ``S`` in ``R^n x R^m`` given by quadratic inequalities.

    ``eq_matrix @ z == eq_rhs`` optionally adds affine equalities; sets
    such as segments have empty interior and cannot be written with
    inequalities alone for an interior-point solver.
    """

    n: int
    m: int
    constraints: tuple = ()
    eq_matrix: Optional[np.ndarray] = None
    eq_rhs: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError("dimensions must be nonnegative")
        cons = tuple(self.constraints)
        for c in cons:
            if not isinstance(c, QuadraticConstraint):
                raise TypeError("constraints must be QuadraticConstraint instances")
            if c.dim != self.dim:
                raise ValueError(f"constraint dimension {c.dim} != n + m = {self.dim}")
        object.__setattr__(self, "constraints", cons)
        if self.eq_matrix is not None:
            E = np.atleast_2d(np.asarray(self.eq_matrix, dtype=float))
            f = np.asarray(self.eq_rhs, dtype=float).ravel()
            if E.shape != (f.size, self.dim):
                raise ValueError("equality data has inconsistent shape")
            E.setflags(write=False)
            f.setflags(write=False)
            object.__setattr__(self, "eq_matrix", E)
            object.__setattr__(self, "eq_rhs", f)

    @property
    def dim(self) -> int:
        return self.n + self.m

    @property
    def y_index(self) -> np.ndarray:
        return np.arange(self.n, self.n + self.m)

    @property
    def x_index(self) -> np.ndarray:
        return np.arange(self.n)

    def residual(self, z) -> float:
        """Largest constraint violation at z (0 when feasible)."""
        z = np.asarray(z, dtype=float)
        r = 0.0
        for c in self.constraints:
            r = max(r, c.value(z))
        if self.eq_matrix is not None:
            r = max(r, float(np.max(np.abs(self.eq_matrix @ z - self.eq_rhs), initial=0.0)))
        return r

    def contains(self, z, tol: float = FEAS_TOL) -> bool:
        return self.residual(z) <= tol

    @functools.cached_property
    def stacked(self):
        """Constraint data as arrays ``(As, bs, cs)`` for vectorized evaluation."""
        k = len(self.constraints)
        As = np.array([c.A for c in self.constraints]).reshape(k, self.dim, self.dim)
        bs = np.array([c.b for c in self.constraints]).reshape(k, self.dim)
        cs = np.array([c.c0 for c in self.constraints])
        return As, bs, cs

    def with_constraints(self, extra: Sequence[QuadraticConstraint]) -> "ConvexSetSpec":
        return ConvexSetSpec(self.n, self.m, self.constraints + tuple(extra), self.eq_matrix, self.eq_rhs)

    def to_dict(self) -> dict:
        d = {"n": self.n, "m": self.m, "constraints": [c.to_dict() for c in self.constraints]}
        if self.eq_matrix is not None:
            d["equalities"] = {"E": self.eq_matrix.tolist(), "f": self.eq_rhs.tolist()}
        return d


# --------------------------------------------------------------------------
# lifting

@dataclass(frozen=True, eq=False)
class LiftMaps:
    n: int
    m: int
    P: np.ndarray
    Q: np.ndarray
    proj_y: np.ndarray
    proj_x: np.ndarray
    proj_minus1: np.ndarray

    def apply_P(self, Z) -> np.ndarray:
        """``P z`` for a single point or row-stacked points."""
        Z = np.asarray(Z, dtype=float)
        return Z @ self.P.T

    def apply_Q(self, Y) -> np.ndarray:
        return np.asarray(Y, dtype=float) @ self.Q.T


def lift_maps(n: int, m: int) -> LiftMaps:
    if m < 1:
        raise ValueError("m must be >= 1")
    Q = np.vstack([np.eye(m), -np.ones((1, m))])
    proj_y = np.hstack([np.zeros((m, n)), np.eye(m)])
    proj_x = np.hstack([np.eye(n), np.zeros((n, m))])
    P = Q @ proj_y
    proj_minus1 = np.hstack([np.eye(m), np.zeros((m, 1))])
    for a in (P, Q, proj_y, proj_x, proj_minus1):
        a.setflags(write=False)
    return LiftMaps(n, m, P, Q, proj_y, proj_x, proj_minus1)


# --------------------------------------------------------------------------
# cones

@dataclass(frozen=True, eq=False)
class ConeHRep:
    """Polyhedral cone ``{z : W z >= 0}``."""

    W: np.ndarray

    def __post_init__(self):
        W = np.atleast_2d(np.asarray(self.W, dtype=float))
        if np.any(np.all(W == 0.0, axis=1)):
            raise ValueError("cone rows must be nonzero")
        W.setflags(write=False)
        object.__setattr__(self, "W", W)

    @classmethod
    def orthant(cls, m: int) -> "ConeHRep":
        return cls(np.eye(m))

    @property
    def dim(self) -> int:
        return self.W.shape[1]

    def contains(self, z, tol: float = 1e-12) -> bool:
        return bool(np.all(self.W @ np.asarray(z, dtype=float) >= -tol))

    def is_pointed(self) -> bool:
        return np.linalg.matrix_rank(self.W, tol=1e-9) == self.dim

    def is_solid(self) -> bool:
        from scipy.optimize import linprog

        # max s s.t. W z >= s, -1 <= z <= 1
        k, d = self.W.shape
        c = np.zeros(d + 1)
        c[-1] = -1.0
        A_ub = np.hstack([-self.W, np.ones((k, 1))])
        res = linprog(c, A_ub=A_ub, b_ub=np.zeros(k), bounds=[(-1, 1)] * d + [(None, 1)], method="highs")
        return res.status == 0 and -res.fun > 1e-9

    def interior_direction(self, p: float = 2.0) -> np.ndarray:
        """A p-normalized direction maximizing the worst normalized row slack."""
        from scipy.optimize import linprog

        k, d = self.W.shape
        Wn = self.W / np.linalg.norm(self.W, axis=1, keepdims=True)
        c = np.zeros(d + 1)
        c[-1] = -1.0
        res = linprog(c, A_ub=np.hstack([-Wn, np.ones((k, 1))]), b_ub=np.zeros(k),
                      bounds=[(-1, 1)] * d + [(None, 1)], method="highs")
        if res.status != 0 or -res.fun <= 1e-12:
            raise NotInterior("cone has empty interior")
        z = res.x[:d]
        return z / norm(z, p)


def delta_c(C: ConeHRep, c, p: float) -> float:
    """Radius of the largest p-ball around c inside C.

    Distance from c to the hyperplane ``w^T z = 0`` in the p-norm is
    ``w^T c / ||w||_q``; the ball fits iff it fits every facet halfspace.
    """
    c = np.asarray(c, dtype=float)
    slack = C.W @ c
    if np.any(slack <= 0.0):
        raise NotInterior(f"direction {c} is not in the interior of the cone")
    return float(np.min(slack / norms(C.W, dual_index(p))))


def normalize_direction(c, p: float) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    nc = norm(c, p)
    if nc == 0.0:
        raise ValueError("direction must be nonzero")
    return c / nc


# --------------------------------------------------------------------------
# solutions

SHIFT = "shift"
HAUSDORFF = "hausdorff"
FLAVORS = (SHIFT, HAUSDORFF)

CP = "CP"
MOCP = "MOCP"
CVOP_INFIMIZER = "CVOP-infimizer"
KINDS = (CP, MOCP, CVOP_INFIMIZER)


@dataclass(frozen=True, eq=False)
class SolutionSet:
    """A finite (or finitely sampled) solution candidate.

    ``points`` holds full feasible points ``z = (x, y)`` (rows); ``images``
    the y-vectors for CP/MOCP kinds or objective values for infimizers.
    ``recession`` carries generators of the recession cone used by the
    self-bounded definitions (rays in image space; ``None`` means bounded).
    """

    points: np.ndarray
    images: np.ndarray
    epsilon: float
    p: float
    flavor: str = SHIFT
    kind: str = CP
    recession: Optional[np.ndarray] = None
    minimizers_guaranteed: Optional[bool] = None
    notes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        imgs = np.atleast_2d(np.asarray(self.images, dtype=float))
        if pts.shape[0] != imgs.shape[0]:
            raise ValueError("points and images must have the same count")
        if self.epsilon < 0 or not math.isfinite(self.epsilon):
            raise ValueError("epsilon must be finite and nonnegative")
        if self.epsilon > 0 and pts.shape[0] == 0:
            raise ValueError("an approximate solution must be nonempty")
        if self.flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        pts.setflags(write=False)
        imgs.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "images", imgs)
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "p", check_p(self.p))
        if self.recession is not None:
            R = np.atleast_2d(np.asarray(self.recession, dtype=float))
            R.setflags(write=False)
            object.__setattr__(self, "recession", R)
        object.__setattr__(self, "notes", tuple(self.notes))

    def __len__(self) -> int:
        return self.points.shape[0]

    def replace(self, **changes) -> "SolutionSet":
        from dataclasses import replace

        return replace(self, **changes)

    def check_feasible(self, spec: ConvexSetSpec, tol: float = FEAS_TOL) -> bool:
        return all(spec.residual(z) <= tol for z in self.points)

    def to_dict(self) -> dict:
        return {
            "points": self.points.tolist(),
            "images": self.images.tolist(),
            "epsilon": self.epsilon,
            "p": format_p(self.p),
            "flavor": self.flavor,
            "kind": self.kind,
            "recession": None if self.recession is None else self.recession.tolist(),
            "minimizers_guaranteed": self.minimizers_guaranteed,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SolutionSet":
        return cls(
            points=np.asarray(d["points"], dtype=float),
            images=np.asarray(d["images"], dtype=float),
            epsilon=float(d["epsilon"]),
            p=parse_p(d.get("p", 2)),
            flavor=d.get("flavor", SHIFT),
            kind=d.get("kind", CP),
            recession=None if d.get("recession") is None else np.asarray(d["recession"], dtype=float),
            minimizers_guaranteed=d.get("minimizers_guaranteed"),
            notes=tuple(d.get("notes", ())),
        )


def cp_solution(spec: ConvexSetSpec, points, epsilon: float, p: float, **kw) -> SolutionSet:
    """Wrap feasible points of ``spec`` as a CP solution candidate."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return SolutionSet(pts, pts[:, spec.n:], epsilon, p, kind=CP, **kw)
