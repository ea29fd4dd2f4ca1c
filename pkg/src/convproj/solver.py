"""Scalar convex programs over quadratically constrained sets.

Everything here reduces to one primitive: minimize a linear function over
``{u : u^T A_i u + b_i^T u + c_i <= 0, G u <= h}`` with a log-barrier
path-following method.  Affine equalities of a :class:`ConvexSetSpec` are
eliminated first (``z = z0 + N u``), so the barrier only ever sees sets with
nonempty interior.
"""
from __future__ import annotations

import logging
import weakref
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
from scipy.optimize import linprog

from .core import FEAS_TOL, ConvexSetSpec, Infeasible, LiftMaps, Unbounded

log = logging.getLogger(__name__)

MU_FACTOR = 20.0
NEWTON_TOL = 1e-14
LOOSE_TOL = 1e-3
GAP_TOL = 1e-8
MAX_NEWTON = 60
DIVERGENCE_NORM = 1e9
BOX_RADIUS = 1e6


@dataclass
class ScalarSolveResult:
    z_star: np.ndarray
    value: float
    dual: np.ndarray
    status: str
    kkt_residual: float = 0.0
    iterations: int = 0
    # distance_scalarization only: the supporting-halfspace normal
    w: Optional[np.ndarray] = None
    t: Optional[float] = None


class _Problem:
    """min c^T u  s.t.  quadratics (As, bs, cs) <= 0,  G u <= h."""

    def __init__(self, c, As, bs, cs, G, h):
        self.c = np.asarray(c, dtype=float)
        k = self.c.size
        self.cs = np.asarray(cs, dtype=float).ravel()
        self.h = np.asarray(h, dtype=float).ravel()
        nq = len(self.cs)
        self.As = np.asarray(As, dtype=float).reshape(nq, k, k)
        self.bs = np.asarray(bs, dtype=float).reshape(nq, k)
        self.G = np.asarray(G, dtype=float).reshape(len(self.h), k)
        # purely linear quadratics are cheaper as rows of G
        lin = ~np.any(self.As.reshape(len(self.cs), k * k), axis=1)
        if np.any(lin):
            self.G = np.vstack([self.G, self.bs[lin]])
            self.h = np.concatenate([self.h, -self.cs[lin]])
            self.As, self.bs, self.cs = self.As[~lin], self.bs[~lin], self.cs[~lin]
            self._lin_mask = lin
        else:
            self._lin_mask = lin
        self.ncons = len(self.cs) + len(self.h)

    def slacks(self, u):
        """Negative constraint values (positive when strictly feasible)."""
        q = -(np.einsum("i,kij,j->k", u, self.As, u) + self.bs @ u + self.cs)
        lin = self.h - self.G @ u
        return q, lin

    def barrier_derivs(self, u, t):
        q, lin = self.slacks(u)
        Au = np.einsum("kij,j->ki", self.As, u)
        gq = 2.0 * Au + self.bs  # gradients of the quadratics
        grad = t * self.c + (gq / q[:, None]).sum(axis=0) + (self.G / lin[:, None]).sum(axis=0)
        H = (gq.T / q ** 2) @ gq + np.einsum("k,kij->ij", 2.0 / q, self.As) + (self.G.T / lin ** 2) @ self.G
        return grad, H

    def barrier_value(self, u, t):
        q, lin = self.slacks(u)
        if np.any(q <= 0) or np.any(lin <= 0):
            return np.inf
        return t * (self.c @ u) - np.sum(np.log(q)) - np.sum(np.log(lin))

    def strictly_feasible(self, u) -> bool:
        q, lin = self.slacks(u)
        return bool(np.all(q > 0) and np.all(lin > 0))


def _newton_solve(H, g):
    try:
        cf = scipy.linalg.cho_factor(H, check_finite=False)
        return scipy.linalg.cho_solve(cf, -g, check_finite=False)
    except (np.linalg.LinAlgError, ValueError):
        # singular along a lineality direction of the feasible set
        return np.linalg.lstsq(H, -g, rcond=1e-13)[0]


def _center(prob: _Problem, u, t, stop=None, max_steps=MAX_NEWTON, tol=NEWTON_TOL):
    """Newton centering on the barrier; returns (u, newton_steps)."""
    steps = 0
    for _ in range(max_steps):
        grad, H = prob.barrier_derivs(u, t)
        du = _newton_solve(H, grad)
        lam2 = float(-grad @ du)
        if lam2 / 2.0 <= tol or not np.all(np.isfinite(du)):
            break
        s = 1.0
        if lam2 < 0.25:
            # inside the Dikin ellipsoid the full step is feasible and
            # Armijo comparisons drown in rounding at large t
            while not prob.strictly_feasible(u + s * du) and s > 1e-12:
                s *= 0.5
        else:
            f0 = prob.barrier_value(u, t)
            for _ in range(60):
                if prob.barrier_value(u + s * du, t) <= f0 - 0.01 * s * lam2:
                    break
                s *= 0.5
            else:
                break
        u = u + s * du
        steps += 1
        if stop is not None and stop(u):
            break
        if np.linalg.norm(u) > DIVERGENCE_NORM:
            raise Unbounded("barrier iterates diverged")
    return u, steps


def _path_follow(prob: _Problem, u, t0=1.0, gap_tol=GAP_TOL, stop=None):
    t = t0
    total = 0
    status = "optimal"
    while True:
        final = prob.ncons / t <= gap_tol
        # intermediate centers only need to be rough; the last one is tight
        u, steps = _center(prob, u, t, stop=stop, tol=NEWTON_TOL if final else LOOSE_TOL)
        total += steps
        if stop is not None and stop(u):
            status = "stopped"
            break
        if final:
            break
        t *= MU_FACTOR
        if total > 50 * MAX_NEWTON:
            status = "max-iter"
            break
    return u, t, status, total


def _recession_descent(prob: _Problem) -> Optional[np.ndarray]:
    """A recession direction r with c^T r < 0, if one exists.

    For PSD A the recession cone of ``u^T A u + b^T u + c <= 0`` is
    ``{r : A r = 0, b^T r <= 0}``; intersect over all constraints.
    """
    k = prob.c.size
    if not np.any(prob.c):
        return None
    A_eq = prob.As.reshape(-1, k) if len(prob.cs) else None
    A_ub = np.vstack([prob.bs, prob.G]) if (len(prob.cs) or len(prob.h)) else None
    res = linprog(
        prob.c,
        A_ub=A_ub,
        b_ub=None if A_ub is None else np.zeros(A_ub.shape[0]),
        A_eq=A_eq,
        b_eq=None if A_eq is None else np.zeros(A_eq.shape[0]),
        bounds=[(-1.0, 1.0)] * k,
        method="highs",
    )
    if res.status == 0 and res.fun < -1e-9 * max(1.0, np.linalg.norm(prob.c)):
        return res.x
    return None


def _phase1(prob: _Problem, u0) -> np.ndarray:
    """Strictly feasible point for ``prob`` or :class:`Infeasible`."""
    if prob.strictly_feasible(u0):
        return u0
    k = u0.size
    q, lin = prob.slacks(u0)
    s0 = max(np.max(-q, initial=0.0), np.max(-lin, initial=0.0)) + 1.0
    # variables (u, s): f_i(u) - s <= 0, G u - s <= h, s >= -1
    nq = len(prob.cs)
    As = np.zeros((nq, k + 1, k + 1))
    As[:, :k, :k] = prob.As
    bs = np.hstack([prob.bs, -np.ones((nq, 1))])
    G = np.vstack([np.hstack([prob.G, -np.ones((len(prob.h), 1))]), np.r_[np.zeros(k), -1.0]])
    h = np.r_[prob.h, 1.0]
    aux = _Problem(np.r_[np.zeros(k), 1.0], As, bs, prob.cs, G, h)
    w0 = np.r_[u0, s0]

    def done(w):
        return prob.strictly_feasible(w[:k]) and w[k] < 0

    w, _, status, _ = _path_follow(aux, w0, gap_tol=1e-9, stop=done)
    if not prob.strictly_feasible(w[:k]):
        raise Infeasible(f"no strictly feasible point (phase-I value {w[k]:.3e})")
    return w[:k]


# --------------------------------------------------------------------------
# ConvexSetSpec plumbing

class _Reduced:
    """Constraint data of a spec in null-space coordinates ``z = z0 + N u``."""

    def __init__(self, spec: ConvexSetSpec):
        d = spec.dim
        if spec.eq_matrix is not None and spec.eq_matrix.shape[0] > 0:
            E, f = spec.eq_matrix, spec.eq_rhs
            z0, *_ = np.linalg.lstsq(E, f, rcond=None)
            if np.max(np.abs(E @ z0 - f)) > 1e-9 * max(1.0, np.max(np.abs(f))):
                raise Infeasible("inconsistent equality constraints")
            N = scipy.linalg.null_space(E)
        else:
            z0, N = np.zeros(d), np.eye(d)
        As, bs, cs = spec.stacked
        self.z0, self.N = z0, N
        self.As = np.einsum("ai,kab,bj->kij", N, As, N)
        self.bs = (2.0 * np.einsum("kab,b->ka", As, z0) + bs) @ N
        self.cs = np.einsum("a,kab,b->k", z0, As, z0) + bs @ z0 + cs
        self._interior = None
        self._has_recession = None

    @property
    def has_recession(self) -> bool:
        """Whether the reduced set contains a ray (checked once by LP)."""
        if self._has_recession is None:
            prob = self.problem(np.zeros(self.k))
            found = False
            for i in range(self.k):
                for sgn in (1.0, -1.0):
                    prob.c = np.zeros(self.k)
                    prob.c[i] = sgn
                    if _recession_descent(prob) is not None:
                        found = True
                        break
                if found:
                    break
            self._has_recession = found
        return self._has_recession

    def box_rows(self, extra: int = 0):
        """``|u - u_int|_inf <= BOX_RADIUS`` rows, zero-padded by ``extra`` columns.

        Along a recession direction with zero cost the log barrier keeps
        decreasing, so unbounded sets get a far-away box that is inactive
        at every solution of interest.
        """
        k = self.k
        if not self.has_recession:
            return np.zeros((0, k + extra)), np.zeros(0)
        u0 = self.interior()
        I = np.eye(k)
        G = np.hstack([np.vstack([I, -I]), np.zeros((2 * k, extra))])
        h = np.r_[BOX_RADIUS + u0, BOX_RADIUS - u0]
        return G, h

    @property
    def k(self) -> int:
        return self.N.shape[1]

    def lift(self, u) -> np.ndarray:
        return self.z0 + self.N @ u

    def problem(self, c_u, G=None, h=None) -> _Problem:
        k = self.k
        G = np.zeros((0, k)) if G is None else G
        h = np.zeros(0) if h is None else h
        return _Problem(c_u, self.As, self.bs, self.cs, G, h)

    def interior(self) -> np.ndarray:
        if self._interior is None:
            prob = self.problem(np.zeros(self.k))
            if self.k and self.has_recession:
                I = np.eye(self.k)
                prob = self.problem(np.zeros(self.k), np.vstack([I, -I]), np.full(2 * self.k, BOX_RADIUS))
            if self.k == 0:
                # equalities pin the point; it is feasible or nothing is
                q, lin = prob.slacks(np.zeros(0))
                if np.any(q < -FEAS_TOL) or np.any(lin < -FEAS_TOL):
                    raise Infeasible("the unique point allowed by the equalities violates a constraint")
                self._interior = np.zeros(0)
            elif prob.ncons == 0:
                self._interior = np.zeros(self.k)
            else:
                u = _phase1(prob, np.zeros(self.k))
                # a few steps toward the analytic center so later solves start
                # well inside; unbounded sets have no center, keep what we get
                try:
                    u, _ = _center(prob, u, 0.0, max_steps=25)
                except Unbounded:
                    pass
                self._interior = u
        return self._interior


_CACHE: "weakref.WeakKeyDictionary[ConvexSetSpec, _Reduced]" = weakref.WeakKeyDictionary()


def _reduced(spec: ConvexSetSpec) -> _Reduced:
    red = _CACHE.get(spec)
    if red is None:
        red = _Reduced(spec)
        _CACHE[spec] = red
    return red


def interior_point(spec: ConvexSetSpec) -> np.ndarray:
    """A point in the relative interior of the set (raises Infeasible)."""
    red = _reduced(spec)
    return red.lift(red.interior())


def _kkt(prob: _Problem, u, t):
    q, lin = prob.slacks(u)
    lam_q = 1.0 / (t * q)
    lam_l = 1.0 / (t * lin)
    gq = 2.0 * np.einsum("kij,j->ki", prob.As, u) + prob.bs
    r = prob.c + lam_q @ gq + lam_l @ prob.G
    return lam_q, lam_l, float(np.linalg.norm(r))


def _spec_duals(prob: _Problem, lam_q, lam_l, spec_ncons: int, n_extra_lin: int):
    """Map internal multipliers back to the order of the spec's constraints."""
    mask = prob._lin_mask
    out = np.zeros(spec_ncons)
    out[~mask] = lam_q
    # linear spec constraints were appended after the extra G rows
    out[mask] = lam_l[n_extra_lin:]
    return out, lam_l[:n_extra_lin]


def minimize_linear(spec: ConvexSetSpec, cost) -> ScalarSolveResult:
    """Globally minimize ``cost^T z`` over the set."""
    cost = np.asarray(cost, dtype=float)
    if cost.size != spec.dim:
        raise ValueError("cost has wrong dimension")
    red = _reduced(spec)
    prob = red.problem(red.N.T @ cost)
    u0 = red.interior()
    if _recession_descent(prob) is not None:
        raise Unbounded("objective decreases along a recession direction")
    Gb, hb = red.box_rows()
    if len(hb):
        prob = red.problem(red.N.T @ cost, Gb, hb)
    if prob.ncons == 0 or red.k == 0:
        if np.linalg.norm(prob.c) > 1e-12:
            raise Unbounded("no constraints")
        z = red.lift(u0)
        return ScalarSolveResult(z, float(cost @ z), np.zeros(0), "optimal")
    u, t, status, its = _path_follow(prob, u0)
    lam_q, lam_l, kkt = _kkt(prob, u, t)
    dual, _ = _spec_duals(prob, lam_q, lam_l, len(spec.constraints), len(hb))
    z = red.lift(u)
    return ScalarSolveResult(z, float(cost @ z), dual, status, kkt, its)


def support(spec: ConvexSetSpec, w) -> float:
    """``sup { w^T y : y in proj_y S }``."""
    w = np.asarray(w, dtype=float)
    if w.size != spec.m:
        raise ValueError("direction must live in y-space")
    if not np.any(w):
        raise ValueError("direction must be nonzero")
    cost = np.zeros(spec.dim)
    cost[spec.n:] = -w
    return -minimize_linear(spec, cost).value


def support_many(spec: ConvexSetSpec, W) -> np.ndarray:
    W = np.atleast_2d(np.asarray(W, dtype=float))
    return np.array([support(spec, w) for w in W])


def distance_scalarization(spec: ConvexSetSpec, lift: LiftMaps, v, d) -> ScalarSolveResult:
    """``min t  s.t.  P z <= v + t d,  z in S``.

    Returns the attaining ``z``, ``t`` and a nonnegative ``w`` with
    ``1^T w = 1`` such that ``w^T q >= w^T (v + t d)`` supports the upper
    image at the attained point.
    """
    v = np.asarray(v, dtype=float)
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("direction must lie in the interior of the orthant")
    red = _reduced(spec)
    k = red.k
    PN = lift.P @ red.N
    G = np.hstack([PN, -d[:, None]])
    h = v - lift.P @ red.z0
    nq = len(red.cs)
    As = np.zeros((nq, k + 1, k + 1))
    As[:, :k, :k] = red.As
    bs = np.hstack([red.bs, np.zeros((nq, 1))])
    c = np.r_[np.zeros(k), 1.0]
    prob = _Problem(c, As, bs, red.cs, G, h)
    if _recession_descent(prob) is not None:
        raise Unbounded("upper image is unbounded along the direction")
    Gb, hb = red.box_rows(extra=1)
    if len(hb):
        prob = _Problem(c, As, bs, red.cs, np.vstack([G, Gb]), np.r_[h, hb])
    u0 = red.interior()
    t0 = float(np.max((PN @ u0 - h) / d)) + 1.0
    uu, t, status, its = _path_follow(prob, np.r_[u0, t0])
    lam_q, lam_l, kkt = _kkt(prob, uu, t)
    m1 = lift.P.shape[0]
    w = lam_l[:m1]
    # d^T w = 1 at optimality; report the simplex-normalized normal
    w = np.maximum(w, 0.0)
    w = w / w.sum()
    z = red.lift(uu[:k])
    tstar = float(uu[k])
    return ScalarSolveResult(z, tstar, lam_l[:m1], status, kkt, its, w=w, t=tstar)
