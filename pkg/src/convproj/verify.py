"""Independent oracles for approximate solutions.

Containment ``A ⊆ B`` of closed convex sets with the same recession cone
is equivalent to ``h_A <= h_B`` on the directions where ``h_A`` is finite,
so every check here compares support functions on a direction grid.  The
grid can only refute containment; a pass is evidence, not proof.
"""
from __future__ import annotations

import math
import weakref
from typing import Optional

import numpy as np

from .core import (
    CP,
    HAUSDORFF,
    MOCP,
    SHIFT,
    ConvexSetSpec,
    SolutionSet,
    Unbounded,
    check_p,
    dual_index,
    lift_maps,
    norm,
    norms,
    ones_norm,
)
from .geometry import (
    Certificate,
    Polyhedron,
    refine_direction,
    hausdorff_upper,
    polytope_ball_support,
    simplex_directions,
    simplex_grid,
    sphere_directions,
)
from .solver import minimize_linear, support

PASS_THRESHOLD = 1e-5
BISECT_TOL = 1e-6
# bisection compares against the exact boundary; the solver is accurate to ~1e-8
BISECT_THRESHOLD = 1e-7

# support values are expensive (one barrier solve each) and reused across
# tolerance bisections and norm changes
_SUPPORT_CACHE: "weakref.WeakKeyDictionary[ConvexSetSpec, dict]" = weakref.WeakKeyDictionary()


def cached_support(spec: ConvexSetSpec, w) -> float:
    """``sup_{y in Y} w^T y`` (``inf`` if unbounded), memoized per spec."""
    memo = _SUPPORT_CACHE.setdefault(spec, {})
    key = ("y",) + tuple(np.asarray(w, dtype=float).round(15))
    if key not in memo:
        try:
            memo[key] = support(spec, w)
        except Unbounded:
            memo[key] = math.inf
    return memo[key]


def cached_lift_min(spec: ConvexSetSpec, w) -> float:
    """``min_{z in S} w^T P z`` (``-inf`` if unbounded), memoized per spec."""
    memo = _SUPPORT_CACHE.setdefault(spec, {})
    key = ("P",) + tuple(np.asarray(w, dtype=float).round(15))
    if key not in memo:
        lift = lift_maps(spec.n, spec.m)
        try:
            memo[key] = minimize_linear(spec, lift.P.T @ w).value
        except Unbounded:
            memo[key] = -math.inf
    return memo[key]


# --------------------------------------------------------------------------
# CP

def _cp_gaps(spec, images, rays, eps, p, D, flavor):
    q = dual_index(p)
    hY = np.array([cached_support(spec, w) for w in D])
    hI = np.array([polytope_ball_support(images, rays, 0.0, p, w) for w in D])
    nq = norms(D, q)
    with np.errstate(invalid="ignore"):
        gaps = hY - hI - eps * nq
    # both infinite: the direction is outside the common barrier cone
    gaps[np.isinf(hY) & np.isinf(hI)] = -math.inf
    return gaps, hY


def verify_cp_solution(spec: ConvexSetSpec, sol: SolutionSet, grid=None, p: Optional[float] = None,
                       eps: Optional[float] = None, n_directions: int = 2000, refine: bool = True,
                       seed: int = 0, threshold: float = PASS_THRESHOLD) -> Certificate:
    """Check ``Y ⊆ conv proj_y S_bar + (cl Y)_inf + B_eps`` on a direction grid.

    Both flavors reduce to this ball inclusion for projections (the
    Hausdorff distance from the inner set to Y is zero since it lies
    inside cl Y).
    """
    if sol.kind != CP:
        raise ValueError("expected a CP solution")
    p = sol.p if p is None else check_p(p)
    eps = sol.epsilon if eps is None else eps
    D = sphere_directions(spec.m, n_directions, seed) if grid is None else np.atleast_2d(grid)
    rays = sol.recession
    gaps, hY = _cp_gaps(spec, sol.images, rays, eps, p, D, sol.flavor)
    if refine and spec.m > 1 and np.any(np.isfinite(gaps)):
        q = dual_index(p)
        scaled = np.where(np.isfinite(gaps), gaps / (1 + np.abs(np.where(np.isfinite(hY), hY, 0))), -np.inf)
        w0 = D[int(np.argmax(scaled))]

        def fun(w):
            hy = cached_support(spec, w)
            hi = polytope_ball_support(sol.images, rays, 0.0, p, w)
            if math.isinf(hy) or math.isinf(hi):
                return -1e300
            return (hy - hi) / norm(w, q)

        w_ref, _ = refine_direction(fun, w0)
        g2, h2 = _cp_gaps(spec, sol.images, rays, eps, p, w_ref[None, :], sol.flavor)
        D = np.vstack([D, w_ref])
        gaps = np.r_[gaps, g2]
        hY = np.r_[hY, h2]
    hY_safe = np.where(np.isfinite(hY), hY, 0.0)
    return Certificate(D, gaps, hY_safe, eps, threshold, kind="cp",
                       extra={"p": p, "flavor": sol.flavor})


def minimal_cp_tolerance(spec: ConvexSetSpec, sol: SolutionSet, grid=None, p: Optional[float] = None,
                         hi: Optional[float] = None, tol: float = BISECT_TOL,
                         threshold: float = BISECT_THRESHOLD, **kw) -> float:
    """Bisect the smallest eps at which :func:`verify_cp_solution` passes.

    The grid is first augmented by a locally refined worst direction, so
    critical directions off the grid are still found; the bisection then
    reuses the cached support values.
    """
    p = sol.p if p is None else check_p(p)
    base = verify_cp_solution(spec, sol, grid=grid, p=p, eps=0.0, refine=True,
                              threshold=threshold, **kw)
    D = base.directions

    def ok(e):
        return verify_cp_solution(spec, sol, grid=D, p=p, eps=e, refine=False, threshold=threshold).passed

    return _bisect(ok, hi, tol)


def _bisect(ok, hi, tol):
    lo = 0.0
    if hi is None:
        hi = 1.0
        while not ok(hi):
            lo, hi = hi, 2 * hi
            if hi > 1e8:
                return math.inf
    if ok(lo):
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


# --------------------------------------------------------------------------
# MOCP

def _upper_dual_directions(k: int, recession, n: int) -> np.ndarray:
    D = simplex_directions(k, n)
    if recession is not None and len(recession):
        R = np.atleast_2d(recession)
        D = D[np.all(D @ R.T >= -1e-12, axis=1)]
    return D


def _mocp_gaps(spec, images, eps, p, D, flavor):
    lift = lift_maps(spec.n, spec.m)
    k = spec.m + 1
    d = np.ones(k) / ones_norm(k, p)
    PS = np.atleast_2d(images) @ lift.Q.T
    low_P = np.array([cached_lift_min(spec, w) for w in D])
    low_I = np.min(D @ PS.T, axis=1)
    if flavor == SHIFT:
        gaps = low_I - eps * (D @ d) - low_P
    else:
        gaps = low_I - low_P - eps * norms(D, dual_index(p))
    return gaps, low_P


def verify_mocp_solution(spec: ConvexSetSpec, sol: SolutionSet, grid=None, p: Optional[float] = None,
                         eps: Optional[float] = None, n_directions: int = 2000,
                         threshold: float = PASS_THRESHOLD) -> Certificate:
    """Check the lifted-problem solution property on nonnegative directions.

    Shift flavor: ``P ⊆ conv P[S_bar] + P_inf - eps 1/||1||``.
    Hausdorff flavor: ``P ⊆ conv P[S_bar] + P_inf + B_eps``.
    For ``w`` in the dual of ``P_inf`` the lower support of the upper
    image is ``min_S w^T P z``.
    """
    if sol.kind != MOCP:
        raise ValueError("expected a MOCP solution")
    p = sol.p if p is None else check_p(p)
    eps = sol.epsilon if eps is None else eps
    k = spec.m + 1
    D = _upper_dual_directions(k, sol.recession, n_directions) if grid is None else np.atleast_2d(grid)
    gaps, low = _mocp_gaps(spec, sol.images, eps, p, D, sol.flavor)
    finite = np.isfinite(low)
    gaps = np.where(finite, gaps, math.inf)
    return Certificate(D, gaps, np.where(finite, low, 0.0), eps, threshold, kind="mocp",
                       extra={"p": p, "flavor": sol.flavor})


def minimal_mocp_tolerance(spec: ConvexSetSpec, sol: SolutionSet, grid=None, p: Optional[float] = None,
                           hi: Optional[float] = None, tol: float = BISECT_TOL,
                           threshold: float = BISECT_THRESHOLD, **kw) -> float:
    """Bisect the smallest eps at which :func:`verify_mocp_solution` passes."""
    def ok(e):
        return verify_mocp_solution(spec, sol, grid=grid, p=p, eps=e, threshold=threshold, **kw).passed

    return _bisect(ok, hi, tol)


def hausdorff_estimate(spec: ConvexSetSpec, polytope, p: float, grid=None, refine: bool = True) -> float:
    """One-sided Hausdorff distance from Y to a polytope inside it."""
    if not isinstance(polytope, Polyhedron):
        polytope = Polyhedron.from_vrep(polytope)
    value, _ = hausdorff_upper(spec, polytope, p, grid=grid, refine=refine)
    return value


# --------------------------------------------------------------------------
# auxiliary optimization lemmas

def brute_simplex_lemma(m: int, p: float, grid_density: int = 12):
    """``max ||r - 1||_p`` over ``r >= 0, 1^T r <= m + 1`` by enumeration.

    Candidates are the feasible simplex vertices plus a lattice of step
    ``(m+1)/grid_density``; the objective is convex so a vertex wins, which
    the lattice lets the caller observe rather than assume.
    """
    p = check_p(p)
    lattice = simplex_grid(m + 1, grid_density)[:, :m] * (m + 1)
    verts = np.vstack([np.zeros(m), (m + 1) * np.eye(m)])
    cand = np.vstack([verts, lattice])
    vals = norms(cand - 1.0, p)
    i = int(np.argmax(vals))
    return cand[i], float(vals[i])


def appendix_lemma_value(m: int, p: float, eps: float = 1.0) -> float:
    """Objective at the stated optimizers r*, b*: ``eps (m^{p-1} + 1)^{1/p}``."""
    r, b = appendix_lemma_optimizers(m, p, eps)
    return norm(r - b, p)


def appendix_lemma_optimizers(m: int, p: float, eps: float = 1.0):
    p = check_p(p)
    r = np.zeros(m + 1)
    b = np.zeros(m + 1)
    if math.isinf(p):
        r[0] = eps * m
        b[1:] = eps
    else:
        r[0] = eps * m ** ((p - 1) / p)
        b[1:] = eps * m ** (-1.0 / p)
    return r, b


def _appendix_objective(b, p):
    """Inner maximum over r: a convex function on the simplex peaks at a vertex."""
    s = b.sum()
    if s < 0:
        return -math.inf
    best = -math.inf
    for i in range(b.size):
        r = np.zeros_like(b)
        r[i] = s
        best = max(best, norm(r - b, p))
    return best


def brute_appendix_lemma(m: int, p: float, eps: float = 1.0, samples: int = 4000, seed: int = 0,
                         include_stated: bool = False):
    """``max ||r - b||_p`` s.t. ``||b||_p <= eps, r >= 0, 1^T (r - b) = 0``.

    For each b the maximum over r is attained at a vertex ``(1^T b) e_i``
    of the feasible simplex.  The outer objective is convex in b, so for
    p in {1, inf} the exact maximum sits at a vertex of the polytope
    ``{||b|| <= eps, 1^T b >= 0}`` (enumerated); otherwise random sphere
    samples are refined with Nelder-Mead.  The stated optimizer is only
    added to the candidates when ``include_stated`` is set, so by default
    the search is blind to it.  Returns ``(r*, b*, value)``.
    """
    p = check_p(p)
    k = m + 1
    cands = []
    if p == 1.0 or math.isinf(p):
        if p == 1.0:
            signs = np.array([s for s in np.ndindex(*(2,) * k)]) * 2 - 1
            A = np.vstack([-signs, np.ones((1, k))])
            beta = np.r_[-eps * np.ones(len(signs)), 0.0]
        else:
            A = np.vstack([np.eye(k), -np.eye(k), np.ones((1, k))])
            beta = np.r_[-eps * np.ones(2 * k), 0.0]
        cands.extend(Polyhedron.from_hrep(A, beta).vertices)
    else:
        from scipy.optimize import minimize

        rng = np.random.default_rng(seed)
        U = rng.standard_normal((samples, k))
        U[U.sum(axis=1) < 0] *= -1
        B = eps * U / norms(U, p)[:, None]
        vals = np.array([_appendix_objective(b, p) for b in B])
        order = np.argsort(vals)[::-1][:10]

        def neg(u):
            nu = norm(u, p)
            if nu == 0:
                return 0.0
            return -_appendix_objective(eps * u / nu, p)

        for j in order:
            res = minimize(neg, B[j], method="Nelder-Mead",
                           options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
            cands.append(eps * res.x / norm(res.x, p))
        cands.extend(B[order])
    if include_stated:
        cands.append(appendix_lemma_optimizers(m, p, eps)[1])
    best_val, best_b = -math.inf, None
    for b in cands:
        v = _appendix_objective(np.asarray(b), p)
        if v > best_val + 1e-13:
            best_val, best_b = v, np.asarray(b)
    s = best_b.sum()
    vals = [norm(s * np.eye(k)[i] - best_b, p) for i in range(k)]
    r = s * np.eye(k)[int(np.argmax(vals))]
    return r, best_b, float(best_val)
