"""Outer-approximation (Benson-type) solver for the lifted multi-objective problem.

The lifted problem minimizes ``P z = (y, -1^T y)`` over ``z in S`` with
respect to the nonnegative orthant of R^{m+1}.  Starting from a shifted
ideal-point box, every vertex ``v`` of the current outer polyhedron is
scalarized by

    min t  s.t.  P z <= v + t d,  z in S,       d = 1 / ||1||_p,

and vertices farther than the tolerance budget are cut off by the
supporting halfspace ``w^T z >= w^T (v + t d)``.
"""
from __future__ import annotations

import json
import logging
import math
import sys
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .core import (
    MOCP,
    SHIFT,
    ConvexSetSpec,
    ConvprojError,
    SolutionSet,
    Unbounded,
    check_p,
    lift_maps,
    ones_norm,
)
from .geometry import Polyhedron
from .solver import distance_scalarization, minimize_linear

log = logging.getLogger(__name__)

# fraction of epsilon available to the vertex distances; the rest absorbs
# the barrier solver's inexactness
EPS_SPLIT = 0.9
IDEAL_SHIFT = 1.0


class MaxIterations(ConvprojError):
    """Iteration budget exhausted; ``result`` holds the last inner/outer pair."""

    def __init__(self, message, result):
        super().__init__(message)
        self.result = result


@dataclass
class BensonResult:
    solution: SolutionSet
    outer: Polyhedron
    iterations: int
    scalarizations: int
    achieved_eps: float
    history: list = field(default_factory=list)

    @property
    def inner_vertices(self) -> np.ndarray:
        """Lifted images ``P z`` of the solution points."""
        return self.solution.images @ lift_maps(0, self.solution.images.shape[1]).Q.T

    @cached_property
    def inner(self) -> Polyhedron:
        """``conv P[S_bar] + R^{m+1}_+`` with both representations."""
        k = self.inner_vertices.shape[1]
        return Polyhedron.from_vrep(_pareto_prune(self.inner_vertices), np.eye(k))


def _pareto_prune(V, tol=1e-12):
    """Drop points dominated by another point (they are not inner vertices)."""
    keep = []
    for i, v in enumerate(V):
        dom = np.all(V <= v + tol, axis=1) & np.any(V < v - tol, axis=1)
        if not np.any(dom):
            keep.append(i)
    return V[keep]


def ideal_point(spec: ConvexSetSpec):
    """Per-objective minima of ``P z`` and their minimizers.

    Raises Unbounded if some objective is unbounded below, which is the
    boundedness pre-check of the solver.
    """
    lift = lift_maps(spec.n, spec.m)
    vals, pts = [], []
    for row in lift.P:
        try:
            res = minimize_linear(spec, row)
        except Unbounded as exc:
            raise Unbounded("the lifted problem is not bounded; only bounded instances are solved") from exc
        vals.append(res.value)
        pts.append(res.z_star)
    return np.array(vals), np.array(pts)


def solve_mocp(spec: ConvexSetSpec, eps: float, p: float = 2.0, max_iter: int = 100,
               verbose: bool = False, stream=None) -> BensonResult:
    """Finite shift-style eps-solution of the lifted problem of ``spec``.

    With ``verbose`` one JSON record per iteration is written to ``stream``
    (stderr by default).
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    p = check_p(p)
    lift = lift_maps(spec.n, spec.m)
    k = spec.m + 1
    d = np.ones(k) / ones_norm(k, p)
    budget = EPS_SPLIT * eps

    ideal, pts = ideal_point(spec)
    points = list(pts)
    outer = Polyhedron.from_hrep(np.eye(k), ideal - IDEAL_SHIFT)
    cache: dict = {}
    n_scal = 0
    history = []
    stream = stream or sys.stderr

    def key(v):
        return tuple(np.round(v, 10))

    it = 0
    worst = math.inf
    while True:
        it += 1
        cuts = []
        worst = -math.inf
        for v in outer.vertices:
            kv = key(v)
            if kv not in cache:
                res = distance_scalarization(spec, lift, v, d)
                n_scal += 1
                cache[kv] = res
                points.append(res.z_star)
            res = cache[kv]
            worst = max(worst, res.t)
            if res.t > budget:
                cuts.append(_cut(spec, lift, res.w))
        rec = {"iteration": it, "vertices": int(len(outer.vertices)), "worst_t": float(worst),
               "cuts": len(cuts), "scalarizations": n_scal}
        history.append(rec)
        if verbose:
            stream.write(json.dumps(rec) + "\n")
        log.debug("benson %s", rec)
        if not cuts:
            break
        if it >= max_iter:
            result = _finish(spec, points, eps, worst, p, outer, it, n_scal, history)
            raise MaxIterations(f"no convergence after {max_iter} iterations (achieved {worst:.3g})", result)
        # deterministic order
        cuts.sort(key=lambda c: (tuple(c[0]), c[1]))
        for w, beta in _dedup_cuts(cuts):
            outer = outer.add_halfspace(w, beta)
    return _finish(spec, points, eps, max(worst, 0.0), p, outer, it, n_scal, history)


def _cut(spec, lift, w, zero_tol=1e-6):
    """Supporting halfspace ``w^T z >= min_S w^T P z`` with a cleaned normal.

    Barrier multipliers of inactive objectives are tiny but nonzero; such
    normals meet the orthant rays far away and produce huge spurious
    vertices.  Small entries are zeroed and the offset recomputed exactly,
    which keeps the cut valid for the upper image.
    """
    w = np.where(w < zero_tol, 0.0, w)
    w = w / w.sum()
    beta = minimize_linear(spec, lift.P.T @ w).value
    return w, float(beta)


def _dedup_cuts(cuts, tol=1e-9):
    out = []
    for w, b in cuts:
        if all(np.max(np.abs(w - w2)) > tol or abs(b - b2) > tol for w2, b2 in out):
            out.append((w, b))
    return out


def _finish(spec, points, eps, achieved, p, outer, it, n_scal, history):
    Z = np.array(points)
    # drop duplicates but keep deterministic order
    _, idx = np.unique(np.round(Z, 10), axis=0, return_index=True)
    Z = Z[np.sort(idx)]
    sol = SolutionSet(Z, Z[:, spec.n:], eps, p, flavor=SHIFT, kind=MOCP, minimizers_guaranteed=True,
                      notes=("every feasible point of the lifted problem is a minimizer",))
    return BensonResult(sol, outer, it, n_scal, float(achieved), history)
