"""Problem-to-problem constructions and solution translations.

Covers the lift of a convex projection to a multi-objective problem, the
associated projection of a convex vector optimization problem, the
tolerance multipliers between them and the two solution flavors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    CP,
    CVOP_INFIMIZER,
    HAUSDORFF,
    MOCP,
    SHIFT,
    ConeHRep,
    ConvexSetSpec,
    ConvprojError,
    LiftMaps,
    QuadraticConstraint,
    SolutionSet,
    Unbounded,
    delta_c,
    kappa_over,
    kappa_under,
    lift_maps,
    norm,
    ones_norm,
    q_opnorm,
)
from .geometry import cone_generators

CP_TO_MOCP = "cp-to-mocp"
MOCP_TO_CP = "mocp-to-cp"
CVOP_TO_PV = "cvop-to-pv"
PV_TO_CVOP = "pv-to-cvop"
CVOP_TO_MOCP2 = "cvop-to-mocp2"
MOCP2_TO_CVOP = "mocp2-to-cvop"


class MissingRecession(ConvprojError):
    pass


class Undecidable(ConvprojError):
    pass


class NonrepresentableCone(ConvprojError):
    pass


class ToleranceTooTight(ConvprojError):
    pass


# --------------------------------------------------------------------------
# CP <-> MOCP

def cp_to_mocp(spec: ConvexSetSpec):
    """The lifted problem: same feasible set, objective ``P z = (y, -1^T y)``."""
    if spec.m < 1:
        raise ValueError("the projection needs at least one y-coordinate")
    return spec, lift_maps(spec.n, spec.m)


def upper_recession_generators(cp_rays, m: int) -> np.ndarray:
    """Generators of ``Q K + R^{m+1}_+`` for a cone K given by generators."""
    Q = lift_maps(0, m).Q
    gens = [np.eye(m + 1)]
    if cp_rays is not None and len(cp_rays):
        gens.insert(0, np.atleast_2d(cp_rays) @ Q.T)
    return np.vstack(gens)


def cp_recession_from_upper(upper_rays, m: int) -> Optional[np.ndarray]:
    """Generators of ``{r : Q r in cone(upper_rays)}``; None for the trivial cone."""
    R = np.atleast_2d(np.asarray(upper_rays, dtype=float))
    Q = lift_maps(0, m).Q
    H = _cone_hrep(R)
    if len(H) == 0:
        rays, lines = np.zeros((0, m)), np.eye(m)
    else:
        rays, lines = cone_generators(H @ Q)
    gens = np.vstack([rays, lines, -lines])
    return gens if len(gens) else None


def _cone_hrep(R) -> np.ndarray:
    """Rows H with ``cone(R) = {z : H z >= 0}`` via the polar cone."""
    rays, lines = cone_generators(R)
    return np.vstack([rays, lines, -lines])


def translate_cp_to_mocp_solution(sol: SolutionSet, m: Optional[int] = None, p: Optional[float] = None,
                                  self_bounded: bool = False) -> SolutionSet:
    """A shift-style CP eps-solution is a (kappa * eps)-solution of the lifted problem."""
    if sol.kind != CP:
        raise ValueError("expected a CP solution")
    m = sol.images.shape[1] if m is None else m
    p = sol.p if p is None else p
    if self_bounded and sol.recession is None:
        raise MissingRecession("self-bounded translation needs the recession cone of cl Y")
    rec = None if sol.recession is None else upper_recession_generators(sol.recession, m)
    return sol.replace(epsilon=kappa_under(m, p) * sol.epsilon, p=p, kind=MOCP, recession=rec,
                       minimizers_guaranteed=True)


def translate_mocp_to_cp_solution(sol: SolutionSet, m: Optional[int] = None, p: Optional[float] = None) -> SolutionSet:
    """A shift-style MOCP eps-solution is a (kappa_bar * eps)-solution of the projection."""
    if sol.kind != MOCP:
        raise ValueError("expected a MOCP solution")
    m = sol.images.shape[1] if m is None else m
    p = sol.p if p is None else p
    rec = None if sol.recession is None else cp_recession_from_upper(sol.recession, m)
    return sol.replace(epsilon=kappa_over(m, p) * sol.epsilon, p=p, kind=CP, recession=rec,
                       minimizers_guaranteed=None)


def exact_translate(sol: SolutionSet, direction: str) -> SolutionSet:
    """Exact solutions coincide for the projection and its lift."""
    if sol.epsilon != 0:
        raise ValueError("exact translation needs epsilon = 0")
    m = sol.images.shape[1]
    if direction == CP_TO_MOCP:
        if sol.kind != CP:
            raise ValueError("expected a CP solution")
        rec = None if sol.recession is None else upper_recession_generators(sol.recession, m)
        return sol.replace(kind=MOCP, recession=rec, minimizers_guaranteed=True)
    if direction == MOCP_TO_CP:
        if sol.kind != MOCP:
            raise ValueError("expected a MOCP solution")
        rec = None if sol.recession is None else cp_recession_from_upper(sol.recession, m)
        return sol.replace(kind=CP, recession=rec, minimizers_guaranteed=None)
    raise ValueError(f"unknown direction {direction!r}")


# --------------------------------------------------------------------------
# solution flavors

def flavor_convert(sol: SolutionSet, to: str, cone: Optional[ConeHRep] = None, c=None) -> SolutionSet:
    """Switch between the shift-style and the Hausdorff-style tolerance.

    shift -> hausdorff keeps epsilon (the shift ``-eps c`` lies in the
    eps-ball).  hausdorff -> shift multiplies by ``1 / delta_c``, which for
    the orthant with ``c = 1 / ||1||_p`` equals ``||1||_p``.
    """
    if to == sol.flavor:
        return sol
    if to == HAUSDORFF:
        return sol.replace(flavor=HAUSDORFF)
    if to != SHIFT:
        raise ValueError(f"unknown flavor {to!r}")
    if cone is None:
        k = sol.images.shape[1] + (1 if sol.kind == MOCP else 0)
        factor = ones_norm(k, sol.p)
    else:
        factor = 1.0 / delta_c(cone, c, sol.p)
    return sol.replace(flavor=SHIFT, epsilon=factor * sol.epsilon)


def translate_hausdorff(sol: SolutionSet, direction: str, m: Optional[int] = None, p: Optional[float] = None) -> SolutionSet:
    """Hausdorff-style translations scale epsilon by ``||Q||`` both ways."""
    if sol.flavor != HAUSDORFF:
        raise ValueError("expected a Hausdorff-style solution")
    m = sol.images.shape[1] if m is None else m
    p = sol.p if p is None else p
    eps = q_opnorm(m, p) * sol.epsilon
    if direction == CP_TO_MOCP:
        if sol.kind != CP:
            raise ValueError("expected a CP solution")
        return sol.replace(epsilon=eps, p=p, kind=MOCP, minimizers_guaranteed=True)
    if direction == MOCP_TO_CP:
        if sol.kind != MOCP:
            raise ValueError("expected a MOCP solution")
        return sol.replace(epsilon=eps, p=p, kind=CP, minimizers_guaranteed=None)
    raise ValueError(f"unknown direction {direction!r}")


# --------------------------------------------------------------------------
# boundedness

BOUNDED = "bounded"
SELF_BOUNDED = "self-bounded"
UNBOUNDED = "unbounded"


@dataclass
class BoundednessClass:
    tag: str
    witness: dict = field(default_factory=dict)


def recession_cone(spec: ConvexSetSpec):
    """``(rays, lines)`` of the recession cone of a nonempty quadratic set.

    For a convex quadratic ``z^T A z + b^T z + c0 <= 0`` the recession
    cone is ``{r : A r = 0, b^T r <= 0}``; intersections and equalities
    combine row-wise.
    """
    d = spec.dim
    rows = []
    for con in spec.constraints:
        if not con.is_linear:
            rows.append(con.A)
            rows.append(-con.A)
        rows.append(-con.b[None, :])
    if spec.eq_matrix is not None:
        rows.append(spec.eq_matrix)
        rows.append(-spec.eq_matrix)
    H = np.vstack(rows) if rows else np.zeros((0, d))
    H = H[np.linalg.norm(H, axis=1) > 0]
    return cone_generators(H) if len(H) else (np.zeros((0, d)), np.eye(d))


def projected_recession(spec: ConvexSetSpec):
    """Generators ``(rays, lines)`` of ``proj_y S_inf`` in y-space, cleaned."""
    rays, lines = recession_cone(spec)
    ry = rays[:, spec.n:]
    ly = lines[:, spec.n:]
    gens = np.vstack([ry, ly, -ly])
    gens = gens[np.linalg.norm(gens, axis=1) > 1e-12]
    if len(gens) == 0:
        return np.zeros((0, spec.m)), np.zeros((0, spec.m))
    # re-derive a minimal description through the polar
    H = _cone_hrep(gens)
    if len(H) == 0:
        return np.zeros((0, spec.m)), np.eye(spec.m)
    return cone_generators(H)


def _projection_is_exact(spec: ConvexSetSpec) -> bool:
    """Whether ``(cl Y)_inf = proj_y S_inf`` is guaranteed.

    True when S is polyhedral, or when no nonzero recession direction of S
    has zero y-part (then the projection is closed and commutes with
    taking recession cones).
    """
    if all(c.is_linear for c in spec.constraints):
        return True
    rays, lines = recession_cone(spec)
    if len(lines):
        if np.any(np.linalg.norm(lines[:, spec.n:], axis=1) <= 1e-12) or len(lines) > np.linalg.matrix_rank(lines[:, spec.n:], tol=1e-9):
            return False
    # a nonzero r in S_inf with r_y = 0: check the cone S_inf cap {r_y = 0}
    d = spec.dim
    E = np.hstack([np.zeros((spec.m, spec.n)), np.eye(spec.m)])
    H = _cone_hrep(np.vstack([rays, lines, -lines])) if len(rays) + len(lines) else np.eye(d)
    H = np.vstack([H, E, -E])
    r2, l2 = cone_generators(H)
    return len(r2) == 0 and len(l2) == 0


def classify_boundedness(spec: ConvexSetSpec) -> BoundednessClass:
    from .solver import minimize_linear

    m = spec.m
    finite = True
    for i in range(m):
        for s in (1.0, -1.0):
            cost = np.zeros(spec.dim)
            cost[spec.n + i] = s
            try:
                minimize_linear(spec, cost)
            except Unbounded:
                finite = False
                break
        if not finite:
            break
    if finite:
        return BoundednessClass(BOUNDED)
    rays, lines = projected_recession(spec)
    if len(lines) and np.linalg.matrix_rank(lines, tol=1e-9) == m:
        return BoundednessClass(UNBOUNDED, {"rays": np.zeros((0, m)), "lines": lines})
    # K* generators: every w with w^T r >= 0 on K
    K = np.vstack([rays, lines, -lines])
    dual = _cone_hrep_dual(K, m)
    for w in dual:
        cost = np.zeros(spec.dim)
        cost[spec.n:] = w
        try:
            minimize_linear(spec, cost)
        except Unbounded:
            if _projection_is_exact(spec):
                return BoundednessClass(UNBOUNDED, {"rays": rays, "lines": lines, "direction": w})
            raise Undecidable("the projected recession cone may be smaller than the recession cone of cl Y")
    return BoundednessClass(SELF_BOUNDED, {"rays": rays, "lines": lines})


def _cone_hrep_dual(K, m) -> np.ndarray:
    """Generators of the dual cone ``{w : w^T r >= 0 for r in K}``."""
    if len(K) == 0:
        return np.vstack([np.eye(m), -np.eye(m)])
    return _cone_hrep(K)


def mocp_boundedness_from_recession(cp_rays, m: int) -> str:
    """Tag of the lifted problem read off ``P_inf = Q K + R^{m+1}_+``.

    Bounded iff the upper image recession cone is the orthant.
    """
    gens = upper_recession_generators(cp_rays, m)
    H = _cone_hrep(gens)
    orth = np.eye(m + 1)
    inside = all(np.all(H @ r >= -1e-9) for r in orth)
    back = all(np.all(g >= -1e-9) for g in gens)
    return BOUNDED if inside and back else "not-bounded"


# --------------------------------------------------------------------------
# CVOP

@dataclass(frozen=True, eq=False)
class CvopSpec:
    """``min Gamma(x)`` over ``X`` with respect to the cone ``C = {W z >= 0}``."""

    X: ConvexSetSpec
    Gamma: tuple
    C: ConeHRep
    c_dir: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "Gamma", tuple(self.Gamma))
        if self.X.m != 0:
            raise ValueError("the feasible set must live in x-space only (m = 0)")
        for g in self.Gamma:
            if g.dim != self.X.n:
                raise ValueError("objective components must act on x")
        if len(self.Gamma) != self.C.dim:
            raise ValueError("cone dimension differs from the number of objectives")
        c = np.asarray(self.c_dir, dtype=float)
        if not np.all(self.C.W @ c > 0):
            raise ValueError("direction must lie in the interior of the cone")
        object.__setattr__(self, "c_dir", c)

    @property
    def n(self) -> int:
        return self.X.n

    @property
    def m(self) -> int:
        return len(self.Gamma)

    def gamma(self, x) -> np.ndarray:
        return np.array([g.value(x) for g in self.Gamma])

    def gamma_many(self, Xs) -> np.ndarray:
        return np.array([self.gamma(x) for x in np.atleast_2d(Xs)])

    def cone_generators(self) -> np.ndarray:
        rays, _ = cone_generators(self.C.W)
        return rays


def check_c_convex(cvop: CvopSpec, pairs: int = 200, seed: int = 0, tol: float = 1e-8) -> bool:
    """Spot-check the midpoint inequality ``Gamma(mid) <=_C mean`` on random feasible pairs."""
    from .solver import interior_point, minimize_linear

    rng = np.random.default_rng(seed)
    base = interior_point(cvop.X)
    pts = [base]
    for _ in range(8):
        try:
            pts.append(minimize_linear(cvop.X, rng.standard_normal(cvop.n)).z_star)
        except Unbounded:
            pts.append(base + rng.standard_normal(cvop.n))
    pts = np.array(pts)
    for _ in range(pairs):
        i, j = rng.integers(len(pts), size=2)
        lam = rng.random()
        a = pts[i] * lam + (1 - lam) * base
        b = pts[j] * lam + (1 - lam) * base
        mid = cvop.gamma(0.5 * (a + b))
        avg = 0.5 * (cvop.gamma(a) + cvop.gamma(b))
        if not cvop.C.contains(avg - mid, tol):
            return False
    return True


def cvop_to_cp(cvop: CvopSpec) -> ConvexSetSpec:
    """The associated projection ``S_a = {(x, y) : x in X, W (y - Gamma(x)) >= 0}``."""
    n, m = cvop.n, cvop.m
    dim = n + m
    xi = np.arange(n)
    cons = [c.embed(dim, xi) for c in cvop.X.constraints]
    for w in cvop.C.W:
        for j, g in enumerate(cvop.Gamma):
            if w[j] < 0 and not g.is_linear:
                raise NonrepresentableCone(
                    "cone row has a negative weight on a nonlinear objective; w^T Gamma may be nonconvex")
        A = np.zeros((dim, dim))
        A[:n, :n] = sum(w[j] * g.A for j, g in enumerate(cvop.Gamma))
        b = np.zeros(dim)
        b[:n] = sum(w[j] * g.b for j, g in enumerate(cvop.Gamma))
        b[n:] = -w
        c0 = float(sum(w[j] * g.c0 for j, g in enumerate(cvop.Gamma)))
        cons.append(QuadraticConstraint(A, b, c0))
    E = f = None
    if cvop.X.eq_matrix is not None:
        E = np.hstack([cvop.X.eq_matrix, np.zeros((cvop.X.eq_matrix.shape[0], m))])
        f = cvop.X.eq_rhs
    return ConvexSetSpec(n, m, tuple(cons), E, f)


def infimizer_to_cp_solution(Xbar: SolutionSet, cvop: CvopSpec) -> SolutionSet:
    """Graph points ``(x, Gamma(x))`` of an infimizer, same epsilon.

    The ordering cone generators go into ``recession``; in the exact case
    they stand in for the infinite set ``{(x, y) : y in Gamma(x) + C}``.
    """
    if Xbar.kind != CVOP_INFIMIZER:
        raise ValueError("expected an infimizer")
    X = Xbar.points
    G = cvop.gamma_many(X)
    Z = np.hstack([X, G])
    return SolutionSet(Z, G, Xbar.epsilon, Xbar.p, flavor=Xbar.flavor, kind=CP,
                       recession=cvop.cone_generators())


def cp_solution_to_infimizer(Sbar: SolutionSet, cvop: CvopSpec, xi: float) -> SolutionSet:
    """x-projections of a projection solution form a finite xi-infimizer.

    Requires ``xi > eps / delta_c`` (strict); the exact case ``eps = 0``
    accepts ``xi = 0``.  Minimizer membership is not guaranteed.
    """
    if Sbar.kind != CP:
        raise ValueError("expected a CP solution")
    thr = Sbar.epsilon / delta_c(cvop.C, cvop.c_dir, Sbar.p)
    if not (xi > thr or (Sbar.epsilon == 0 and xi == 0)):
        raise ToleranceTooTight(f"xi = {xi} must exceed eps / delta_c = {thr}")
    X = Sbar.points[:, :cvop.n]
    return SolutionSet(X, cvop.gamma_many(X), xi, Sbar.p, flavor=SHIFT, kind=CVOP_INFIMIZER,
                       minimizers_guaranteed=False,
                       notes=("x-projections of a projection solution need not be minimizers",))


def cvop_hausdorff_bridge(sol: SolutionSet, cvop: CvopSpec, direction: str, xi: Optional[float] = None) -> SolutionSet:
    """Hausdorff-style bridge between CVOP infimizers and the associated projection.

    infimizer -> projection keeps eps; projection -> infimizer holds for
    every ``xi > eps`` (requires ``(cl Y_a)_inf = cl C``).
    """
    if direction == CVOP_TO_PV:
        out = infimizer_to_cp_solution(sol, cvop)
        return out.replace(flavor=HAUSDORFF)
    if direction == PV_TO_CVOP:
        if xi is None or not (xi > sol.epsilon or (sol.epsilon == 0 and xi == 0)):
            raise ToleranceTooTight(f"xi must exceed eps = {sol.epsilon}")
        X = sol.points[:, :cvop.n]
        return SolutionSet(X, cvop.gamma_many(X), xi, sol.p, flavor=HAUSDORFF, kind=CVOP_INFIMIZER,
                           minimizers_guaranteed=False)
    raise ValueError(f"unknown direction {direction!r}")


def combined_corollary(sol: SolutionSet, cvop: CvopSpec, direction: str, xi: Optional[float] = None) -> SolutionSet:
    """CVOP <-> lifted problem of the associated projection.

    CVOP eps-infimizer -> (kappa eps)-solution of the lift; a lifted
    eps-solution -> xi-infimizer for ``xi > kappa_bar eps / delta_c``.
    """
    if direction == CVOP_TO_MOCP2:
        return translate_cp_to_mocp_solution(infimizer_to_cp_solution(sol, cvop))
    if direction == MOCP2_TO_CVOP:
        cp = translate_mocp_to_cp_solution(sol)
        if xi is None:
            raise ToleranceTooTight("a tolerance xi is required")
        return cp_solution_to_infimizer(cp, cvop, xi)
    raise ValueError(f"unknown direction {direction!r}")


def dominating_point(points, C: ConeHRep, c=None, p: float = 2.0) -> np.ndarray:
    """A point q with ``q <=_C q_i`` for all given points.

    Pairwise construction ``q := q2 - ||q1 - q2|| c`` with c scaled so that
    ``c + B_1`` lies in C, folded over the list.
    """
    Qs = np.atleast_2d(np.asarray(points, dtype=float))
    c = C.interior_direction(p) if c is None else np.asarray(c, dtype=float)
    c = c / delta_c(C, c, p)
    q = Qs[0]
    for qi in Qs[1:]:
        q = qi - norm(q - qi, p) * c
    return q


def filter_to_solution(Sbar: SolutionSet, cvop: CvopSpec, tol: float = 1e-6, grid: int = 400, seed: int = 0):
    """Keep the pairs whose y is C-minimal in ``Y_a``.

    Hypothesis ``Y_a = conv proj_y S_bar + C`` is checked on a grid of
    directions from the negative dual cone; raises ValueError if it fails.
    Dominance of each y is tested by ``min 1^T W y'`` over ``y' in Y_a``
    with ``W y' <= W y + tau``.
    """
    from .solver import Infeasible, minimize_linear, support

    spec = cvop_to_cp(cvop)
    Y = Sbar.images
    W = cvop.C.W
    rng = np.random.default_rng(seed)
    dual = _cone_hrep_dual(cvop.cone_generators(), cvop.m)
    lam = rng.random((grid, len(dual)))
    dirs = -np.vstack([dual, lam @ dual])
    for w in dirs:
        if norm(w, 2) < 1e-12:
            continue
        hY = support(spec, w)
        hS = float(np.max(Y @ w))
        if hY > hS + tol * (1 + abs(hY)):
            raise ValueError("conv proj_y S_bar + C does not reproduce Y_a")
    keep = []
    tau = 1e-7
    for i, y in enumerate(Y):
        extra = [QuadraticConstraint.linear(np.r_[np.zeros(spec.n), wr], -(wr @ y) - tau) for wr in W]
        sub = spec.with_constraints(extra)
        cost = np.r_[np.zeros(spec.n), W.sum(axis=0)]
        try:
            val = minimize_linear(sub, cost).value
        except Infeasible:
            keep.append(i)
            continue
        if val >= W.sum(axis=0) @ y - tol:
            keep.append(i)
    X = Sbar.points[keep, :cvop.n]
    return SolutionSet(X, cvop.gamma_many(X), 0.0, Sbar.p, kind=CVOP_INFIMIZER, minimizers_guaranteed=True)
