"""Polyhedral calculus: double description, support functions, grids.

A :class:`Polyhedron` ``{z : a_i^T z >= beta_i}`` is stored together with its
generators (vertices and rays).  Both conversions run the double-description
method on the homogenized cone

    {(lam, z) : -beta_i lam + a_i^T z >= 0, lam >= 0}

whose extreme rays with ``lam > 0`` are the vertices and with ``lam = 0`` the
recession rays.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .core import ConvprojError, dual_index, norm, norms

RANK_TOL = 1e-9
# Generator/facet incidence after many cuts: intersections of nearly parallel
# cuts lose a few digits, so tightness is judged more loosely than rank.
INCIDENCE_TOL = 1e-8
MAX_DIM = 6


class EmptyPolyhedron(ConvprojError):
    pass


# --------------------------------------------------------------------------
# double description on cones {x : A x >= 0}

def _normalize_rows(X):
    nx = np.linalg.norm(X, axis=1, keepdims=True)
    nx[nx == 0] = 1.0
    return X / nx


def _dedup(R, tol=1e-9):
    """Drop rows within ``tol`` (max-norm) of an earlier row."""
    if len(R) < 2:
        return R
    from scipy.spatial import cKDTree

    pairs = cKDTree(R).query_pairs(tol, p=np.inf, output_type="ndarray")
    if len(pairs) == 0:
        return R
    drop = np.zeros(len(R), dtype=bool)
    for i, j in sorted(map(tuple, np.sort(pairs, axis=1))):
        if not drop[i]:
            drop[j] = True
    return R[~drop]


def _initial_cone(A):
    """Pick a basis of rows (lexicographic greedy) and its simplicial cone."""
    r = A.shape[1]
    chosen = []
    for i in range(A.shape[0]):
        trial = chosen + [i]
        if np.linalg.matrix_rank(A[trial], tol=RANK_TOL) == len(trial):
            chosen = trial
            if len(chosen) == r:
                break
    if len(chosen) < r:
        return None, chosen
    B = np.linalg.inv(A[chosen])
    return _normalize_rows(B.T), chosen


def _dd_step(R, Z, a, zero_tol, H=None):
    """Intersect the cone generated by rays R with ``a^T x >= 0``.

    Z is the boolean incidence matrix (rays x processed constraints).  When
    the constraint rows H are given, adjacency is decided by the rank of the
    common tight rows instead of combinatorially, which tolerates incidence
    entries lost to rounding.
    """
    vals = R @ a
    scale = np.linalg.norm(a)
    pos = vals > zero_tol * scale
    neg = vals < -zero_tol * scale
    zer = ~pos & ~neg
    if not np.any(neg):
        return R, np.hstack([Z, zer[:, None]])
    ip, ineg = np.flatnonzero(pos), np.flatnonzero(neg)
    new_rays, new_inc = [], []
    rank_needed = R.shape[1] - 2
    if len(ip) and len(ineg):
        Zi = Z.astype(np.int64)
        common_counts = Zi[ip] @ Zi[ineg].T
        for a_i, p in enumerate(ip):
            for b_i, n in enumerate(ineg):
                if common_counts[a_i, b_i] < rank_needed:
                    continue
                common = Z[p] & Z[n]
                if H is not None:
                    if np.linalg.matrix_rank(H[common], tol=1e-7) < rank_needed:
                        continue
                else:
                    # combinatorial adjacency: no third ray tight on the common set
                    sup = np.all(Z[:, common], axis=1)
                    sup[p] = sup[n] = False
                    if np.any(sup):
                        continue
                x = vals[p] * R[n] - vals[n] * R[p]
                nx = np.linalg.norm(x)
                if nx == 0:
                    continue
                new_rays.append(x / nx)
                new_inc.append(np.r_[common, True])
    keep = ~neg
    R2 = R[keep]
    Z2 = np.hstack([Z[keep], zer[keep][:, None]])
    if new_rays:
        R2 = np.vstack([R2, np.array(new_rays)])
        Z2 = np.vstack([Z2, np.array(new_inc)])
    return R2, Z2


def cone_generators(A, zero_tol=RANK_TOL):
    """Generators of ``{x : A x >= 0}`` as ``(extreme_rays, lineality_basis)``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    d = A.shape[1]
    if A.shape[0] == 0:
        return np.zeros((0, d)), np.eye(d)
    An = _normalize_rows(A)
    L = scipy.linalg.null_space(An, rcond=RANK_TOL)
    if L.shape[1] == d:
        return np.zeros((0, d)), L
    # work on the orthogonal complement of the lineality space
    B = scipy.linalg.orth(An.T, rcond=RANK_TOL)  # d x r
    Ar = An @ B
    R, chosen = _initial_cone(Ar)
    Z = np.zeros((R.shape[0], 0), dtype=bool)
    order = chosen + [i for i in range(Ar.shape[0]) if i not in chosen]
    for i in order:
        R, Z = _dd_step(R, Z, Ar[i], zero_tol)
    R = _dedup(_normalize_rows(R @ B.T))
    return R, L.T


# --------------------------------------------------------------------------
# Polyhedron

@dataclass(frozen=True, eq=False)
class Polyhedron:
    """``{z : A z >= beta}`` paired with ``conv(vertices) + cone(rays) + span(lines)``."""

    A: np.ndarray
    beta: np.ndarray
    vertices: np.ndarray
    rays: np.ndarray
    lines: np.ndarray = field(default=None)

    def __post_init__(self):
        d = self.dim
        if self.lines is None:
            object.__setattr__(self, "lines", np.zeros((0, d)))
        for name in ("A", "beta", "vertices", "rays", "lines"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dim(self) -> int:
        return np.asarray(self.vertices).shape[1] if np.ndim(self.vertices) == 2 else np.asarray(self.A).shape[1]

    @property
    def hrep(self):
        return self.A, self.beta

    @classmethod
    def from_hrep(cls, A, beta) -> "Polyhedron":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        beta = np.asarray(beta, dtype=float).ravel()
        d = A.shape[1]
        if d > MAX_DIM:
            raise ValueError(f"dimension {d} exceeds the supported maximum {MAX_DIM}")
        H = np.vstack([np.hstack([-beta[:, None], A]), np.r_[1.0, np.zeros(d)]])
        R, L = cone_generators(H)
        if np.any(np.abs(L[:, 0]) > RANK_TOL):
            raise ValueError("degenerate homogenization")
        V, rays = _split_generators(R)
        if len(V) == 0:
            raise EmptyPolyhedron("no point satisfies all halfspaces")
        return cls(A, beta, V, rays, L[:, 1:])

    @classmethod
    def from_vrep(cls, vertices, rays=None, lines=None) -> "Polyhedron":
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        d = V.shape[1]
        if V.shape[0] == 0:
            raise EmptyPolyhedron("no vertices")
        if d > MAX_DIM:
            raise ValueError(f"dimension {d} exceeds the supported maximum {MAX_DIM}")
        Rr = np.zeros((0, d)) if rays is None or len(rays) == 0 else np.atleast_2d(np.asarray(rays, dtype=float))
        Ll = np.zeros((0, d)) if lines is None or len(lines) == 0 else np.atleast_2d(np.asarray(lines, dtype=float))
        # (beta, a) with a^T v - beta >= 0, a^T r >= 0, a^T l = 0
        G = np.vstack([
            np.hstack([-np.ones((len(V), 1)), V]),
            np.hstack([np.zeros((len(Rr), 1)), Rr]),
            np.hstack([np.zeros((len(Ll), 1)), Ll]),
            np.hstack([np.zeros((len(Ll), 1)), -Ll]),
        ])
        R, L = cone_generators(G)
        rows = [r for r in R] + [l for l in L] + [-l for l in L]
        A, beta = [], []
        for r in rows:
            a, b = r[1:], r[0]
            na = np.linalg.norm(a)
            if na <= RANK_TOL:
                continue  # the trivial inequality 0 >= -|b|
            A.append(a / na)
            beta.append(b / na)
        A = np.array(A).reshape(-1, d)
        beta = np.array(beta)
        Rr = _dedup(_normalize_rows(Rr)) if len(Rr) else Rr
        return cls(A, beta, _extreme_points(_dedup(V), A, beta, len(Ll)), Rr, Ll)

    def contains(self, z, tol: float = 1e-9) -> bool:
        z = np.asarray(z, dtype=float)
        if len(self.A) == 0:
            return True
        return bool(np.all(self.A @ z - self.beta >= -tol * (1.0 + np.abs(self.beta))))

    def is_bounded(self) -> bool:
        return len(self.rays) == 0 and len(self.lines) == 0

    def add_halfspace(self, a, beta: float) -> "Polyhedron":
        """Intersect with ``a^T z >= beta`` by one double-description step."""
        a = np.asarray(a, dtype=float)
        d = self.dim
        if len(self.lines):
            return Polyhedron.from_hrep(np.vstack([self.A, a]), np.r_[self.beta, beta])
        H = np.vstack([np.hstack([-self.beta[:, None], self.A]), np.r_[1.0, np.zeros(d)]])
        R = np.vstack([np.hstack([np.ones((len(self.vertices), 1)), self.vertices]),
                       np.hstack([np.zeros((len(self.rays), 1)), self.rays])])
        R = _normalize_rows(R)
        Hn = _normalize_rows(H)
        Z = np.abs(R @ Hn.T) <= INCIDENCE_TOL
        R2, Z2 = _dd_step(R, Z, np.r_[-beta, a], RANK_TOL, H=Hn)
        # drop points that are not extreme (rank of tight rows below d);
        # the rank tolerance is strict so that genuine vertices are kept
        H2 = np.vstack([Hn, _normalize_rows(np.r_[-beta, a][None, :])])
        ext = [i for i in range(len(R2)) if Z2[i].sum() >= d
               and np.linalg.matrix_rank(H2[Z2[i]], tol=1e-10) >= d]
        V, rays = _split_generators(_dedup(R2[ext]))
        if len(V) == 0:
            raise EmptyPolyhedron("cut removes the whole polyhedron")
        return Polyhedron(np.vstack([self.A, a]), np.r_[self.beta, beta], V, rays, self.lines)

    def support(self, w) -> float:
        """``sup_{z in P} w^T z`` (``inf`` when unbounded in direction w)."""
        return polytope_ball_support(self.vertices, self.rays, 0.0, 2.0, w, lines=self.lines)

    def lower_support(self, w) -> float:
        return -self.support(-np.asarray(w, dtype=float))

    def volume(self) -> float:
        from scipy.spatial import ConvexHull

        if not self.is_bounded():
            return math.inf
        return float(ConvexHull(self.vertices).volume)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "vertices": self.vertices.tolist(),
            "rays": self.rays.tolist(),
            "lines": self.lines.tolist(),
            "halfspaces": [{"a": a.tolist(), "beta": float(b)} for a, b in zip(self.A, self.beta)],
        }


def _extreme_points(V, A, beta, n_lines=0):
    """Points of V where the tight facet normals span the space (minus lines)."""
    if len(A) == 0:
        return V[:1]
    d = V.shape[1] - n_lines
    tight = np.abs(V @ A.T - beta) <= 1e-9 * (1.0 + np.abs(beta))
    keep = [i for i in range(len(V)) if tight[i].sum() >= d
            and np.linalg.matrix_rank(A[tight[i]], tol=RANK_TOL) >= d]
    return V[keep]


def _split_generators(R):
    d = R.shape[1] - 1
    lam = R[:, 0]
    is_v = lam > RANK_TOL
    V = R[is_v, 1:] / lam[is_v, None]
    rays = R[~is_v, 1:]
    rays = _normalize_rows(rays) if len(rays) else np.zeros((0, d))
    return _dedup(V), _dedup(rays)


def polytope_ball_support(vertices, rays, eps: float, p: float, w, lines=None) -> float:
    """Support function of ``conv V + cone R + B_eps`` (p-ball).

    Returns ``math.inf`` when w has positive inner product with a ray.
    """
    w = np.asarray(w, dtype=float)
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    if rays is not None and len(rays):
        R = np.atleast_2d(np.asarray(rays, dtype=float))
        if np.any(R @ w > 1e-12 * max(1.0, np.linalg.norm(w))):
            return math.inf
    if lines is not None and len(lines):
        if np.any(np.abs(np.atleast_2d(lines) @ w) > 1e-12 * max(1.0, np.linalg.norm(w))):
            return math.inf
    val = float(np.max(V @ w))
    if eps:
        val += eps * norm(w, dual_index(p))
    return val


# --------------------------------------------------------------------------
# direction grids

def circle_directions(n: int) -> np.ndarray:
    th = 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(th), np.sin(th)])


def fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    phi = np.arccos(1.0 - 2.0 * i / n)
    th = np.pi * (1.0 + 5.0 ** 0.5) * i
    return np.column_stack([np.cos(th) * np.sin(phi), np.sin(th) * np.sin(phi), np.cos(phi)])


def sign_directions(dim: int) -> np.ndarray:
    """All nonzero vectors in {-1, 0, 1}^dim, Euclidean-normalized."""
    S = np.array([s for s in itertools.product((-1.0, 0.0, 1.0), repeat=dim) if any(s)])
    return _normalize_rows(S)


def sphere_directions(dim: int, n: int = 2000, seed: int = 0, structured: bool = True) -> np.ndarray:
    """Direction grid on the unit sphere of R^dim.

    Tensor angular grid in 2-D, Fibonacci sphere in 3-D, seeded Gaussian
    samples above; ``structured`` appends the {-1,0,1}^dim sign vectors,
    where the polyhedral p = 1 and p = inf extremes live.
    """
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        D = circle_directions(n)
    elif dim == 3:
        D = fibonacci_sphere(n)
    else:
        rng = np.random.default_rng(seed)
        D = _normalize_rows(rng.standard_normal((n, dim)))
    if structured and dim <= 6:
        D = np.vstack([D, sign_directions(dim)])
    return D


def simplex_grid(dim: int, divisions: int) -> np.ndarray:
    """Lattice points ``k / divisions`` of the standard simplex in R^dim."""
    pts = []
    for c in itertools.combinations(range(divisions + dim - 1), dim - 1):
        parts = np.diff(np.r_[-1, np.array(c), divisions + dim - 1]) - 1
        pts.append(parts / divisions)
    return np.array(pts, dtype=float)


def simplex_directions(dim: int, n: int = 2000) -> np.ndarray:
    """Nonnegative directions with ``1^T w = 1`` and about n points."""
    k = 1
    while math.comb(k + 1 + dim - 1, dim - 1) <= n:
        k += 1
    return simplex_grid(dim, k)


# --------------------------------------------------------------------------
# Hausdorff-type estimates

@dataclass
class Certificate:
    """Support-function containment evidence over a finite direction set.

    ``gaps[i] = h_outer(w_i) - h_inner(w_i)`` where the inner side already
    includes the tolerance term; containment is certified on the grid when
    every gap is below ``threshold * (1 + |h_outer|)``.
    """

    directions: np.ndarray
    gaps: np.ndarray
    outer_values: np.ndarray
    epsilon: float
    threshold: float = 1e-5
    kind: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def scaled_gaps(self) -> np.ndarray:
        return self.gaps / (1.0 + np.abs(self.outer_values))

    @property
    def max_gap(self) -> float:
        return float(np.max(self.gaps)) if len(self.gaps) else -math.inf

    @property
    def worst_direction(self) -> np.ndarray:
        return self.directions[int(np.argmax(self.scaled_gaps))]

    @property
    def passed(self) -> bool:
        return bool(np.all(self.scaled_gaps <= self.threshold))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "epsilon": self.epsilon,
            "threshold": self.threshold,
            "passed": self.passed,
            "max_gap": self.max_gap,
            "worst_direction": self.worst_direction.tolist() if len(self.gaps) else None,
            "records": [{"direction": w.tolist(), "gap": float(g)} for w, g in zip(self.directions, self.gaps)],
            **self.extra,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def refine_direction(fun, w0, max_evals=80, step=0.05):
    """Locally maximize a direction functional from w0.

    Nelder-Mead over the tangent plane of w0 (the functionals are
    positively homogeneous, so the radial coordinate is dropped).
    """
    from scipy.optimize import minimize

    w0 = np.asarray(w0, dtype=float)
    w0 = w0 / np.linalg.norm(w0)
    B = scipy.linalg.null_space(w0[None, :])
    k = B.shape[1]

    def neg(t):
        return -fun(w0 + B @ t)

    simplex = np.vstack([np.zeros(k), step * np.eye(k)])
    res = minimize(neg, np.zeros(k), method="Nelder-Mead",
                   options={"xatol": 1e-7, "fatol": 1e-12, "maxfev": max_evals, "initial_simplex": simplex})
    x = w0 + B @ res.x
    return x / np.linalg.norm(x), -res.fun


def hausdorff_upper(spec, inner: Polyhedron, p: float, grid=None, refine: bool = True, check_inner: bool = True):
    """Grid estimate of ``sup_{y in Y} dist_p(y, inner)`` for ``inner`` inside Y.

    Returns ``(value, Certificate)``.  The grid maximum of
    ``(h_Y(w) - h_inner(w)) / ||w||_q`` is a lower bound on the one-sided
    Hausdorff distance; the local refinement from the worst grid direction
    tightens it.
    """
    from .verify import cached_support as support

    if check_inner:
        for v in inner.vertices:
            if not _y_feasible(spec, v):
                raise ValueError("inner polytope vertex lies outside the projected set")
    q = dual_index(p)
    D = sphere_directions(spec.m) if grid is None else np.atleast_2d(grid)
    hY = np.array([support(spec, w) for w in D])
    hI = np.array([inner.support(w) for w in D])
    ratio = (hY - hI) / norms(D, q)
    value = float(np.max(ratio))
    worst = D[int(np.argmax(ratio))]
    if refine and spec.m > 1:
        def fun(w):
            return (support(spec, w) - inner.support(w)) / norm(w, q)

        w_ref, val_ref = refine_direction(fun, worst)
        if val_ref > value:
            value, worst = float(val_ref), w_ref
            D = np.vstack([D, w_ref])
            hY = np.r_[hY, support(spec, w_ref)]
            hI = np.r_[hI, inner.support(w_ref)]
    cert = Certificate(D, hY - hI - value * norms(D, q), hY, value, kind="hausdorff",
                       extra={"hausdorff_estimate": value})
    return value, cert


def _y_feasible(spec, y, tol=1e-8) -> bool:
    """Membership of y in the projection, via a phase-I style solve."""
    from .core import ConvexSetSpec
    from .solver import Infeasible, interior_point, minimize_linear

    if spec.n == 0:
        return spec.residual(y) <= tol
    # fix y through equalities and test feasibility of the x-slice
    E = np.hstack([np.zeros((spec.m, spec.n)), np.eye(spec.m)])
    if spec.eq_matrix is not None:
        E2 = np.vstack([spec.eq_matrix, E])
        f2 = np.r_[spec.eq_rhs, y]
    else:
        E2, f2 = E, np.asarray(y, dtype=float)
    # relax by tol so boundary points count as members
    relaxed = ConvexSetSpec(spec.n, spec.m, tuple(
        type(c)(c.A, c.b, c.c0 - tol) for c in spec.constraints), E2, f2)
    try:
        interior_point(relaxed)
    except Infeasible:
        return False
    return True


# --------------------------------------------------------------------------
# export

def export_json(poly: Polyhedron, path) -> None:
    with open(path, "w") as fh:
        json.dump(poly.to_dict(), fh, indent=1)


def polytope_faces(points: np.ndarray):
    """Vertices and triangulated boundary facets of a 3-D point hull."""
    from scipy.spatial import ConvexHull

    hull = ConvexHull(points)
    used = np.unique(hull.simplices)
    remap = {int(v): i for i, v in enumerate(used)}
    faces = [[remap[int(v)] for v in s] for s in hull.simplices]
    # orient outward
    center = points[used].mean(axis=0)
    V = points[used]
    for f in faces:
        a, b, c = V[f[0]], V[f[1]], V[f[2]]
        if np.dot(np.cross(b - a, c - a), a - center) < 0:
            f[1], f[2] = f[2], f[1]
    return V, faces


def export_off(points, path) -> None:
    """Write the convex hull of 2-D or 3-D points as an OFF mesh.

    A 2-D hull becomes one counterclockwise polygon face in the plane z = 0.
    """
    from scipy.spatial import ConvexHull

    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] == 2:
        hull = ConvexHull(points)
        V = np.column_stack([points[hull.vertices], np.zeros(len(hull.vertices))])
        faces = [list(range(len(V)))]
    elif points.shape[1] == 3:
        V, faces = polytope_faces(points)
    else:
        raise ValueError("OFF export needs 2-D or 3-D points")
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{len(V)} {len(faces)} 0\n")
        for v in V:
            fh.write(" ".join(f"{x:.12g}" for x in v) + "\n")
        for f in faces:
            fh.write(f"{len(f)} " + " ".join(str(i) for i in f) + "\n")


def read_off(path):
    with open(path) as fh:
        tokens = fh.read().split()
    assert tokens[0] == "OFF"
    nv, nf = int(tokens[1]), int(tokens[2])
    pos = 4
    V = np.array(tokens[pos:pos + 3 * nv], dtype=float).reshape(nv, 3)
    pos += 3 * nv
    faces = []
    for _ in range(nf):
        k = int(tokens[pos])
        faces.append([int(t) for t in tokens[pos + 1:pos + 1 + k]])
        pos += 1 + k
    return V, faces
