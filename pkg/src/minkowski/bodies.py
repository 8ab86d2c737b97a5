"""Convex bodies given by membership, support-function and linear-maximisation oracles."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .core import DEFAULT_TOL, Functional, Tolerances, as_vector, make_rng
from .errors import DegenerateBodyError, DimensionError, NotOnBoundaryError
from .legendre import dual_norm, legendre, legendre_inverse
from .norms import Norm, norm_from_json

TIE_RTOL = 1e-12


class ConvexBody:
    """Compact convex set with non-empty interior."""

    kind = "abstract"

    def __init__(self, dim: int, tol: Tolerances = DEFAULT_TOL):
        self.dim = dim
        self.tol = tol

    def contains(self, x) -> bool:
        raise NotImplementedError

    def support(self, phi) -> float:
        raise NotImplementedError

    def argmax(self, phi) -> np.ndarray:
        raise NotImplementedError

    def interior_point(self) -> np.ndarray:
        raise NotImplementedError

    def sample(self, m: int, rng: np.random.Generator) -> np.ndarray:
        """``m`` points of the body (not uniformly distributed)."""
        raise NotImplementedError

    def boundary_residual(self, x) -> float | None:
        """Signed distance-like boundary indicator when cheaply available (polytopes)."""
        return None

    def on_boundary(self, x, eps: float | None = None) -> bool:
        """True when x is in the body but some eps-probe leaves it."""
        x = as_vector(x, self.dim)
        eps = 10 * self.tol.eq_tol if eps is None else eps
        r = self.boundary_residual(x)
        if r is not None:
            return abs(r) <= eps * (1.0 + np.max(np.abs(x)))
        if not self.contains(x):
            return False
        eye = np.eye(self.dim)
        probes = np.vstack([eye, -eye, make_rng(0).standard_normal((32, self.dim))])
        probes /= np.linalg.norm(probes, axis=1, keepdims=True)
        return any(not self.contains(x + eps * (1 + np.max(np.abs(x))) * r) for r in probes)

    def _check(self, x):
        return as_vector(x, self.dim)

    def _phi(self, phi) -> np.ndarray:
        c = phi.coeffs if isinstance(phi, Functional) else as_vector(phi)
        if c.size != self.dim:
            raise DimensionError("functional dimension does not match the body")
        return c


class Polytope(ConvexBody):
    """Convex hull of finitely many vertices."""

    kind = "polytope"

    def __init__(self, vertices, tol: Tolerances = DEFAULT_TOL):
        V = np.array(vertices, dtype=float)
        if V.ndim != 2:
            raise DegenerateBodyError("vertices must be a 2-D array (one vertex per row)")
        n = V.shape[1]
        super().__init__(n, tol)
        if not np.all(np.isfinite(V)):
            raise ValueError("vertex coordinates must be finite")
        if V.shape[0] < n + 1 or np.linalg.matrix_rank(V[1:] - V[0]) < n:
            raise DegenerateBodyError("need n+1 affinely independent vertices (full-dimensional hull)")
        V.setflags(write=False)
        self.vertices = V
        self._scale = 1.0 + np.max(np.abs(V))
        self._facets = self._compute_facets()
        self._extreme_pts = V[self._extreme]

    def _compute_facets(self):
        V = self.vertices
        if self.dim == 1:
            lo, hi = V.min(), V.max()
            A = np.array([[1.0], [-1.0]])
            h = np.array([hi, -lo])
            self._extreme = np.unique([int(np.argmax(V[:, 0])), int(np.argmin(V[:, 0]))])
        else:
            try:
                hull = ConvexHull(V)
            except QhullError as exc:
                raise DegenerateBodyError(f"convex hull failed: {exc}") from None
            self._extreme = np.sort(hull.vertices)
            A, h = hull.equations[:, :-1], -hull.equations[:, -1]
            # merge coplanar simplices of the triangulated hull
            key = np.round(np.column_stack([A, h]) / self._scale, 9)
            _, idx = np.unique(key, axis=0, return_index=True)
            idx = np.sort(idx)
            A, h = A[idx], h[idx]
        band = 1e-9 * self._scale
        members = [np.flatnonzero(np.abs(V @ a - b) <= band) for a, b in zip(A, h)]
        return A, h, members

    @property
    def facet_normals(self) -> np.ndarray:
        """Euclidean-unit outward facet normals (rows)."""
        return self._facets[0]

    @property
    def facet_offsets(self) -> np.ndarray:
        return self._facets[1]

    @property
    def extreme_points(self) -> np.ndarray:
        """The vertices that are extreme points of the hull (input order)."""
        return self._extreme_pts

    def facet_vertices(self, j: int) -> np.ndarray:
        return self.vertices[self._facets[2][j]]

    @property
    def n_facets(self) -> int:
        return len(self._facets[1])

    def boundary_residual(self, x) -> float:
        A, h, _ = self._facets
        return float(np.max(A @ x - h))

    def contains(self, x) -> bool:
        x = self._check(x)
        return self.boundary_residual(x) <= self.tol.eq_tol * (1.0 + np.max(np.abs(x)))

    def support(self, phi) -> float:
        return float(np.max(self.vertices @ self._phi(phi)))

    def argmax_extreme(self, phi) -> int:
        """Index into ``extreme_points`` of a maximiser of phi."""
        c = self._phi(phi)
        vals = self.extreme_points @ c
        top = vals.max()
        # lowest index among (numerical) ties, relative to the size of phi
        band = TIE_RTOL * self._scale * float(np.max(np.abs(c)))
        return int(np.flatnonzero(vals >= top - band)[0])

    def argmax_index(self, phi) -> int:
        """Index into ``vertices`` of a maximiser of phi (always an extreme point)."""
        return int(self._extreme[self.argmax_extreme(phi)])

    def argmax(self, phi) -> np.ndarray:
        return self.vertices[self.argmax_index(phi)]

    def interior_point(self):
        return self.vertices.mean(axis=0)

    def sample(self, m, rng):
        k = len(self.vertices)
        w = rng.dirichlet(np.full(k, 0.3), size=m)
        pts = w @ self.vertices
        pts[: min(m, k)] = self.vertices[: min(m, k)]
        return pts

    def to_json(self):
        return {"type": "polytope", "vertices": self.vertices.tolist()}


class NormBall(ConvexBody):
    """{x : ball_norm(x - center) <= radius}."""

    kind = "ball"

    def __init__(self, center, radius: float, norm: Norm, tol: Tolerances = DEFAULT_TOL):
        center = as_vector(center, norm.dim)
        super().__init__(norm.dim, tol)
        if not radius > 0:
            raise DegenerateBodyError("radius must be positive")
        self.center = center
        self.radius = float(radius)
        self.norm = norm

    def contains(self, x):
        x = self._check(x)
        return float(self.norm.evaluate(x - self.center)) <= self.radius + self.tol.eq_tol * (1 + np.max(np.abs(x)))

    def boundary_residual(self, x):
        return float(self.norm.evaluate(x - self.center)) - self.radius

    def support(self, phi):
        c = self._phi(phi)
        return float(c @ self.center) + self.radius * dual_norm(self.norm, c, self.tol)

    def argmax(self, phi):
        c = self._phi(phi)
        if not np.any(c):
            return self.center.copy()
        u = legendre_inverse(self.norm, c, self.tol)
        return self.center + self.radius * u / float(self.norm.evaluate(u))

    def interior_point(self):
        return self.center.copy()

    def sample(self, m, rng):
        dirs = rng.standard_normal((m, self.dim))
        dirs /= np.asarray(self.norm.evaluate(dirs)).reshape(-1, 1)
        r = self.radius * rng.uniform(0, 1, size=(m, 1)) ** (1.0 / self.dim)
        r[: min(m, 4)] = self.radius
        return self.center + r * dirs

    def to_json(self):
        return {"type": "ball", "center": self.center.tolist(), "radius": self.radius,
                "norm": self.norm.to_json()}


class ParallelBody(ConvexBody):
    """K + delta*B, the points within ``norm``-distance delta of ``base``."""

    kind = "parallel"

    def __init__(self, base: ConvexBody, delta: float, norm: Norm, tol: Tolerances = DEFAULT_TOL):
        if not delta > 0:
            raise DegenerateBodyError("delta must be positive")
        if norm.dim != base.dim:
            raise DimensionError("norm and base body dimensions differ")
        super().__init__(base.dim, tol)
        self.base = base
        self.delta = float(delta)
        self.norm = norm

    def contains(self, x):
        from .projection import distance

        x = self._check(x)
        return distance(self.norm, self.base, x, self.tol) <= self.delta + self.tol.eq_tol * (1 + np.max(np.abs(x)))

    def support(self, phi):
        c = self._phi(phi)
        return self.base.support(c) + self.delta * dual_norm(self.norm, c, self.tol)

    def argmax(self, phi):
        c = self._phi(phi)
        if not np.any(c):
            return self.base.argmax(c)
        u = legendre_inverse(self.norm, c, self.tol)
        return self.base.argmax(c) + self.delta * u / float(self.norm.evaluate(u))

    def interior_point(self):
        return self.base.interior_point()

    def sample(self, m, rng):
        pts = self.base.sample(m, rng)
        dirs = rng.standard_normal((m, self.dim))
        dirs /= np.asarray(self.norm.evaluate(dirs)).reshape(-1, 1)
        r = self.delta * rng.uniform(0, 1, size=(m, 1)) ** (1.0 / self.dim)
        return pts + r * dirs

    def to_json(self):
        return {"type": "parallel", "base": self.base.to_json(), "delta": self.delta,
                "norm": self.norm.to_json()}


def make_polytope(vertices, tol: Tolerances = DEFAULT_TOL) -> Polytope:
    return Polytope(vertices, tol)


def make_ball(center, radius: float, N: Norm, tol: Tolerances = DEFAULT_TOL) -> NormBall:
    return NormBall(center, radius, N, tol)


def parallel_body(K: ConvexBody, delta: float, N: Norm, tol: Tolerances = DEFAULT_TOL) -> ParallelBody:
    return ParallelBody(K, delta, N, tol)


@dataclass(frozen=True, eq=False)
class NormalCone:
    """Birkhoff normal cone NC(K, x) at a boundary point.

    Membership of v means L(v)(y - x) <= 0 for every y in K, i.e.
    support_K(L(v)) <= L(v)(x). ``generators`` are unit outer normals
    spanning the cone; None for bodies where they are not enumerated.
    """

    body: ConvexBody
    norm: Norm
    base_point: np.ndarray
    generators: np.ndarray | None
    functionals: np.ndarray | None
    tol: Tolerances = DEFAULT_TOL

    def margin(self, v) -> float:
        """Scaled max of L(v)(y - x) over y in K; <= 0 exactly for members."""
        v = as_vector(v, self.norm.dim)
        nv = float(self.norm.evaluate(v))
        if nv == 0:
            return 0.0
        phi = legendre(self.norm, v / nv, self.tol)
        return self.body.support(phi) - phi(self.base_point)

    def membership(self, v) -> bool:
        return self.margin(v) <= self.tol.eq_tol * (1 + np.max(np.abs(self.base_point)))

    __contains__ = membership


def normal_cone(K: ConvexBody, x, N: Norm, tol: Tolerances = DEFAULT_TOL) -> NormalCone:
    x = as_vector(x, K.dim)
    if not K.on_boundary(x):
        raise NotOnBoundaryError("normal cones are defined at boundary points only")
    gens = funcs = None
    if isinstance(K, Polytope):
        band = 10 * tol.eq_tol * (1 + np.max(np.abs(x)))
        active = np.flatnonzero(np.abs(K.facet_normals @ x - K.facet_offsets) <= band)
        funcs = K.facet_normals[active]
        gens = np.array([_unit(N, legendre_inverse(N, a, tol)) for a in funcs])
    elif isinstance(K, NormBall):
        funcs = K.norm.grad_array(x - K.center, tol).reshape(1, -1)
        gens = np.array([_unit(N, legendre_inverse(N, funcs[0], tol))])
    return NormalCone(K, N, x, gens, funcs, tol)


def _unit(N: Norm, v: np.ndarray) -> np.ndarray:
    return v / float(N.evaluate(v))


def body_from_json(obj, dim: int | None = None, tol: Tolerances = DEFAULT_TOL) -> ConvexBody:
    if "body" in obj and isinstance(obj["body"], dict):
        return body_from_json(obj["body"], dim, tol)
    kind = obj.get("type")
    if kind == "polytope":
        return Polytope(obj["vertices"], tol)
    if kind == "ball":
        center = as_vector(obj["center"])
        N = norm_from_json(obj.get("norm", "euclidean"), center.size)
        return NormBall(center, obj["radius"], N, tol)
    if kind == "parallel":
        base = body_from_json(obj["base"], dim, tol)
        N = norm_from_json(obj.get("norm", "euclidean"), base.dim)
        return ParallelBody(base, obj["delta"], N, tol)
    raise ValueError(f"unknown body type {kind!r}")
