"""Invariant verification suites.

Each check draws its cases from a seeded generator, evaluates one theorem
of the theory as a numerical invariant against an independent oracle, and
returns a :class:`VerifyReport` listing every case outside its tolerance
band. The suites named on the command line group these checks:

=============  ========================================================
legendre       Legendre transform properties, self-duality
birkhoff       algebraic vs variational Birkhoff orthogonality
projection     projection optimality, gradient of d_K, sun property,
               contraction and convexity of d_K
subdiff        max formula, boundary sub-differential of d_K, norm
               regularity, estimate chain
rockafellar    Rockafellar potentials and positive-cycle certificates
=============  ========================================================
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .birkhoff import birkhoff_vv
from .bodies import ConvexBody, Polytope, make_ball, make_polytope, normal_cone, parallel_body
from .core import DEFAULT_TOL, Tolerances, complement_basis, make_rng
from .errors import MonotonicityError
from .legendre import dual_norm, legendre, legendre_inverse
from .norms import EllipsoidalNorm, EuclideanNorm, Norm, WeightedPNorm
from .projection import project
from .subdifferential import (DistanceFunction, MaxAffine, MonotoneData, estimate_check,
                              norm_function, norm_gradient, rockafellar_potential,
                              subgradient_construct, subgradient_member)


@dataclass
class VerifyReport:
    suite: str
    cases_run: int = 0
    failures: list = field(default_factory=list)
    wall_time: float = 0.0
    # largest observed deviation per invariant, for reporting
    worst: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, invariant: str, deviation: float, band: float, inputs=None, observed=None):
        """Count one case; it fails when ``deviation`` exceeds ``band``."""
        self.cases_run += 1
        self.worst[invariant] = max(self.worst.get(invariant, -np.inf), float(deviation))
        if not deviation <= band:
            self.failures.append({"invariant": invariant, "inputs": _jsonable(inputs),
                                  "observed": _jsonable(observed if observed is not None else deviation),
                                  "expected": f"<= {band:g}"})

    def merge(self, other: "VerifyReport") -> "VerifyReport":
        self.cases_run += other.cases_run
        self.failures.extend(other.failures)
        self.wall_time += other.wall_time
        for k, v in other.worst.items():
            self.worst[k] = max(self.worst.get(k, -np.inf), v)
        return self

    def to_json(self) -> dict:
        return {"suite": self.suite, "cases_run": self.cases_run, "failures": self.failures,
                "wall_time": round(self.wall_time, 3),
                "worst": {k: float(v) for k, v in sorted(self.worst.items())}}


def _jsonable(obj):
    if obj is None:
        return None
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


@dataclass(frozen=True)
class VerifyConfig:
    """Case counts for the suites; the defaults are the acceptance counts."""

    seed: int = 0
    dims: tuple = (2, 3, 5)
    legendre_vectors: int = 1000
    duality_functionals: int = 200
    birkhoff_pairs: int = 1000
    projection_points: int = 10
    sample_points: int = 500
    gradient_points: int = 100
    sun_points: int = 100
    contraction_cases: int = 1000
    max_affine_instances: int = 20
    boundary_probes: int = 200
    monotone_sets: int = 50
    regularity_points: int = 500
    estimate_dirs: int = 64
    tol: Tolerances = DEFAULT_TOL

    def scaled(self, factor: float) -> "VerifyConfig":
        """Same suites with every case count multiplied by ``factor`` (at least 1)."""
        counts = {k: max(1, int(round(getattr(self, k) * factor)))
                  for k in ("legendre_vectors", "duality_functionals", "birkhoff_pairs",
                            "projection_points", "gradient_points", "sun_points",
                            "contraction_cases", "max_affine_instances", "boundary_probes",
                            "monotone_sets", "regularity_points")}
        return replace(self, **counts)


# -- test families ---------------------------------------------------------------

def norm_family(n: int) -> list[tuple[str, Norm]]:
    """The built-in test norms in dimension n: euclidean, p = 1.5, p = 4, ellipsoidal diag(1, 4, ...)."""
    return [("euclidean", EuclideanNorm(n)),
            ("p1.5", WeightedPNorm(1.5, dim=n)),
            ("p4", WeightedPNorm(4.0, dim=n)),
            ("ellipsoid", EllipsoidalNorm(np.diag(np.arange(1, n + 1, dtype=float) ** 2)))]


def cube(n: int) -> Polytope:
    return make_polytope(np.array(np.meshgrid(*[[-1.0, 1.0]] * n)).reshape(n, -1).T)


def cross_polytope(n: int) -> Polytope:
    return make_polytope(np.vstack([np.eye(n), -np.eye(n)]))


def simplex(n: int) -> Polytope:
    return make_polytope(np.vstack([np.zeros(n), np.eye(n)]))


def random_polytope(n: int, m: int, rng: np.random.Generator) -> Polytope:
    return make_polytope(rng.standard_normal((m, n)))


def body_family(N: Norm, rng: np.random.Generator) -> list[tuple[str, ConvexBody]]:
    """Test bodies in the dimension of N: polytopes, a p = 3 ball, a parallel body."""
    n = N.dim
    bodies = [("random-polytope", random_polytope(n, 2 * n + 3, rng)), ("cube", cube(n))]
    if n <= 3:
        bodies.append(("p3-ball", make_ball(0.5 * np.ones(n), 1.0, WeightedPNorm(3.0, dim=n))))
        bodies.append(("parallel-simplex", parallel_body(simplex(n), 0.5, N)))
    return bodies


def gradient_body(N: Norm, rng: np.random.Generator) -> tuple[str, ConvexBody]:
    """One test body per dimension for the derivative and sun checks.

    A random polygon in the plane, a parallel body (smooth faces and
    polytope corners) in dimension 3, a simplex above that.
    """
    n = N.dim
    if n == 2:
        return "random-polygon", random_polytope(2, 7, rng)
    if n == 3:
        return "parallel-simplex", parallel_body(simplex(3), 0.5, N)
    return "simplex", simplex(n)


def exterior_points(K: ConvexBody, m: int, rng: np.random.Generator,
                    reach: tuple = (0.05, 3.0)) -> np.ndarray:
    """Points strictly outside K: beyond the supporting hyperplane in a random direction."""
    c = K.interior_point()
    pts = []
    for _ in range(m):
        u = rng.standard_normal(K.dim)
        u /= np.linalg.norm(u)
        h = K.support(u) - u @ c
        pts.append(c + u * (h + rng.uniform(*reach)))
    return np.array(pts)


def _timed(fn: Callable) -> Callable:
    def wrapper(cfg: VerifyConfig = VerifyConfig()) -> VerifyReport:
        t0 = time.perf_counter()
        rep = fn(cfg)
        rep.wall_time = time.perf_counter() - t0
        return rep
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _rng(cfg: VerifyConfig, salt: int) -> np.random.Generator:
    return make_rng(cfg.seed * 1000 + salt)


def _random_vector(rng, n, lo=-3.0, hi=3.0):
    return rng.standard_normal(n) * 10 ** rng.uniform(lo, hi)


# -- 1, 2: Legendre transform -------------------------------------------------

@_timed
def check_legendre_properties(cfg: VerifyConfig) -> VerifyReport:
    """Homogeneity, norm preservation, L(x)x = ||x||^2 and L^{-1}(L(x)) = x."""
    rep = VerifyReport("legendre-properties")
    rng = _rng(cfg, 1)
    tol, band = cfg.tol, 1e-6
    for n in cfg.dims:
        for name, N in norm_family(n):
            for _ in range(cfg.legendre_vectors):
                x = _random_vector(rng, n)
                r = float(N.evaluate(x))
                Lx = legendre(N, x, tol)
                t = rng.uniform(-5, 5)
                inputs = {"norm": name, "x": x}
                hom = np.max(np.abs(legendre(N, t * x, tol).coeffs - t * Lx.coeffs)) / (abs(t) * r)
                rep.record("homogeneity", hom, band, inputs)
                rep.record("norm-preserving", abs(dual_norm(N, Lx, tol) - r) / r, band, inputs)
                rep.record("pairing", abs(Lx(x) - r * r) / (r * r), band, inputs)
                back = legendre_inverse(N, Lx, tol)
                rep.record("round-trip", float(N.evaluate(back - x)) / r, band, inputs)
    return rep


def _fd_gradient(f: Callable, c: np.ndarray, h: float) -> np.ndarray:
    """Central differences with one Richardson step (error O(h^4))."""
    g = np.empty(c.size)
    for i in range(c.size):
        e = np.zeros(c.size)
        e[i] = h
        d1 = (f(c + e) - f(c - e)) / (2 * h)
        d2 = (f(c + 0.5 * e) - f(c - 0.5 * e)) / h
        g[i] = (4 * d2 - d1) / 3
    return g


@_timed
def check_self_duality(cfg: VerifyConfig) -> VerifyReport:
    """L*(phi), the Legendre transform of the dual norm taken by finite
    differences of ||.||_*, equals J(L^{-1}(phi))."""
    rep = VerifyReport("self-duality")
    rng = _rng(cfg, 2)
    tol = cfg.tol
    for n in cfg.dims:
        for name, N in norm_family(n):
            for _ in range(cfg.duality_functionals):
                c = rng.standard_normal(n)
                dn = dual_norm(N, c, tol)
                h = 1e-6 * float(np.max(np.abs(c)))
                lstar = dn * _fd_gradient(lambda z: dual_norm(N, z, tol), c, h)
                linv = legendre_inverse(N, c, tol)
                dev = float(N.evaluate(lstar - linv)) / dn
                rep.record("L* = J o L^-1", dev, 1e-5, {"norm": name, "phi": c})
    return rep


# -- 3: Birkhoff ----------------------------------------------------------------

@_timed
def check_birkhoff(cfg: VerifyConfig) -> VerifyReport:
    """Algebraic test L(x)y = 0 against golden-section minimisation of ||x + ty||.

    Cases: exactly orthogonal pairs, orthogonal pairs perturbed along x by
    10^[-9, -2], and random pairs. A disagreement is the algebraic test
    holding while the line search finds a relative decrease above 1e-7, or
    a residual above 1e-7 with no decrease found at all. Residuals in
    (eq_tol, 1e-7] form the ambiguity band and are skipped.
    """
    rep = VerifyReport("birkhoff")
    rng = _rng(cfg, 3)
    tol, band = cfg.tol, 1e-7
    families = {n: norm_family(n) for n in cfg.dims}
    for j, name in enumerate(name for name, _ in norm_family(2)):
        # birkhoff_pairs per norm type, cycling through the dimensions
        for k in range(cfg.birkhoff_pairs):
            n = cfg.dims[k % len(cfg.dims)]
            N = families[n][j][1]
            x = rng.standard_normal(n)
            mode = (k // len(cfg.dims)) % 3
            if mode == 2:
                y = rng.standard_normal(n)
            else:
                B = complement_basis(legendre(N, x, tol).coeffs)
                y = rng.standard_normal(B.shape[0]) @ B
                if mode == 1:
                    y = y + 10 ** rng.uniform(-9, -2) * x
            report = birkhoff_vv(N, x, y, tol)
            if tol.eq_tol < report.residual <= band:
                continue
            # the variational side: golden-section minimum of ||x + ty||
            gap = report.line_search_gap
            rel_gap = gap / float(N.evaluate(x))
            if report.holds:
                dev = rel_gap
            else:
                # a decrease must exist; deviation 1 when none is found
                dev = 0.0 if gap > 0 else 1.0
            rep.record("algebraic vs variational", dev, band,
                       {"norm": name, "x": x, "y": y},
                       {"residual": report.residual, "gap": gap})
    return rep


# -- 4-7: projection and the distance function ---------------------------------

def _projection_cases(cfg: VerifyConfig, salt: int, family: Callable = body_family):
    rng = _rng(cfg, salt)
    for n in cfg.dims:
        for name, N in norm_family(n):
            bodies = family(N, rng)
            for bname, K in ([bodies] if isinstance(bodies, tuple) else bodies):
                yield n, name, N, bname, K, rng


def _boundary_grid(P: Polytope, spacing: float = 1e-3) -> np.ndarray:
    """Boundary points of a polygon at the given spacing along every edge."""
    pts = []
    for j in range(P.n_facets):
        a, b = P.facet_vertices(j)[:2]
        m = int(np.ceil(np.linalg.norm(b - a) / spacing)) + 1
        t = np.linspace(0.0, 1.0, m).reshape(-1, 1)
        pts.append(a + t * (b - a))
    return np.vstack(pts)


@_timed
def check_projection_optimality(cfg: VerifyConfig) -> VerifyReport:
    """Gap certificate, 500-point body samples and (2-D polytopes) a boundary grid oracle."""
    rep = VerifyReport("projection-optimality")
    tol = cfg.tol
    for n, name, N, bname, K, rng in _projection_cases(cfg, 4):
        grid = _boundary_grid(K) if isinstance(K, Polytope) and n == 2 else None
        for x in exterior_points(K, cfg.projection_points, rng):
            res = project(N, K, x, tol)
            inputs = {"norm": name, "body": bname, "x": x}
            rep.record("certified gap", res.gap if res.certified else np.inf, 1e-7, inputs)
            S = K.sample(cfg.sample_points, rng)
            best = float(np.min(N.evaluate(x - S)))
            rep.record("beats body samples", res.distance - best, 1e-6, inputs)
            if grid is not None:
                d_grid = float(np.min(N.evaluate(x - grid)))
                rep.record("grid oracle", abs(res.distance - d_grid), 2e-3, inputs)
    return rep


@_timed
def check_distance_gradient(cfg: VerifyConfig) -> VerifyReport:
    """Central differences of d_K on basis directions against L(eta_K(x))."""
    rep = VerifyReport("distance-gradient")
    tol = cfg.tol
    for n, name, N, bname, K, rng in _projection_cases(cfg, 5, gradient_body):
        for x in exterior_points(K, cfg.gradient_points, rng):
            res = project(N, K, x, tol)
            expected = legendre(N, res.outer_normal, tol).coeffs
            # d_K is smooth off K: step 1e-5 leaves truncation error near 1e-10,
            # so the shifted projections need only a 1e-10 relative gap and
            # can start from the weights found at x
            h = 1e-5 * (1.0 + float(np.max(np.abs(x))))
            fd = np.empty(n)
            for i in range(n):
                e = np.zeros(n)
                e[i] = h
                up = project(N, K, x + e, tol, rtol=1e-10, warm=res.weights).distance
                down = project(N, K, x - e, tol, rtol=1e-10, warm=res.weights).distance
                fd[i] = (up - down) / (2 * h)
            rep.record("grad d_K = L(eta)", float(np.max(np.abs(fd - expected))), 1e-4,
                       {"norm": name, "body": bname, "x": x}, fd)
    return rep


@_timed
def check_sun_property(cfg: VerifyConfig) -> VerifyReport:
    """p_K(p_K(x) + t eta_K(x)) = p_K(x) for t in {0.5, 2, 10}."""
    rep = VerifyReport("sun-property")
    tol = cfg.tol
    for n, name, N, bname, K, rng in _projection_cases(cfg, 6, gradient_body):
        for x in exterior_points(K, cfg.sun_points, rng):
            res = project(N, K, x, tol)
            for t in (0.5, 2.0, 10.0):
                again = project(N, K, res.point + t * res.outer_normal, tol)
                dev = float(N.evaluate(again.point - res.point))
                rep.record("sun", dev, 1e-6, {"norm": name, "body": bname, "x": x, "t": t})
    return rep


@_timed
def check_contraction_convexity(cfg: VerifyConfig) -> VerifyReport:
    """|d_K(x) - d_K(y)| <= ||x - y|| and convexity of d_K along random segments."""
    rep = VerifyReport("contraction-convexity")
    tol = cfg.tol
    cases = list(_projection_cases(cfg, 7, gradient_body))
    per_case = max(1, -(-cfg.contraction_cases // len(cases)))
    for n, name, N, bname, K, rng in cases:
        c = K.interior_point()
        spread = 2.0 * (1.0 + float(np.max(np.abs(K.sample(8, rng) - c))))
        d = lambda z: project(N, K, z, tol).distance  # noqa: E731
        for _ in range(per_case):
            x, y, z = c + spread * rng.uniform(-1, 1, size=(3, n))
            inputs = {"norm": name, "body": bname, "x": x, "y": y}
            dx, dy = d(x), d(y)
            rep.record("weak contraction", abs(dx - dy) - float(N.evaluate(x - y)), 1e-7, inputs)
            lam = rng.uniform()
            dz = d(z)
            mid = d(lam * x + (1 - lam) * z)
            rep.record("convexity", mid - lam * dx - (1 - lam) * dz, 1e-7, inputs)
    return rep


# -- 8, 9, 11, 12: sub-differentials ---------------------------------------------

def random_max_affine(n: int, rng: np.random.Generator, kinks: int = 0,
                      x: np.ndarray | None = None) -> tuple[MaxAffine, np.ndarray]:
    """Random max-affine function with 2..8 pieces and a point x.

    With ``kinks`` >= 2, that many pieces are made exactly active at x.
    """
    k = int(rng.integers(max(2, kinks), 9))
    phi = rng.standard_normal((k, n))
    b = rng.standard_normal(k)
    x = rng.standard_normal(n) if x is None else x
    if kinks >= 2:
        top = float(np.max(phi @ x + b)) + 1.0
        idx = rng.choice(k, size=kinks, replace=False)
        b[idx] = top - phi[idx] @ x
    return MaxAffine(list(zip(phi, b))), x


def _fplus_independent(f: MaxAffine, x: np.ndarray, u: np.ndarray) -> float:
    """max of phi_i(u) over the pieces attaining the max at x (recomputed here)."""
    vals = np.array([p @ x + b for p, b in zip(f.phi, f.b)])
    top = vals.max()
    act = vals >= top - 1e-9 * (1 + abs(top))
    return float(max(p @ u for p, a in zip(f.phi, act) if a))


@_timed
def check_max_formula(cfg: VerifyConfig) -> VerifyReport:
    """subgradient_construct: L(w)u = f'_+(x, u), w certified; smooth points match norm_gradient."""
    rep = VerifyReport("max-formula")
    rng = _rng(cfg, 8)
    tol = cfg.tol
    for n in cfg.dims:
        for name, N in norm_family(n):
            for k in range(cfg.max_affine_instances):
                kinks = int(rng.integers(2, 5)) if k % 2 == 0 else 0
                f, x = random_max_affine(n, rng, kinks=min(kinks, n + 1))
                u = rng.standard_normal(n)
                u /= float(N.evaluate(u))
                inputs = {"norm": name, "f": f.to_json(), "x": x, "u": u}
                w = subgradient_construct(f, x, u, N, tol)
                dev = abs(legendre(N, w, tol)(u) - _fplus_independent(f, x, u))
                rep.record("L(w)u = f'+(x,u)", dev, 1e-8, inputs)
                cert = subgradient_member(f, x, w, N, tol=tol)
                rep.record("membership", 0.0 if cert.member else 1.0, 0.0, inputs, cert.to_json())
                if len(f.active(x)) == 1:
                    g = norm_gradient(f, x, N, tol)
                    rep.record("w = norm_gradient", float(np.max(np.abs(g - w))), 1e-6, inputs)
    return rep


def boundary_points(P: Polytope) -> list[np.ndarray]:
    """Vertices and facet centroids of a polytope."""
    pts = [v for v in P.extreme_points]
    pts.extend(P.facet_vertices(j).mean(axis=0) for j in range(P.n_facets))
    return pts


def boundary_cases(cfg: VerifyConfig) -> list[tuple[str, Norm, str, Polytope]]:
    """Test polytopes for the boundary sub-differential, each with one test norm.

    Every built-in norm type appears once; polytope dimensions are 2 and 3.
    """
    rng = _rng(cfg, 90)
    fam2, fam3 = dict(norm_family(2)), dict(norm_family(3))
    return [("p1.5", fam2["p1.5"], "square", cube(2)),
            ("ellipsoid", fam2["ellipsoid"], "random-polygon", random_polytope(2, 6, rng)),
            ("p4", fam2["p4"], "triangle", simplex(2)),
            ("euclidean", fam3["euclidean"], "tetrahedron", simplex(3))]


@_timed
def check_boundary_subdifferential(cfg: VerifyConfig) -> VerifyReport:
    """subgradient_member on d_K against normal-cone membership at boundary points.

    The sub-differential of d_K at a boundary point is NC(K, x) within the
    unit ball, so the probe v is classified through v / (2||v||). The
    normal-cone margin is never negative; probes with a margin in
    (eq_tol, 1e-6] are ambiguous and skipped.
    """
    rep = VerifyReport("boundary-subdifferential")
    rng = _rng(cfg, 9)
    tol = cfg.tol
    for name, N, bname, P in boundary_cases(cfg):
        f = DistanceFunction(P, N, tol)
        n = N.dim
        for x in boundary_points(P):
            nc = normal_cone(P, x, N, tol)
            for k in range(cfg.boundary_probes):
                if k % 3 == 0:
                    v = rng.exponential(size=len(nc.generators)) @ nc.generators
                elif k % 3 == 1:
                    g = nc.generators[rng.integers(len(nc.generators))]
                    v = g + 10 ** rng.uniform(-4, 0) * rng.standard_normal(n)
                else:
                    v = rng.standard_normal(n)
                m = nc.margin(v)
                if tol.eq_tol < m <= 1e-6:
                    continue
                in_cone = m <= tol.eq_tol
                cert = subgradient_member(f, x, 0.5 * v / float(N.evaluate(v)), N, tol=tol)
                rep.record("d_K membership = NC membership", float(cert.member != in_cone), 0.0,
                           {"norm": name, "body": bname, "x": x, "v": v},
                           {"margin": m, "certificate": cert.verdict})
    return rep


@_timed
def check_norm_regularity(cfg: VerifyConfig) -> VerifyReport:
    """norm_gradient of rho equals x / rho(x)."""
    rep = VerifyReport("norm-regularity")
    rng = _rng(cfg, 11)
    tol = cfg.tol
    for n in cfg.dims:
        for name, N in norm_family(n):
            f = norm_function(N)
            for _ in range(cfg.regularity_points):
                x = rng.standard_normal(n) * 10 ** rng.uniform(-1, 1)
                g = norm_gradient(f, x, N, tol)
                dev = float(np.max(np.abs(g - x / float(N.evaluate(x)))))
                rep.record("grad rho = x / rho", dev, 1e-6, {"norm": name, "x": x})
    return rep


@_timed
def check_estimate_chain(cfg: VerifyConfig) -> VerifyReport:
    """sup f'_-(x, v+z) <= ||v||^2 <= inf f'_+(x, v+z) over z in ker L(v).

    Sub-gradients: constructed ones of max-affine functions, norm gradients
    of rho, and certified members of the sub-differential of d_K at
    polytope vertices.
    """
    rep = VerifyReport("estimate-chain")
    rng = _rng(cfg, 12)
    tol = cfg.tol
    m = cfg.estimate_dirs
    count = max(1, cfg.max_affine_instances // 2)

    def run(f, x, v, N, label):
        cert = subgradient_member(f, x, v, N, tol=tol)
        if not cert.member:
            return
        lo, mid, hi, _ = estimate_check(f, x, v, N, m=m, tol=tol, seed=int(rng.integers(1 << 30)))
        slack = min(mid - lo, hi - mid)
        rep.record("estimate chain", -slack, 1e-6, {"norm": label[0], "kind": label[1], "x": x, "v": v},
                   {"sup_minus": lo, "norm_sq": mid, "inf_plus": hi})

    for n in cfg.dims:
        for name, N in norm_family(n):
            for k in range(count):
                f, x = random_max_affine(n, rng, kinks=min(2 + k % 3, n + 1))
                u = rng.standard_normal(n)
                w = subgradient_construct(f, x, u, N, tol)
                run(f, x, w, N, (name, "max-affine"))
                x = rng.standard_normal(n)
                run(norm_function(N), x, x / float(N.evaluate(x)), N, (name, "norm"))
    for name, N, bname, P in boundary_cases(cfg):
        f = DistanceFunction(P, N, tol)
        for x in P.extreme_points[:2]:
            nc = normal_cone(P, x, N, tol)
            v = rng.exponential(size=len(nc.generators)) @ nc.generators
            run(f, x, 0.5 * v / float(N.evaluate(v)), N, (name, bname))
    return rep


# -- 10: Rockafellar ----------------------------------------------------------------

def monotone_set(N: Norm, rng: np.random.Generator, size: int) -> MonotoneData:
    """Gradient pairs (x_i, L^{-1}(df_{x_i})) of a random convex function.

    The function is 1/2 |Ax|^2 + c.x (strictly convex) or a random
    max-affine function, chosen at random.
    """
    n = N.dim
    X = rng.standard_normal((size, n)) * 2
    if rng.uniform() < 0.6:
        A = rng.standard_normal((n, n)) + 0.5 * np.eye(n)
        c = rng.standard_normal(n)
        grads = X @ A.T @ A + c
    else:
        f, _ = random_max_affine(n, rng)
        grads = np.array([f.phi[f.active(x)[0]] for x in X])
    pairs = [(x, legendre_inverse(N, g)) for x, g in zip(X, grads)]
    return MonotoneData(pairs, base_index=int(rng.integers(size)))


def swap_perturb(S: MonotoneData, N: Norm, rng: np.random.Generator) -> MonotoneData | None:
    """Swap the w's of two pairs whose 2-cycle then has positive weight."""
    X = [x for x, _ in S.pairs]
    W = [w for _, w in S.pairs]
    L = [legendre(N, w).coeffs for w in W]
    order = rng.permutation(len(X))
    for a in order:
        for b in order:
            if a != b and (L[b] - L[a]) @ (X[b] - X[a]) > 1e-6:
                W[a], W[b] = W[b], W[a]
                return MonotoneData(list(zip(X, W)), S.base_index)
    return None


def hand_cycle_weight(S: MonotoneData, N: Norm, cycle: list[int]) -> float:
    """Recompute sum L(w_i)(x_next - x_i) around the cycle from scratch."""
    total = 0.0
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        xa, wa = S.pairs[a]
        xb, _ = S.pairs[b]
        r = float(N.evaluate(wa))
        if r > 0:
            total += r * float(N.grad_array(wa) @ (xb - xa))
    return total


@_timed
def check_rockafellar(cfg: VerifyConfig) -> VerifyReport:
    """Potentials of monotone data; rejection of swap-perturbed data with a positive cycle."""
    rep = VerifyReport("rockafellar")
    rng = _rng(cfg, 10)
    tol = cfg.tol
    made = 0
    while made < cfg.monotone_sets:
        n = cfg.dims[made % len(cfg.dims)]
        name, N = norm_family(n)[made % 4]
        S = monotone_set(N, rng, int(rng.integers(2, 13)))
        made += 1
        inputs = {"norm": name, "S": S.to_json()}
        f = rockafellar_potential(S, N, tol)
        xb = S.pairs[S.base_index][0]
        rep.record("f(x_base) = 0", abs(f(xb)), 1e-9, inputs)
        bad = [i for i, (x, w) in enumerate(S.pairs) if not subgradient_member(f, x, w, N, tol=tol).member]
        rep.record("S in subdifferential", float(len(bad)), 0.0, inputs, bad)

        T = swap_perturb(S, N, rng)
        if T is None:
            continue
        inputs = {"norm": name, "S": T.to_json()}
        try:
            rockafellar_potential(T, N, tol)
        except MonotonicityError as exc:
            weight = hand_cycle_weight(T, N, list(exc.cycle))
            rep.record("rejected with positive cycle", -weight, -1e-12, inputs,
                       {"cycle": exc.cycle, "weight": weight})
        else:
            rep.record("rejected with positive cycle", np.inf, -1e-12, inputs, "accepted")
    return rep


# -- suites ---------------------------------------------------------------------------

CRITERIA = {
    1: check_legendre_properties,
    2: check_self_duality,
    3: check_birkhoff,
    4: check_projection_optimality,
    5: check_distance_gradient,
    6: check_sun_property,
    7: check_contraction_convexity,
    8: check_max_formula,
    9: check_boundary_subdifferential,
    10: check_rockafellar,
    11: check_norm_regularity,
    12: check_estimate_chain,
}

SUITES = {
    "legendre": (1, 2),
    "birkhoff": (3,),
    "projection": (4, 5, 6, 7),
    "subdiff": (8, 9, 11, 12),
    "rockafellar": (10,),
}
SUITES["all"] = tuple(sorted(CRITERIA))


def run_suite(name: str, cfg: VerifyConfig = VerifyConfig()) -> tuple[VerifyReport, list[VerifyReport]]:
    """Run a named suite; returns the combined report and the per-criterion reports."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    parts = [CRITERIA[k](cfg) for k in SUITES[name]]
    total = VerifyReport(name)
    for p in parts:
        total.merge(p)
    return total, parts


__all__ = ["VerifyReport", "VerifyConfig", "CRITERIA", "SUITES", "run_suite", "norm_family",
           "body_family", "exterior_points", "random_max_affine", "monotone_set", "swap_perturb",
           "hand_cycle_weight", "boundary_points", "cube", "cross_polytope", "simplex",
           "random_polytope"]
