"""Norm gradients and norm sub-differentials of convex functions.

A vector v is a norm sub-gradient of f at x when

    f(y) - f(x) >= L(v)(y - x)   for all y,

equivalently f'_+(x, u) >= L(v)u for every direction u. Three kinds of
convex function are supported: max-affine functions (where every operation
is exact), distance functions d_K of convex bodies, and smooth callbacks.
The last two use one-sided finite differences for directional derivatives.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog

from .bodies import ConvexBody, Polytope, body_from_json
from .core import DEFAULT_TOL, Functional, Tolerances, as_vector, complement_basis, make_rng, vector_to_json
from .errors import ConvergenceError, MonotonicityError, NotDifferentiableError
from .legendre import legendre, legendre_inverse
from .norms import Norm, norm_from_json, sphere_sample

EPS = np.finfo(float).eps
TOL_CONSTRUCT = 1e-4
NESTED_STEP = 1e-3
CACHE_LIMIT = 200_000


class ConvexFunction:
    """A finite convex function on R^n with a one-sided derivative oracle."""

    kind = "abstract"
    exact = False

    def __init__(self, dim: int, tol: Tolerances = DEFAULT_TOL):
        self.dim = int(dim)
        self.tol = tol
        self._cache: dict = {}

    def evaluate(self, x) -> float:
        raise NotImplementedError

    def __call__(self, x) -> float:
        return self.evaluate(x)

    def dir_deriv_plus(self, x, v) -> float:
        """f'_+(x, v) = lim_{t -> 0+} (f(x + tv) - f(x)) / t."""
        return self._dir_deriv_cached(as_vector(x, self.dim), as_vector(v, self.dim))

    def _dir_deriv_cached(self, x: np.ndarray, v: np.ndarray, xkey: bytes | None = None) -> float:
        # x and v already validated; ``xkey`` is x.tobytes() when the caller has it
        if not v.any():
            return 0.0
        key = (x.tobytes() if xkey is None else xkey, v.tobytes())
        hit = self._cache.get(key)
        if hit is None:
            hit = self._dir_deriv(x, v)
            if len(self._cache) >= CACHE_LIMIT:
                self._cache.clear()
            self._cache[key] = hit
        return hit

    def dir_deriv_minus(self, x, v) -> float:
        return -self.dir_deriv_plus(x, -as_vector(v, self.dim))

    def probe_directions(self, x) -> list[np.ndarray]:
        """Directions where the sub-gradient inequality is most likely tight."""
        return []

    def _dir_deriv(self, x, v) -> float:
        return one_sided_derivative(self.evaluate, x, v, self.tol)

    def to_json(self) -> dict:
        raise NotImplementedError


def one_sided_derivative(f: Callable, x: np.ndarray, v: np.ndarray,
                         tol: Tolerances = DEFAULT_TOL, levels: int = 4) -> float:
    """Forward differences on steps fd_step * 2^-j, extrapolated to zero step.

    The quotients are combined by a Neville-Richardson table, which removes
    the O(h), O(h^2), ... error terms of a smooth one-sided expansion. For a
    convex f the quotients decrease with the step towards f'_+; when they do
    not (rounding noise, or a kink inside the ladder) the smallest quotient
    is returned instead, and the extrapolated value is never allowed above
    it.
    """
    s = float(np.max(np.abs(v)))
    u = v / s
    h0 = tol.fd_step * (1.0 + float(np.max(np.abs(x))))
    f0 = f(x)
    steps = h0 * 2.0 ** -np.arange(levels)
    fx = [f(x + h * u) for h in steps]
    D = [(fh - f0) / h for fh, h in zip(fx, steps)]
    noise = 8 * EPS * (abs(f0) + max(abs(fh) for fh in fx)) / steps[-1]
    if any(D[j + 1] > D[j] + noise for j in range(levels - 1)):
        return float(min(D)) * s
    T = []
    for j in range(levels):
        row = [D[j]]
        for k in range(1, j + 1):
            row.append(row[k - 1] + (row[k - 1] - T[j - 1][k - 1]) / (2 ** k - 1))
        T.append(row)
    lo = D[-1] - (D[0] - D[-1]) - noise
    return float(np.clip(T[-1][-1], lo, D[-1] + noise)) * s


class MaxAffine(ConvexFunction):
    """f(x) = max_i phi_i(x) + b_i."""

    kind = "max_affine"
    exact = True

    def __init__(self, pieces: Sequence, tol: Tolerances = DEFAULT_TOL):
        pieces = list(pieces)
        if not pieces:
            raise ValueError("a max-affine function needs at least one piece")
        phis = [p.coeffs if isinstance(p, Functional) else as_vector(p) for p, _ in pieces]
        super().__init__(len(phis[0]), tol)
        self.phi = np.array([as_vector(p, self.dim) for p in phis])
        self.b = np.array([float(b) for _, b in pieces])
        if not np.all(np.isfinite(self.b)):
            raise ValueError("offsets must be finite")

    @property
    def pieces(self) -> list[tuple[Functional, float]]:
        return [(Functional(p), float(b)) for p, b in zip(self.phi, self.b)]

    def evaluate(self, x) -> float:
        x = as_vector(x, self.dim)
        return float(np.max(self.phi @ x + self.b))

    def active(self, x) -> np.ndarray:
        """Indices of the pieces within eq_tol of the maximum at x."""
        vals = self.phi @ as_vector(x, self.dim) + self.b
        top = np.max(vals)
        return np.flatnonzero(vals >= top - self.tol.eq_tol * (1 + abs(top)))

    def _dir_deriv(self, x, v) -> float:
        return float(np.max(self.phi[self.active(x)] @ v))

    def to_json(self) -> dict:
        return {"type": "max_affine",
                "pieces": [{"phi": vector_to_json(p), "b": float(b)} for p, b in zip(self.phi, self.b)]}


class DistanceFunction(ConvexFunction):
    """d_K(x), the distance from x to the body K in the norm N."""

    kind = "distance"
    # the projection's relative gap target; the distance error is at most
    # about RTOL/2 times the distance, ample for difference quotients
    RTOL = 1e-10
    CONE_STEP = 1e-3

    def __init__(self, K: ConvexBody, N: Norm, tol: Tolerances = DEFAULT_TOL):
        if K.dim != N.dim:
            raise ValueError("body and norm dimensions differ")
        super().__init__(N.dim, tol)
        self.body = K
        self.norm = N

    def evaluate(self, x) -> float:
        return self._project(x).distance

    def _project(self, x, warm=None):
        from .projection import project
        return project(self.norm, self.body, as_vector(x, self.dim), self.tol,
                       rtol=self.RTOL, exact=True, warm=warm)

    def _dir_deriv(self, x, v) -> float:
        if isinstance(self.body, Polytope) and self.evaluate(x) == 0.0:
            # near a point of a polytope, K coincides with x + (tangent cone),
            # so d_K(x + h v) = h d_T(v) is exactly linear in small h; two
            # agreeing quotients replace the extrapolation ladder. The step only
            # has to stay inside the region where K is its tangent cone, and a
            # longer one keeps the projection gap well above rounding level.
            s = float(np.max(np.abs(v)))
            u = v / s
            h = self.CONE_STEP * (1.0 + float(np.max(np.abs(x))))
            p1 = self._project(x + h * u)
            f1 = p1.distance
            f2 = self._project(x + 0.5 * h * u, warm=p1.weights).distance
            d1, d2 = f1 / h, f2 / (0.5 * h)
            noise = 8 * EPS * (f1 + f2 + float(np.max(np.abs(x)))) / h
            if abs(d1 - d2) <= noise + 1e-9 * abs(d1):
                return d2 * s
        return super()._dir_deriv(x, v)

    def probe_directions(self, x) -> list[np.ndarray]:
        # the tangent cone of a polytope is generated by the directions to its vertices
        if isinstance(self.body, Polytope):
            D = self.body.vertices - as_vector(x, self.dim)
            return [d for d in D if np.any(np.abs(d) > 1e-12)]
        return []

    def to_json(self) -> dict:
        return {"type": "distance", "body": self.body.to_json(), "norm": self.norm.to_json()}


class SmoothFunction(ConvexFunction):
    """A convex function given by callbacks.

    ``derivative(x)`` returns the coefficients of df_x; without it the
    directional derivatives are taken by finite differences.
    """

    kind = "smooth"

    def __init__(self, dim: int, evaluate: Callable, derivative: Callable | None = None,
                 name: str = "smooth", tol: Tolerances = DEFAULT_TOL):
        super().__init__(dim, tol)
        self._f = evaluate
        self._df = derivative
        self.name = name

    def evaluate(self, x) -> float:
        return float(self._f(as_vector(x, self.dim)))

    def _dir_deriv(self, x, v) -> float:
        if self._df is None:
            return super()._dir_deriv(x, v)
        return float(np.asarray(self._df(x), dtype=float) @ v)

    def to_json(self) -> dict:
        return {"type": "smooth", "name": self.name}


def norm_function(N: Norm, analytic: bool = True) -> SmoothFunction:
    """rho itself as a convex function (derivative from the norm if analytic)."""
    df = (lambda x: N.grad_array(x)) if analytic else None
    return SmoothFunction(N.dim, lambda x: float(N.evaluate(x)), df, name="norm")


def half_square(N: Norm, analytic: bool = True) -> SmoothFunction:
    """1/2 rho^2, whose differential at x is L(x)."""
    df = (lambda x: legendre(N, x).coeffs) if analytic else None
    return SmoothFunction(N.dim, lambda x: 0.5 * float(N.evaluate(x)) ** 2, df, name="half_square")


def function_from_json(obj, N: Norm | None = None, tol: Tolerances = DEFAULT_TOL) -> ConvexFunction:
    """Parse {"type": "max_affine", "pieces": [...]} or {"type": "distance", "body": ...}."""
    if "f" in obj and isinstance(obj["f"], dict):
        return function_from_json(obj["f"], N, tol)
    kind = obj.get("type")
    if kind == "max_affine":
        return MaxAffine([(p["phi"], p.get("b", 0.0)) for p in obj["pieces"]], tol)
    if kind == "distance":
        K = body_from_json(obj["body"], tol=tol)
        if "norm" in obj:
            N = norm_from_json(obj["norm"], K.dim)
        if N is None:
            raise ValueError("distance function needs a norm")
        return DistanceFunction(K, N, tol)
    if kind == "norm":
        if N is None:
            raise ValueError("norm function needs a norm")
        return norm_function(N)
    raise ValueError(f"unknown function type {kind!r}")


# -- gradients and sub-gradients ---------------------------------------------

def norm_gradient(f: ConvexFunction, x, N: Norm, tol: Tolerances | None = None) -> np.ndarray:
    """The norm gradient L^{-1}(df_x); zero when df_x = 0.

    Raises NotDifferentiableError when f'_+(x, .) is not linear on the basis.
    """
    tol = tol or f.tol
    x = as_vector(x, f.dim)
    I = np.eye(f.dim)
    plus = np.array([f.dir_deriv_plus(x, e) for e in I])
    minus = np.array([f.dir_deriv_plus(x, -e) for e in I])
    bad = np.flatnonzero(np.abs(plus + minus) > 10 * tol.eq_tol)
    if bad.size:
        raise NotDifferentiableError(
            f"f is not differentiable at x (basis direction {int(bad[0])}); "
            "use subgradient_member or subgradient_construct")
    return legendre_inverse(N, Functional(plus), tol)


@dataclass(frozen=True)
class SubgradientCertificate:
    point: np.ndarray
    candidate: np.ndarray
    verdict: str
    worst_direction: np.ndarray
    margin: float
    directions_tested: int = 0

    @property
    def member(self) -> bool:
        return self.verdict == "member"

    def to_json(self) -> dict:
        return {"point": vector_to_json(self.point), "candidate": vector_to_json(self.candidate),
                "verdict": self.verdict, "worst_direction": vector_to_json(self.worst_direction),
                "margin": self.margin, "directions_tested": self.directions_tested}


def _hull_test(phi: np.ndarray, c: np.ndarray) -> tuple[float, np.ndarray]:
    """min over u in [-1, 1]^n of max_i phi_i(u) - c(u), with its minimiser.

    The value is 0 exactly when c lies in the convex hull of the rows of
    phi and negative otherwise (dual form of the hull feasibility problem).
    """
    m, n = phi.shape
    # variables (u, t): minimise t - c.u subject to phi_i.u <= t
    obj = np.concatenate([-c, [1.0]])
    A = np.hstack([phi, -np.ones((m, 1))])
    bounds = [(-1.0, 1.0)] * n + [(None, None)]
    res = linprog(obj, A_ub=A, b_ub=np.zeros(m), bounds=bounds, method="highs")
    if res.status != 0:
        raise ConvergenceError(f"hull test failed: {res.message}")
    return float(res.fun), np.asarray(res.x[:n])


def subgradient_member(f: ConvexFunction, x, v, N: Norm, m_dirs: int = 64,
                       tol: Tolerances | None = None, seed: int = 0) -> SubgradientCertificate:
    """Test f'_+(x, u) >= L(v)u over a direction sample.

    Directions are a sphere sample of size ``m_dirs``, the +-basis, v/||v||
    and any directions suggested by the function. Max-affine functions are
    decided exactly by a hull test on the active pieces.
    """
    tol = tol or f.tol
    x = as_vector(x, f.dim)
    v = as_vector(v, f.dim)
    Lv = legendre(N, v, tol).coeffs
    dirs = list(sphere_sample(N, m_dirs, seed).points) if m_dirs > 0 else []
    I = np.eye(f.dim)
    dirs.extend(I)
    dirs.extend(-I)
    nv = float(N.evaluate(v))
    if nv > 0:
        dirs.append(v / nv)
    dirs.extend(f.probe_directions(x))

    exact_verdict = None
    if isinstance(f, MaxAffine):
        value, u = _hull_test(f.phi[f.active(x)], Lv)
        scale = 1.0 + float(np.max(np.abs(Lv)))
        exact_verdict = "member" if value >= -10 * tol.eq_tol * scale else "non-member"
        if np.any(u):
            dirs.append(u)

    D = np.array(dirs, dtype=float)
    D /= N.evaluate(D)[:, None]
    dirs = list(D)
    xkey = x.tobytes()
    margins = np.array([f._dir_deriv_cached(x, d, xkey) for d in dirs]) - D @ Lv
    k = int(np.argmin(margins))
    margin = float(margins[k])
    if exact_verdict is not None:
        verdict = exact_verdict
    elif margin < -10 * tol.eq_tol:
        verdict = "non-member"
    elif m_dirs >= 64:
        verdict = "member"
    else:
        verdict = "inconclusive"
    return SubgradientCertificate(x, v, verdict, dirs[k], margin, len(dirs))


def subgradient_inequality(f: ConvexFunction, x, v, N: Norm, ys) -> float:
    """min over the sample ``ys`` of f(y) - f(x) - L(v)(y - x)."""
    x = as_vector(x, f.dim)
    Lv = legendre(N, v).coeffs
    fx = f.evaluate(x)
    return min(f.evaluate(y) - fx - float(Lv @ (np.asarray(y) - x)) for y in ys)


def completed_basis(u) -> np.ndarray:
    """Rows e_1 = u/|u|, then standard basis vectors chosen by pivoting.

    Each further vector is the coordinate direction with the largest
    component orthogonal to the span so far (lowest index on ties).
    """
    u = np.asarray(u, dtype=float)
    n = u.size
    E = [u / np.linalg.norm(u)]
    Q = [E[0]]
    I = np.eye(n)
    while len(E) < n:
        R = I - (I @ np.array(Q).T) @ np.array(Q)
        scores = np.linalg.norm(R, axis=1)
        scores[[i for i in range(n) if any(np.array_equal(I[i], e) for e in E)]] = -1
        k = int(np.argmax(scores))
        E.append(I[k])
        Q.append(R[k] / scores[k])
    return np.array(E)


@dataclass
class SublinearChain:
    """The functions g_0 = f'_+(x, .), g_m = (g_{m-1})'_+(e_m, .).

    ``levels`` holds callables g_0 .. g_k; the recursion stops early once a
    level is linear on the basis, since every later level then equals it.
    """

    basis: np.ndarray
    levels: list = field(default_factory=list)
    active_sets: list | None = None

    @property
    def last(self) -> Callable:
        return self.levels[-1]


def _linear_on(g: Callable, basis: np.ndarray, tol: float) -> bool:
    return all(abs(g(e) + g(-e)) <= tol for e in basis)


def subgradient_chain(f: ConvexFunction, x, u, tol: Tolerances | None = None,
                      step: float = NESTED_STEP) -> SublinearChain:
    tol = tol or f.tol
    x = as_vector(x, f.dim)
    u = as_vector(u, f.dim)
    if not np.any(u):
        raise ValueError("u must be nonzero")
    E = completed_basis(u)
    n = f.dim

    if isinstance(f, MaxAffine):
        # exact: g_m is the max of phi_i over an active set that shrinks to
        # the maximisers of phi_i(e_m)
        A = f.active(x)
        sets = [A]
        for e in E:
            vals = f.phi[A] @ e
            top = np.max(vals)
            A = A[vals >= top - 1e-12 * (1 + abs(top)) * (1 + np.max(np.abs(f.phi[A])))]
            sets.append(A)
        levels = [(lambda w, A=A: float(np.max(f.phi[A] @ w))) for A in sets]
        return SublinearChain(E, levels, sets)

    def g0(w):
        return f.dir_deriv_plus(x, w)

    levels = [g0]
    lin_tol = 10 * tol.eq_tol
    for m in range(n):
        g = levels[-1]
        if _linear_on(g, E, lin_tol):
            break
        levels.append(_sublinearize(g, E[m], step))
        lin_tol = 0.1 * TOL_CONSTRUCT
    return SublinearChain(E, levels)


def _sublinearize(g: Callable, e: np.ndarray, s: float) -> Callable:
    """w -> g'_+(e, w) by forward differences on s and s/2, extrapolated."""
    ge = g(e)
    memo = {}

    def gp(w):
        w = np.asarray(w, dtype=float)
        key = w.tobytes()
        if key not in memo:
            d1 = (g(e + s * w) - ge) / s
            d2 = (g(e + 0.5 * s * w) - ge) / (0.5 * s)
            memo[key] = 2 * d2 - d1
        return memo[key]

    return gp


def subgradient_construct(f: ConvexFunction, x, u, N: Norm, tol: Tolerances | None = None,
                          seed: int = 0, verify: bool = True) -> np.ndarray:
    """A sub-gradient w with L(w)u = f'_+(x, u), by the max-formula recursion.

    The last function of the chain is linear; its coefficients on the
    standard basis give L(w). The result is verified afterwards: membership
    and the max-formula equality, to 10*eq_tol for max-affine functions and
    to TOL_CONSTRUCT on finite-difference oracles.
    """
    tol = tol or f.tol
    x = as_vector(x, f.dim)
    u = as_vector(u, f.dim)
    chain = subgradient_chain(f, x, u, tol)
    if chain.active_sets is not None:
        phi = f.phi[chain.active_sets[-1]].mean(axis=0)
    else:
        g = chain.last
        E = chain.basis
        vals = np.array([g(e) for e in E])
        phi = np.linalg.solve(E, vals)
    w = legendre_inverse(N, Functional(phi), tol, seed=seed)
    if not verify:
        return w

    band = 10 * tol.eq_tol if f.exact else TOL_CONSTRUCT
    cert = subgradient_member(f, x, w, N, tol=tol, seed=seed)
    lw_u = float(legendre(N, w, tol)(u))
    fu = f.dir_deriv_plus(x, u)
    scale = 1.0 + abs(fu)
    member_ok = cert.member or (not f.exact and cert.margin >= -TOL_CONSTRUCT)
    if not member_ok or abs(lw_u - fu) > band * scale:
        raise ConvergenceError(
            "constructed sub-gradient failed verification",
            best=w,
            diagnostics={"margin": cert.margin, "verdict": cert.verdict,
                         "L(w)u": lw_u, "f'+(x,u)": fu, "levels": len(chain.levels)})
    return w


def estimate_check(f: ConvexFunction, x, v, N: Norm, m: int = 64,
                   tol: Tolerances | None = None, seed: int = 0) -> tuple[float, float, float, bool]:
    """Sampled check of sup f'_-(x, v+z) <= ||v||^2 <= inf f'_+(x, v+z), z in ker L(v).

    Returns ``(sup_minus, ||v||^2, inf_plus, holds)``.
    """
    tol = tol or f.tol
    x = as_vector(x, f.dim)
    v = as_vector(v, f.dim)
    nv = float(N.evaluate(v))
    if nv == 0:
        raise ValueError("v must be nonzero")
    B = complement_basis(legendre(N, v, tol).coeffs)
    rng = make_rng(seed)
    lower = nv * nv
    sup_minus, inf_plus = -np.inf, np.inf
    for _ in range(m):
        if B.shape[0]:
            z = rng.standard_normal(B.shape[0]) @ B
            z *= nv * 10 ** rng.uniform(-2, 1) / float(N.evaluate(z))
        else:
            z = np.zeros(f.dim)
        sup_minus = max(sup_minus, f.dir_deriv_minus(x, v + z))
        inf_plus = min(inf_plus, f.dir_deriv_plus(x, v + z))
    band = 10 * tol.eq_tol * (1 + lower)
    holds = sup_minus <= lower + band and lower <= inf_plus + band
    return float(sup_minus), float(lower), float(inf_plus), bool(holds)


# -- cyclic monotonicity -------------------------------------------------------

@dataclass(frozen=True)
class MonotoneData:
    """Finite set of pairs (x_i, w_i), with the anchor used by the potential."""

    pairs: tuple
    base_index: int = 0

    def __post_init__(self):
        pairs = tuple((as_vector(x), as_vector(w)) for x, w in self.pairs)
        if not pairs:
            raise ValueError("need at least one pair")
        n = pairs[0][0].size
        for x, w in pairs:
            if x.size != n or w.size != n:
                raise ValueError("all vectors must share one dimension")
        if not 0 <= self.base_index < len(pairs):
            raise ValueError("base_index out of range")
        object.__setattr__(self, "pairs", pairs)

    @property
    def dim(self) -> int:
        return self.pairs[0][0].size

    def __len__(self):
        return len(self.pairs)

    @classmethod
    def from_json(cls, obj) -> "MonotoneData":
        if isinstance(obj, dict):
            return cls([(p["x"], p["w"]) if isinstance(p, dict) else p for p in obj["pairs"]],
                       int(obj.get("base_index", 0)))
        return cls(obj)

    def to_json(self) -> dict:
        return {"pairs": [{"x": vector_to_json(x), "w": vector_to_json(w)} for x, w in self.pairs],
                "base_index": self.base_index}


def edge_weights(S: MonotoneData, N: Norm, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """c_ij = L(w_i)(x_j - x_i)."""
    X = np.array([x for x, _ in S.pairs])
    Lw = np.array([legendre(N, w, tol).coeffs for _, w in S.pairs])
    return np.einsum("ik,ijk->ij", Lw, X[None, :, :] - X[:, None, :])


def cycle_weight(C: np.ndarray, cycle: Sequence[int]) -> float:
    """Total weight of the closed cycle i_0 -> i_1 -> ... -> i_0."""
    return float(sum(C[a, b] for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]])))


def _relax_tol(C: np.ndarray, tol: Tolerances) -> float:
    return tol.eq_tol * (1.0 + float(np.max(np.abs(C)))) / len(C)


def _positive_cycle(C: np.ndarray, tol: Tolerances) -> list[int] | None:
    """Bellman-Ford longest-path relaxation from a virtual source."""
    n = len(C)
    W = C.copy()
    np.fill_diagonal(W, -np.inf)
    eps = _relax_tol(C, tol)
    dist = np.zeros(n)
    pred = -np.ones(n, dtype=int)
    last = -1
    for _ in range(n):
        last = -1
        cand = dist[:, None] + W
        best_from = np.argmax(cand, axis=0)
        best = cand[best_from, np.arange(n)]
        improve = np.flatnonzero(best > dist + eps)
        if improve.size == 0:
            return None
        dist[improve] = best[improve]
        pred[improve] = best_from[improve]
        last = int(improve[0])
    # still relaxing after n rounds: walk back n steps to land on the cycle
    j = last
    for _ in range(n):
        j = int(pred[j])
    cycle = [j]
    k = int(pred[j])
    while k != j:
        cycle.append(k)
        k = int(pred[k])
    return cycle[::-1]


def _max_cycle_mean(C: np.ndarray) -> float:
    """Karp's maximum mean weight over cycles of length >= 2."""
    n = len(C)
    if n < 2:
        return -np.inf
    W = C.copy()
    np.fill_diagonal(W, -np.inf)
    D = np.full((n + 1, n), -np.inf)
    D[0, :] = 0.0
    for k in range(1, n + 1):
        D[k] = np.max(D[k - 1][:, None] + W, axis=0)
    best = -np.inf
    for v in range(n):
        if not np.isfinite(D[n, v]):
            continue
        ks = [k for k in range(n) if np.isfinite(D[k, v])]
        best = max(best, min((D[n, v] - D[k, v]) / (n - k) for k in ks))
    return float(best)


def cyclic_monotone_check(S: MonotoneData, N: Norm,
                          tol: Tolerances = DEFAULT_TOL) -> tuple[bool, list[int], float]:
    """Is every cycle sum L(w_0)(x_1 - x_0) + ... + L(w_m)(x_0 - x_m) <= 0?

    Returns ``(ok, cycle, slack)``. ``cycle`` is a positive cycle when one
    exists (else empty) and ``slack`` is minus the largest mean cycle weight,
    so slack >= 0 for monotone data (0 for a single pair).
    """
    C = edge_weights(S, N, tol)
    cycle = _positive_cycle(C, tol)
    mean = _max_cycle_mean(C)
    slack = 0.0 if not np.isfinite(mean) else -mean
    if cycle is None:
        return True, [], float(slack)
    return False, cycle, float(slack)


def _longest_paths(C: np.ndarray, source: int) -> np.ndarray:
    n = len(C)
    W = C.copy()
    np.fill_diagonal(W, -np.inf)
    V = np.full(n, -np.inf)
    V[source] = 0.0
    for _ in range(n - 1):
        V = np.maximum(V, np.max(V[:, None] + W, axis=0))
    V[source] = 0.0
    return V


def rockafellar_potential(S: MonotoneData, N: Norm, tol: Tolerances = DEFAULT_TOL) -> MaxAffine:
    """The convex potential f(x) = max_i [V_i + L(w_i)(x - x_i)] with S in its sub-differential.

    V_i is the heaviest chain from the base pair to pair i, so f(x_base) = 0.
    """
    C = edge_weights(S, N, tol)
    cycle = _positive_cycle(C, tol)
    if cycle is not None:
        raise MonotonicityError("data is not cyclically monotone", cycle=cycle,
                                weight=cycle_weight(C, cycle))
    V = _longest_paths(C, S.base_index)
    pieces = []
    for (x, w), Vi in zip(S.pairs, V):
        phi = legendre(N, w, tol).coeffs
        pieces.append((phi, float(Vi - phi @ x)))
    return MaxAffine(pieces, tol)


def convexity_violation(f: ConvexFunction, points: np.ndarray, rng: np.random.Generator) -> float:
    """Largest f(tx + (1-t)y) - t f(x) - (1-t) f(y) over random pairs and weights."""
    worst = -np.inf
    m = len(points)
    for _ in range(m):
        i, j = rng.integers(m, size=2)
        t = rng.uniform()
        x, y = points[i], points[j]
        worst = max(worst, f(t * x + (1 - t) * y) - t * f(x) - (1 - t) * f(y))
    return float(worst)


__all__ = [
    "ConvexFunction", "MaxAffine", "DistanceFunction", "SmoothFunction", "norm_function",
    "half_square", "function_from_json", "one_sided_derivative", "norm_gradient",
    "SubgradientCertificate", "subgradient_member", "subgradient_inequality", "completed_basis",
    "SublinearChain", "subgradient_chain", "subgradient_construct", "estimate_check",
    "MonotoneData", "edge_weights", "cycle_weight", "cyclic_monotone_check",
    "rockafellar_potential", "convexity_violation", "TOL_CONSTRUCT",
]
