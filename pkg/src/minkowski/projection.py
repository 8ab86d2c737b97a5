"""Metric projection onto convex bodies and the distance function.

The projection minimises g(y) = 1/2 rho(x - y)^2 over K by conditional
gradient. The derivative of g at y is -L(x - y), so each step asks the body
for its maximiser of L(x - y) and the Frank-Wolfe gap
L(x - y)(s - y) certifies the result. Polytopes keep barycentric weights
and take the best of a Frank-Wolfe, away or pairwise step, followed by a
corrective sweep over the active vertices; balls and parallel bodies in
the ambient norm are handled in closed form.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bodies import ConvexBody, NormBall, ParallelBody, Polytope
from .birkhoff import birkhoff_vh
from .core import DEFAULT_TOL, Functional, Hyperplane, Tolerances, as_vector, vector_to_json
from .errors import NotDifferentiableError
from .legendre import legendre
from .linesearch import convex_line_search
from .norms import Norm

EPS = np.finfo(float).eps
BAND_FACTOR = 100


@dataclass(frozen=True)
class ProjectionResult:
    point: np.ndarray
    distance: float
    gap: float
    iterations: int
    outer_normal: np.ndarray | None
    certified: bool = True
    in_band: bool = False
    weights: np.ndarray | None = None   # barycentric weights over the polytope's extreme points

    def to_json(self) -> dict:
        return {
            "point": vector_to_json(self.point),
            "distance": self.distance,
            "gap": self.gap,
            "iterations": self.iterations,
            "outer_normal": None if self.outer_normal is None else vector_to_json(self.outer_normal),
            "certified": self.certified,
            "in_band": self.in_band,
        }


def _residual(x: np.ndarray, y: np.ndarray, mass=None) -> np.ndarray:
    """x - y with differences below rounding level set to exact zeros.

    ``mass`` bounds the magnitudes summed into y (alpha @ |V| for a convex
    combination), which sets the rounding level of y itself.
    """
    r = x - y
    r[np.abs(r) <= 4 * EPS * (np.abs(x) + (np.abs(y) if mass is None else mass))] = 0.0
    return r


def _lvec(N: Norm, z: np.ndarray, tol: Tolerances) -> np.ndarray:
    return N.legendre_array(z, tol)


def _certificate(N, K, x, y, tol) -> float:
    """Frank-Wolfe gap sup_{s in K} L(x - y)(s - y) at the final point."""
    Lr = _lvec(N, x - y, tol)
    return max(float(K.support(Lr) - Lr @ y), 0.0)


def _finish(N, K, x, y, gap, it, tol, certified=None, weights=None) -> ProjectionResult:
    d = float(N.evaluate(x - y))
    eta = (x - y) / d if d > 0 else None
    ok = gap <= tol.opt_gap if certified is None else certified
    # the gap is nonnegative in exact arithmetic; rounding can leave -1e-15
    return ProjectionResult(np.asarray(y, dtype=float), d, max(float(gap), 0.0), it, eta,
                            bool(ok), False, weights)


def project(N: Norm, K: ConvexBody, x, tol: Tolerances = DEFAULT_TOL,
            rtol: float = 1e-14, exact: bool = False, warm=None) -> ProjectionResult:
    """Nearest point of ``K`` to ``x`` in the norm ``N``.

    Iterates until the duality gap drops below ``rtol`` times the objective
    (or to the rounding floor); the result is flagged certified when the
    final gap is at most ``tol.opt_gap``. Points within eq_tol of the body
    count as inside unless ``exact`` is set, in which case tiny positive
    distances are resolved (needed by finite-difference derivatives).

    For polytopes, ``warm`` may hold vertex weights (``weights`` of an
    earlier result at a nearby point) to start the iteration from.
    """
    x = as_vector(x, N.dim)
    if K.dim != N.dim:
        raise ValueError("body and norm dimensions differ")

    scale = 1 + np.max(np.abs(x))
    # exact mode still absorbs a few ulps, the rounding of x itself
    slack = 8 * EPS * scale if exact else tol.eq_tol * scale
    if isinstance(K, NormBall) and K.norm == N:
        return _project_ball(N, K, x, tol, slack)
    if isinstance(K, ParallelBody) and K.norm == N:
        return _project_parallel(N, K, x, tol, rtol, slack, exact, warm)
    if _inside_test(K, x, exact):
        return _inside(N, K, x, tol)
    if isinstance(K, Polytope):
        return _pairwise_fw(N, K, x, tol, rtol, warm)
    return _vanilla_fw(N, K, x, tol, rtol)


def _inside_test(K, x, exact) -> bool:
    if not exact:
        return K.contains(x)
    r = K.boundary_residual(x)
    return K.contains(x) if r is None else r <= 8 * EPS * (1 + np.max(np.abs(x)))


def _inside(N, K, x, tol) -> ProjectionResult:
    band = K.on_boundary(x, eps=BAND_FACTOR * tol.eq_tol)
    return ProjectionResult(np.array(x), 0.0, 0.0, 0, None, True, bool(band))


def _project_ball(N, K, x, tol, slack):
    z = x - K.center
    r = float(N.evaluate(z))
    if r <= K.radius + slack:
        return _inside(N, K, x, tol)
    y = K.center + K.radius * z / r
    return ProjectionResult(y, r - K.radius, 0.0, 0, z / r, True, False)


def _project_parallel(N, K, x, tol, rtol, slack, exact, warm=None):
    base = project(N, K.base, x, tol, rtol, exact, warm)
    if base.distance <= K.delta + slack:
        res = _inside(N, K, x, tol)
        band = abs(base.distance - K.delta) <= BAND_FACTOR * tol.eq_tol
        return ProjectionResult(res.point, 0.0, 0.0, base.iterations, None, base.certified, band)
    eta = base.outer_normal
    y = base.point + K.delta * eta
    return ProjectionResult(y, base.distance - K.delta, base.gap, base.iterations, eta,
                            base.certified, False, base.weights)


def _line_search(N, r, d, gmax, tol):
    # d/dgamma of 1/2 rho(r - gamma d)^2 is -L(r - gamma d).d, nondecreasing in
    # gamma; a quadratic model with curvature rho(d)^2 supplies the scale of the
    # root, and is exact for inner-product norms
    nd = float(N.evaluate(d))
    slope = float(_lvec(N, r, tol) @ d)
    if nd == 0 or slope <= 0:
        return 0.0
    guess = slope / (nd * nd)
    if N.quadratic:
        return min(guess, gmax)
    return convex_line_search(lambda g: -float(_lvec(N, r - g * d, tol) @ d), gmax,
                              guess=guess, d0=-slope, breakpoints=N.line_breakpoints(r, d))


class _Stopper:
    """Stopping rule shared by the conditional-gradient variants.

    Stops once the gap is below rtol times the objective, or once it is
    below the rounding floor of the gap itself and the objective has
    stopped decreasing. The second clause matters for tiny distances,
    where the gap is pure rounding noise long before the iterate is
    accurate (the distance error is about gap / distance). A run whose
    objective has not decreased at all over STALL iterations is cycling at
    rounding level and stops too; certification still rests on the gap.
    """

    WINDOW = 5
    # no decrease at all over this many iterations ends the run whatever the gap
    STALL = 50

    def __init__(self, N, x, tol, rtol):
        self.N, self.x, self.tol, self.rtol = N, x, tol, rtol
        self.history: list[float] = []

    def done(self, r, Lr, s, y, gap, mass=None) -> bool:
        g = 0.5 * float(self.N.evaluate(r)) ** 2
        self.history.append(g)
        if gap <= min(self.tol.opt_gap, self.rtol * g):
            return True
        h = self.history
        if len(h) > self.STALL and h[-1 - self.STALL] <= g:
            return True
        if gap > self.tol.opt_gap:
            return False
        floor = 16 * EPS * float(np.abs(Lr) @ (np.abs(s) + np.abs(y) + np.abs(r)))
        # sensitivity of L(x - y) to rounding of x - y; large where the norm's
        # second derivative blows up (p < 2 near coordinate hyperplanes)
        # ``mass`` bounds the magnitudes summed into y (alpha @ |V| for polytopes)
        mass = np.abs(y) + np.abs(s) if mass is None else mass
        delta = 4 * EPS * (np.abs(self.x) + mass)
        jitter = np.maximum(np.abs(_lvec(self.N, r + delta, self.tol) - Lr),
                            np.abs(_lvec(self.N, r - delta, self.tol) - Lr))
        floor += float(jitter @ np.abs(s - y))
        if gap > floor:
            return False
        return len(h) > self.WINDOW and h[-1 - self.WINDOW] - g <= 1e-12 * h[-1 - self.WINDOW]


def _pairwise_fw(N: Norm, K: Polytope, x, tol, rtol, warm=None) -> ProjectionResult:
    # interior input points never help; iterating over them only slows the active set
    V = K.extreme_points
    if warm is not None and len(warm) == len(V) and np.sum(warm) > 0:
        alpha = np.clip(np.asarray(warm, dtype=float), 0.0, None)
        alpha /= alpha.sum()
    else:
        alpha = np.zeros(len(V))
        alpha[int(np.argmin(N.evaluate(x - V)))] = 1.0
    y = alpha @ V
    gap = prev_gap = np.inf
    polished = False
    stop = _Stopper(N, x, tol, rtol)
    for it in range(1, tol.max_iter + 1):
        mass = alpha @ np.abs(V)
        r = _residual(x, y, mass)
        Lr = _lvec(N, r, tol)
        vals = V @ Lr
        s = K.argmax_extreme(Lr)
        ly = float(Lr @ y)
        gap = float(vals[s] - ly)
        if stop.done(r, Lr, V[s], y, gap, mass):
            if polished:
                return _finish(N, K, x, y, max(gap, 0.0), it, tol, weights=alpha.copy())
            # a small gap pins the objective, not the point: on faces where the
            # residual has zero coordinates (flat directions of the norm, p > 2)
            # the iterate can still be far off. Line searches within the face
            # resolve those coordinates to full precision.
            polished = True
            for _ in range(3):
                before = alpha.copy()
                alpha = _corrective_sweep(N, V, x, alpha, tol)
                if np.array_equal(alpha, before):
                    break
            y = alpha @ V
            continue
        slow = gap > 0.5 * prev_gap
        prev_gap = gap
        active = np.flatnonzero(alpha > 0)
        a = active[np.argmin(vals[active])]
        # away-step rule: move away from a when that promises more than the
        # Frank-Wolfe step towards s (stalls on faces are left to the face step)
        kind, d, gmax = "fw", V[s] - y, 1.0
        if a != s and alpha[a] < 1.0 and float(ly - vals[a]) > gap:
            kind, d, gmax = "away", y - V[a], alpha[a] / (1.0 - alpha[a])
        gamma = _line_search(N, r, d, gmax, tol)
        if kind == "fw":
            alpha *= 1.0 - gamma
            alpha[s] += gamma
            if gamma >= 1.0:
                alpha[:] = 0.0
                alpha[s] = 1.0
        else:
            alpha *= 1.0 + gamma
            alpha[a] -= gamma
            if gamma >= gmax:
                alpha[a] = 0.0
        alpha[alpha < 1e-15] = 0.0
        alpha /= alpha.sum()
        if slow or gamma == 0.0:
            # the gap is not contracting: solve on the active face
            before = alpha.copy()
            alpha = _face_newton(N, V, x, alpha, tol)
            alpha = _corrective_sweep(N, V, x, alpha, tol)
            if gamma == 0.0 and np.array_equal(alpha, before):
                # no descent possible at working precision
                return _finish(N, K, x, y, max(gap, 0.0), it, tol, weights=alpha.copy())
        y = alpha @ V
    return _finish(N, K, x, y, gap, tol.max_iter, tol, certified=gap <= tol.opt_gap,
                   weights=alpha.copy())


def _l_jacobian(N, r, tol) -> np.ndarray:
    """Central-difference Jacobian of L at r (the Hessian of rho^2 / 2)."""
    n = r.size
    h = 1e-6 * float(np.max(np.abs(r)))
    J = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        J[:, i] = (_lvec(N, r + e, tol) - _lvec(N, r - e, tol)) / (2 * h)
    return 0.5 * (J + J.T)


def _face_newton(N, V, x, alpha, tol):
    """One Newton step for the weights on the face spanned by the active vertices.

    The weights move in the sum-zero subspace; the step is followed by an
    exact line search capped where the first weight reaches zero. Pairwise
    and away steps alone converge linearly when the optimum lies on a face
    of lower dimension than the active set (each step also moves the
    iterate off that face); the Newton direction heads for it directly.
    """
    act = np.flatnonzero(alpha > 0)
    k = len(act)
    if k < 2:
        return alpha
    r = _residual(x, alpha @ V, alpha @ np.abs(V))
    if not np.any(r):
        return alpha
    Z = np.vstack([np.eye(k - 1), -np.ones((1, k - 1))])
    D = Z.T @ V[act]
    grad = -(D @ _lvec(N, r, tol))
    H = D @ _l_jacobian(N, r, tol) @ D.T
    try:
        t = np.linalg.lstsq(H, -grad, rcond=1e-12)[0]
    except np.linalg.LinAlgError:
        return alpha
    da = Z @ t
    if not np.all(np.isfinite(da)) or float(grad @ t) >= 0:
        return alpha
    neg = np.flatnonzero(da < 0)
    ratios = -alpha[act[neg]] / da[neg]
    gmax = min(float(ratios.min()), 4.0) if neg.size else 4.0
    gamma = _line_search(N, r, da @ V[act], gmax, tol)
    if gamma <= 0:
        return alpha
    alpha = alpha.copy()
    alpha[act] += gamma * da
    if neg.size and gamma >= ratios.min():
        # the blocking vertex leaves the face
        alpha[act[neg[np.argmin(ratios)]]] = 0.0
    alpha[alpha < 1e-15] = 0.0
    return alpha / alpha.sum()


def _corrective_sweep(N, V, x, alpha, tol, max_active=12):
    """One pass of exact line searches along all pairwise directions V[j] - V[i]
    between active vertices. This is block coordinate descent on the
    barycentric weights; on nearly separable faces it pins each free
    coordinate of the iterate in a single pass, which matters for norms
    whose gradient is not Lipschitz (p < 2), where the gap decays like the
    square root of the coordinate error."""
    active = np.flatnonzero(alpha > 0)
    if len(active) < 2 or len(active) > max_active:
        return alpha
    for i in active:
        for j in active:
            if i == j or alpha[i] <= 0:
                continue
            d = V[j] - V[i]
            r = _residual(x, alpha @ V, alpha @ np.abs(V))
            gamma = _line_search(N, r, d, alpha[i], tol)
            if gamma > 0:
                alpha[j] += gamma
                alpha[i] = 0.0 if gamma >= alpha[i] else alpha[i] - gamma
    return alpha


def _vanilla_fw(N: Norm, K: ConvexBody, x, tol, rtol) -> ProjectionResult:
    y = np.asarray(K.argmax(_lvec(N, x - K.interior_point(), tol)), dtype=float)
    gap = np.inf
    stop = _Stopper(N, x, tol, rtol)
    for it in range(1, tol.max_iter + 1):
        r = _residual(x, y)
        Lr = _lvec(N, r, tol)
        s = np.asarray(K.argmax(Lr), dtype=float)
        gap = float(Lr @ (s - y))
        if stop.done(r, Lr, s, y, gap):
            return _finish(N, K, x, y, max(gap, 0.0), it, tol)
        d = s - y
        gamma = _line_search(N, r, d, 1.0, tol)
        if gamma == 0.0:
            return _finish(N, K, x, y, max(gap, 0.0), it, tol)
        y = y + gamma * d
    return _finish(N, K, x, y, gap, tol.max_iter, tol, certified=gap <= tol.opt_gap)


def distance(N: Norm, K: ConvexBody, x, tol: Tolerances = DEFAULT_TOL) -> float:
    return project(N, K, x, tol).distance


def distance_gradient(N: Norm, K: ConvexBody, x, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Norm gradient of d_K at ``x``: the outer normal outside K, 0 inside.

    Raises NotDifferentiableError in the boundary band.
    """
    res = project(N, K, x, tol)
    if res.distance == 0.0:
        if res.in_band:
            raise NotDifferentiableError("d_K is not differentiable on the boundary of K")
        return np.zeros(N.dim)
    if res.distance <= BAND_FACTOR * tol.eq_tol:
        raise NotDifferentiableError("x lies in the boundary band of K")
    return res.outer_normal


def sun_check(N: Norm, K: ConvexBody, x, t: float, tol: Tolerances = DEFAULT_TOL,
              threshold: float | None = None) -> bool:
    """Does p_K(x) remain the projection of every point on its outward ray?"""
    if not t > 0:
        raise ValueError("t must be positive")
    res = project(N, K, x, tol)
    if res.outer_normal is None:
        raise ValueError("sun check needs a point outside K")
    y = res.point + t * res.outer_normal
    again = project(N, K, y, tol)
    threshold = 10 * tol.eq_tol if threshold is None else threshold
    return bool(float(N.evaluate(again.point - res.point)) <= threshold * (1 + np.max(np.abs(res.point))))


def parallel_normal_check(N: Norm, K: ConvexBody, z, u, delta: float,
                          tol: Tolerances = DEFAULT_TOL, samples: int = 256, seed: int = 0) -> bool:
    """Is the outer normal ``u`` of K at ``z`` a Birkhoff normal of K + delta*B at z + delta*u?

    Checks L(u)(y - (z + delta*u)) <= 0 over the body's maximisers of a
    functional sample and over random points of the parallel body, and that
    u is left-orthogonal to the kernel hyperplane of L(u).
    """
    from .bodies import normal_cone
    from .core import make_rng

    z = as_vector(z, N.dim)
    u = as_vector(u, N.dim)
    if not delta > 0:
        raise ValueError("delta must be positive")
    if abs(float(N.evaluate(u)) - 1.0) > 1e3 * tol.eq_tol:
        raise ValueError("u must be a unit vector")
    cone = normal_cone(K, z, N, tol)
    if not cone.membership(u):
        raise ValueError("u is not an outer normal of K at z")
    phi = legendre(N, u, tol)
    apex = z + delta * u
    rng = make_rng(seed)
    P = ParallelBody(K, delta, N, tol) if not isinstance(K, ParallelBody) else K
    funcs = rng.standard_normal((samples, N.dim))
    pts = [np.asarray(P.argmax(f)) for f in funcs]
    pts.extend(P.sample(samples, rng))
    scale = 1 + np.max(np.abs(apex))
    ok = all(phi(y - apex) <= 10 * tol.eq_tol * scale for y in pts)
    ok = ok and abs(P.support(phi) - phi(apex)) <= 10 * tol.eq_tol * scale
    h = Hyperplane(Functional(phi.coeffs), 0.0)
    return bool(ok and birkhoff_vh(N, u, h, tol).holds)


__all__ = ["ProjectionResult", "project", "distance", "distance_gradient", "sun_check",
           "parallel_normal_check"]
