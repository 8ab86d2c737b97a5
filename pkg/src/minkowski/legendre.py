"""The Legendre transform of a smooth, strictly convex norm and its inverse.

``legendre(N, x)`` is the functional rho(x) * d(rho)_x: it pairs with ``x``
to give ||x||^2 and its kernel is the hyperplane Birkhoff right-orthogonal
to ``x``. The inverse maps a functional back to the unique vector with that
transform, which is ||phi||_* times the maximiser of phi on the unit sphere.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, Bidual, Functional, Tolerances, as_vector
from .errors import ConvergenceError, DimensionError
from .norms import SINGULAR_RADIUS, Norm, sphere_sample

N_SAMPLE = 256
N_STARTS = 4


def legendre(N: Norm, x, tol: Tolerances = DEFAULT_TOL) -> Functional:
    x = as_vector(x, N.dim)
    r = float(N.evaluate(x))
    if r < SINGULAR_RADIUS:
        return Functional.zero(N.dim)
    return Functional(r * N.grad_array(x, tol))


def _coeffs(N: Norm, phi) -> np.ndarray:
    c = phi.coeffs if isinstance(phi, Functional) else as_vector(phi)
    if c.size != N.dim:
        raise DimensionError(f"functional of dimension {c.size} for a {N.dim}-dimensional norm")
    return c


def dual_norm(N: Norm, phi, tol: Tolerances = DEFAULT_TOL) -> float:
    """sup of phi over the unit ball of N."""
    c = _coeffs(N, phi)
    if not np.any(c):
        return 0.0
    v = N.dual_value(c)
    if v is not None:
        return v
    return maximize_on_sphere(N, c, tol)[0]


def legendre_inverse(N: Norm, phi, tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> np.ndarray:
    c = _coeffs(N, phi)
    if not np.any(c):
        return np.zeros(N.dim)
    u = N.dual_argmax(c)
    if u is not None:
        return N.dual_value(c) * u
    value, u = maximize_on_sphere(N, c, tol, seed=seed)
    return value * u


def maximize_on_sphere(N: Norm, c: np.ndarray, tol: Tolerances = DEFAULT_TOL,
                       seed: int = 0) -> tuple[float, np.ndarray]:
    """Maximise x -> c.x over the unit sphere of a black-box norm.

    Multi-start projected gradient ascent on the scale-invariant ratio
    F(y) = c.y / rho(y), started from the best points of a sphere sample.
    Returns ``(max value, unit maximiser)``.
    """
    c = np.asarray(c, dtype=float)
    pts = sphere_sample(N, N_SAMPLE, seed).points
    vals = pts @ c
    starts = pts[np.argsort(vals)[::-1][:N_STARTS]]
    scale = np.linalg.norm(c)
    best = (-np.inf, None)
    failures = []
    for x0 in starts:
        try:
            val, u = _ascent(N, c, x0, tol, scale)
        except ConvergenceError as exc:
            failures.append(exc)
            val, u = exc.best
        if val > best[0]:
            best = (val, u)
    if len(failures) == len(starts):
        raise ConvergenceError("sphere maximisation did not converge from any start",
                               best=best, diagnostics={"starts": len(starts)})
    return best


def _ascent(N, c, x0, tol, scale):
    x = x0 / float(N.evaluate(x0))
    F = float(c @ x)
    step = 1.0
    for _ in range(tol.max_iter):
        g = N.grad_array(x, tol)
        d = c - F * g
        if np.linalg.norm(d) <= tol.opt_gap * 1e-2 * scale:
            return F, x
        while True:
            y = x + step * d
            ry = float(N.evaluate(y))
            Fy = float(c @ y) / ry
            if Fy >= F + 1e-4 * step * float(d @ d):
                if Fy - F <= 1e-15 * abs(F):
                    # stagnated at working precision
                    return Fy, y / ry
                x, F = y / ry, Fy
                step = min(step * 2.0, 1e6)
                break
            step *= 0.5
            if step < 1e-16:
                # no ascent available at working precision
                return F, x
    raise ConvergenceError("projected ascent hit max_iter", best=(F, x))


def dual_legendre(N: Norm, phi, tol: Tolerances = DEFAULT_TOL) -> Bidual:
    """Legendre transform of the dual norm at ``phi``, as a bidual element.

    Requires a norm whose dual is known in closed form.
    """
    D = N.dual()
    if D is None:
        raise ValueError("dual Legendre transform needs an analytic dual norm")
    return Bidual(legendre(D, _coeffs(N, phi), tol).coeffs)


@dataclass(frozen=True, eq=False)
class LegendrePair:
    primal: np.ndarray
    dual: Functional

    @classmethod
    def of(cls, N: Norm, x, tol: Tolerances = DEFAULT_TOL) -> "LegendrePair":
        x = as_vector(x, N.dim)
        return cls(x, legendre(N, x, tol))

    def check(self, N: Norm, tol: Tolerances = DEFAULT_TOL) -> bool:
        r = float(N.evaluate(self.primal))
        pairing_ok = abs(self.dual(self.primal) - r * r) <= tol.eq_tol * (1 + r * r)
        norm_ok = abs(dual_norm(N, self.dual, tol) - r) <= tol.eq_tol * (1 + r)
        return bool(pairing_ok and norm_ok)
