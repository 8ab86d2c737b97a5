"""Norm oracles for smooth, strictly convex norms.

Every norm exposes ``evaluate`` (vectorised over leading axes for the
built-ins) and ``gradient`` returning d(rho)_x as a :class:`Functional`.
Built-in norms also know their dual norm in closed form, which the Legendre
module uses for exact inverses.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.stats import norm as _gauss
from scipy.stats import qmc

from .core import DEFAULT_TOL, Functional, Tolerances, as_vector, make_rng
from .errors import DimensionError, SingularPointError

SINGULAR_RADIUS = 1e-10


class Norm:
    """Base class. Subclasses implement ``_eval`` and usually ``_grad``."""

    kind = "abstract"
    # rho^2 is a quadratic form (inner-product norms)
    quadratic = False

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        self.dim = int(dim)

    def line_breakpoints(self, r, d):
        """Parameters t where rho(r - t d) may fail to be twice differentiable, or None."""
        return None

    # evaluation -----------------------------------------------------------
    def _eval(self, x: np.ndarray):
        raise NotImplementedError

    def _grad(self, x: np.ndarray) -> np.ndarray | None:
        """Analytic gradient at nonzero ``x``; None means use finite differences."""
        return None

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DimensionError(f"norm of dimension {self.dim} applied to {x.shape[-1]}-vector")
        return self._eval(x)

    __call__ = evaluate

    def grad_array(self, x, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionError(f"expected a {self.dim}-vector, got shape {x.shape}")
        r = float(self._eval(x))
        if r < SINGULAR_RADIUS:
            raise SingularPointError("the norm is not differentiable at the origin")
        g = self._grad(x)
        if g is None:
            g = _richardson_gradient(self._eval, x, tol.fd_step * (1.0 + np.max(np.abs(x))))
        return g

    def gradient(self, x, tol: Tolerances = DEFAULT_TOL) -> Functional:
        return Functional(self.grad_array(x, tol))

    def legendre_array(self, x, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
        """Coefficients of rho(x) * d(rho)_x, for any x (zero at the origin).

        Uses homogeneity, L(x) = rho(x) * grad(x / rho(x)), so tiny nonzero
        vectors are handled as accurately as unit ones.
        """
        x = np.asarray(x, dtype=float)
        r = float(self._eval(x))
        if r == 0.0:
            return np.zeros(self.dim)
        u = x / r
        g = self._grad(u)
        if g is None:
            g = _richardson_gradient(self._eval, u, tol.fd_step * (1.0 + np.max(np.abs(u))))
        return r * g

    # duality hooks ----------------------------------------------------------
    def dual(self) -> "Norm | None":
        """The dual norm acting on functional coefficients, when known in closed form."""
        return None

    def dual_value(self, c: np.ndarray) -> float | None:
        d = self.dual()
        return None if d is None else float(d._eval(c))

    def dual_argmax(self, c: np.ndarray) -> np.ndarray | None:
        """Unit vector maximising the functional ``c``, when known in closed form."""
        return None

    @property
    def analytic(self) -> bool:
        return self.dual() is not None

    def to_json(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


def _richardson_gradient(f, x: np.ndarray, h: float) -> np.ndarray:
    n = x.size
    g = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        d1 = (f(x + h * e) - f(x - h * e)) / (2 * h)
        d2 = (f(x + 0.5 * h * e) - f(x - 0.5 * h * e)) / h
        g[i] = (4 * d2 - d1) / 3
    return g


class EuclideanNorm(Norm):
    kind = "euclidean"
    quadratic = True

    def _eval(self, x):
        if x.ndim == 1:
            return float(np.sqrt(x @ x))
        return np.sqrt(np.sum(x * x, axis=-1))

    def _grad(self, x):
        return x / self._eval(x)

    def legendre_array(self, x, tol=DEFAULT_TOL):
        return np.array(x, dtype=float)

    def dual(self):
        return self

    def dual_argmax(self, c):
        return c / np.linalg.norm(c)

    def to_json(self):
        return {"type": "euclidean"}

    def __eq__(self, other):
        return isinstance(other, EuclideanNorm) and other.dim == self.dim

    __hash__ = object.__hash__


class WeightedPNorm(Norm):
    """rho(x) = (sum_i w_i |x_i|^p)^(1/p) with 1 < p < inf and w_i > 0."""

    kind = "p"

    def __init__(self, p: float, weights=None, dim: int | None = None):
        if weights is None:
            if dim is None:
                raise ValueError("weighted p-norm needs weights or a dimension")
            weights = np.ones(dim)
        weights = as_vector(weights)
        super().__init__(weights.size)
        p = float(p)
        if not (1.0 < p < np.inf):
            raise ValueError("p must lie strictly between 1 and infinity (smooth, strictly convex norms)")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        self.p = p
        self.q = p / (p - 1.0)
        self.weights = weights
        self._dual = None

    def _eval(self, x):
        a = np.abs(x)
        if a.ndim == 1:
            # single vector: ndarray methods avoid the reduction wrappers
            m = a.max()
            if m == 0:
                return 0.0
            return float(m * (self.weights * (a / m) ** self.p).sum() ** (1.0 / self.p))
        m = np.max(a, axis=-1, keepdims=True)
        safe = np.where(m > 0, m, 1.0)
        s = np.sum(self.weights * (a / safe) ** self.p, axis=-1) ** (1.0 / self.p)
        return np.squeeze(m, -1) * s

    def _grad(self, x):
        r = self._eval(x)
        return self.weights * np.sign(x) * (np.abs(x) / r) ** (self.p - 1.0)

    def legendre_array(self, x, tol=DEFAULT_TOL):
        x = np.asarray(x, dtype=float)
        r = float(self._eval(x))
        if r == 0.0:
            return np.zeros(self.dim)
        return r * self.weights * np.sign(x) * (np.abs(x) / r) ** (self.p - 1.0)

    def line_breakpoints(self, r, d):
        nz = d != 0
        return r[nz] / d[nz]

    def dual(self):
        if self._dual is None:
            self._dual = WeightedPNorm(self.q, self.weights ** (1.0 - self.q))
        return self._dual

    def dual_argmax(self, c):
        a = c * self.weights ** (-1.0 / self.p)
        aq = np.max(np.abs(a))
        na = aq * np.sum((np.abs(a) / aq) ** self.q) ** (1.0 / self.q)
        y = np.sign(a) * (np.abs(a) / na) ** (self.q - 1.0)
        return y * self.weights ** (-1.0 / self.p)

    def to_json(self):
        return {"type": "p", "p": self.p, "weights": self.weights.tolist()}

    def __eq__(self, other):
        return (isinstance(other, WeightedPNorm) and other.p == self.p
                and np.array_equal(other.weights, self.weights))

    __hash__ = object.__hash__

    def __repr__(self):
        return f"WeightedPNorm(p={self.p}, weights={self.weights.tolist()})"


class EllipsoidalNorm(Norm):
    """rho(x) = sqrt(x^T A x) for symmetric positive-definite ``A``."""

    kind = "ellipsoid"
    quadratic = True

    def __init__(self, A):
        A = np.array(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("A must be a square matrix")
        if not np.allclose(A, A.T, rtol=1e-12, atol=1e-12):
            raise ValueError("A must be symmetric")
        try:
            np.linalg.cholesky(A)
        except np.linalg.LinAlgError:
            raise ValueError("A must be positive definite") from None
        super().__init__(A.shape[0])
        A = 0.5 * (A + A.T)
        A.setflags(write=False)
        self.A = A
        self._Ainv = np.linalg.inv(A)
        self._Ainv.setflags(write=False)
        self._dual = None

    def _eval(self, x):
        if x.ndim == 1:
            return float(np.sqrt(max(x @ self.A @ x, 0.0)))
        return np.sqrt(np.maximum(np.einsum("...i,ij,...j->...", x, self.A, x), 0.0))

    def _grad(self, x):
        return self.A @ x / self._eval(x)

    def legendre_array(self, x, tol=DEFAULT_TOL):
        return self.A @ np.asarray(x, dtype=float)

    def dual(self):
        if self._dual is None:
            self._dual = EllipsoidalNorm(self._Ainv)
        return self._dual

    def dual_argmax(self, c):
        u = self._Ainv @ c
        return u / self._eval(u)

    def to_json(self):
        return {"type": "ellipsoid", "A": self.A.tolist()}

    def __eq__(self, other):
        return isinstance(other, EllipsoidalNorm) and np.array_equal(other.A, self.A)

    __hash__ = object.__hash__


class CustomNorm(Norm):
    """Norm given by user callbacks.

    ``evaluate`` maps a single 1-D array to a float and must be pure; the
    optional ``gradient`` returns d(rho)_x as an array. Smoothness and
    strict convexity are taken on trust and spot-checked at construction.
    """

    kind = "custom"

    def __init__(self, dim: int, evaluate: Callable, gradient: Callable | None = None,
                 name: str = "custom", probes: int = 64, seed: int = 0):
        super().__init__(dim)
        self._f = evaluate
        self._g = gradient
        self.name = name
        if probes:
            spot_check(self, probes=probes, seed=seed)

    def _eval(self, x):
        if x.ndim == 1:
            return float(self._f(x))
        flat = x.reshape(-1, self.dim)
        return np.array([float(self._f(row)) for row in flat]).reshape(x.shape[:-1])

    def _grad(self, x):
        if self._g is None:
            return None
        return np.asarray(self._g(x), dtype=float)

    def to_json(self):
        return {"type": "custom", "name": self.name}


def spot_check(N: Norm, probes: int = 64, seed: int = 0, tol: Tolerances = DEFAULT_TOL) -> None:
    """Randomised check of the norm axioms and strict convexity; raises ValueError."""
    rng = make_rng(seed)
    if abs(float(N.evaluate(np.zeros(N.dim)))) > tol.eq_tol:
        raise ValueError("norm of the zero vector must be 0")
    for _ in range(probes):
        x, y = rng.standard_normal((2, N.dim))
        nx, ny = float(N.evaluate(x)), float(N.evaluate(y))
        if nx <= 0 or ny <= 0:
            raise ValueError("norm must be positive off the origin")
        a = rng.uniform(-3, 3)
        if abs(float(N.evaluate(a * x)) - abs(a) * nx) > tol.eq_tol * (1 + abs(a) * nx):
            raise ValueError("norm is not absolutely homogeneous")
        if float(N.evaluate(x + y)) > nx + ny + tol.eq_tol * (1 + nx + ny):
            raise ValueError("triangle inequality violated")
        if N.dim >= 2:
            u, v = x / nx, y / ny
            # nearly parallel pairs cannot separate strict from plain convexity
            if np.linalg.norm(u - v) < 0.1 * np.linalg.norm(u):
                continue
            if float(N.evaluate(u + v)) >= 2 - tol.eq_tol:
                raise ValueError("norm failed the strict convexity probe")


def norm_eval(N: Norm, x) -> float:
    return float(N.evaluate(as_vector(x, N.dim)))


def norm_grad(N: Norm, x, tol: Tolerances = DEFAULT_TOL) -> Functional:
    """d(rho)_x; raises SingularPointError near the origin."""
    return N.gradient(as_vector(x, N.dim), tol)


@dataclass(frozen=True)
class UnitBallSample:
    points: np.ndarray
    m: int

    def __len__(self):
        return self.m


def sphere_sample(N: Norm, m: int, seed: int = 0) -> UnitBallSample:
    """``m`` points of the unit sphere of ``N`` from quasi-random directions."""
    if m < 1:
        raise ValueError("m must be >= 1")
    dirs = _sample_directions(N.dim, int(m), int(seed))
    pts = dirs / np.asarray(N.evaluate(dirs)).reshape(-1, 1)
    pts.setflags(write=False)
    return UnitBallSample(pts, m)


@lru_cache(maxsize=64)
def _sample_directions(n: int, m: int, seed: int) -> np.ndarray:
    if n == 1:
        dirs = np.where(np.arange(m) % 2 == 0, 1.0, -1.0).reshape(-1, 1)
    elif n == 2:
        offset = make_rng(seed).uniform()
        theta = 2 * np.pi * (np.arange(m) + offset) / m
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    else:
        u = qmc.Halton(d=n, scramble=True, seed=make_rng(seed)).random(m)
        dirs = _gauss.ppf(np.clip(u, 1e-12, 1 - 1e-12))
        tiny = np.linalg.norm(dirs, axis=1) < 1e-12
        dirs[tiny] = 1.0
    dirs.setflags(write=False)
    return dirs


def norm_from_json(obj, dim: int | None = None) -> Norm:
    """Build a norm from its JSON description.

    Accepts ``"euclidean"``, ``{"type": ...}`` or ``{"norm": {...}}``. The
    dimension is needed only when the description does not fix it.
    """
    if isinstance(obj, str):
        obj = {"type": obj}
    if "norm" in obj and isinstance(obj["norm"], (dict, str)):
        return norm_from_json(obj["norm"], dim)
    kind = obj.get("type")
    if kind == "euclidean":
        d = obj.get("dim", dim)
        if d is None:
            raise ValueError("euclidean norm needs a dimension")
        return EuclideanNorm(int(d))
    if kind == "p":
        if "p" not in obj:
            raise ValueError("p-norm JSON needs a 'p' field")
        w = obj.get("weights")
        if w is None:
            d = obj.get("dim", dim)
            if d is None:
                raise ValueError("p-norm needs weights or a dimension")
            w = np.ones(int(d))
        return WeightedPNorm(obj["p"], w)
    if kind in ("ellipsoid", "ellipsoidal"):
        return EllipsoidalNorm(obj["A"])
    raise ValueError(f"unknown norm type {kind!r}")
