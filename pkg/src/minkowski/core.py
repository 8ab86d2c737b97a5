"""Vectors, dual functionals, hyperplanes and numerical tolerances.

Vectors are plain 1-D float64 numpy arrays. Functionals (elements of the
dual space) are wrapped in their own type so that a primal vector is never
silently used where a dual object is expected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import DimensionError

Vector = np.ndarray


@dataclass(frozen=True)
class Tolerances:
    """Global numerical tolerances shared by all operations."""

    eq_tol: float = 1e-8
    fd_step: float = 1e-6
    opt_gap: float = 1e-7
    max_iter: int = 10000

    def __post_init__(self):
        for name in ("eq_tol", "fd_step", "opt_gap"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def replace(self, **changes) -> "Tolerances":
        kw = {k: getattr(self, k) for k in ("eq_tol", "fd_step", "opt_gap", "max_iter")}
        kw.update(changes)
        return Tolerances(**kw)


DEFAULT_TOL = Tolerances()


def as_vector(x: Any, dim: int | None = None) -> Vector:
    """Validate and convert ``x`` to a read-only finite 1-D float array."""
    arr = np.array(x, dtype=float).reshape(-1) if np.ndim(x) == 0 else np.array(x, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"expected a non-empty 1-D vector, got shape {arr.shape}")
    # the sum is finite for finite input unless it overflows; check fully then
    if not math.isfinite(float(arr.sum())) and not np.all(np.isfinite(arr)):
        raise ValueError("vector coordinates must be finite")
    if dim is not None and arr.size != dim:
        raise DimensionError(f"dimension mismatch: expected {dim}, got {arr.size}")
    arr.setflags(write=False)
    return arr


def close(a, b, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Scale-aware coordinatewise equality of vectors or functionals."""
    a = a.coeffs if isinstance(a, Functional) else np.asarray(a, dtype=float)
    b = b.coeffs if isinstance(b, Functional) else np.asarray(b, dtype=float)
    scale = 1.0 + max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0))
    return bool(np.max(np.abs(a - b), initial=0.0) <= tol.eq_tol * scale)


@dataclass(frozen=True, eq=False)
class Functional:
    """Linear functional on R^n, stored in the dual standard basis."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", as_vector(self.coeffs))

    @classmethod
    def zero(cls, dim: int) -> "Functional":
        return cls(np.zeros(dim))

    @property
    def dim(self) -> int:
        return self.coeffs.size

    def __call__(self, v) -> float:
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != self.dim:
            raise DimensionError(f"functional of dimension {self.dim} applied to {v.shape[-1]}-vector")
        return v @ self.coeffs

    def __add__(self, other: "Functional") -> "Functional":
        return Functional(self.coeffs + other.coeffs)

    def __sub__(self, other: "Functional") -> "Functional":
        return Functional(self.coeffs - other.coeffs)

    def __neg__(self) -> "Functional":
        return Functional(-self.coeffs)

    def __mul__(self, alpha: float) -> "Functional":
        return Functional(float(alpha) * self.coeffs)

    __rmul__ = __mul__

    def is_zero(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        return bool(np.max(np.abs(self.coeffs)) <= tol.eq_tol)

    def __repr__(self):
        return f"Functional({self.coeffs.tolist()})"


@dataclass(frozen=True, eq=False)
class Bidual:
    """Element of the bidual space, i.e. a linear map on functionals."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", as_vector(self.coords))

    def __call__(self, phi: Functional) -> float:
        return phi(self.coords)


def canonical_embed(x) -> Bidual:
    """Return J(x), the bidual element with J(x)(phi) = phi(x)."""
    return Bidual(as_vector(x))


def complement_basis(normal: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Orthonormal (Euclidean) basis of the kernel of ``normal``; rows are basis vectors."""
    normal = np.asarray(normal, dtype=float)
    n = normal.size
    if n == 1:
        return np.zeros((0, 1))
    _, s, vt = np.linalg.svd(normal.reshape(1, -1))
    rank = int(s[0] > tol)
    return vt[rank:]


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """The affine hyperplane {y : normal(y) = offset}."""

    normal: Functional
    offset: float = 0.0
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        if not isinstance(self.normal, Functional):
            object.__setattr__(self, "normal", Functional(self.normal))
        if np.max(np.abs(self.normal.coeffs)) == 0:
            raise ValueError("hyperplane normal functional must be nonzero")
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def spanned_by(cls, vectors: Sequence) -> "Hyperplane":
        """Linear hyperplane spanned by ``n - 1`` independent vectors."""
        m = np.atleast_2d(np.asarray(vectors, dtype=float))
        n = m.shape[1]
        if m.shape[0] != n - 1 or np.linalg.matrix_rank(m) != n - 1:
            raise ValueError("need n-1 linearly independent spanning vectors")
        _, _, vt = np.linalg.svd(m)
        return cls(Functional(vt[-1]), 0.0)

    @property
    def dim(self) -> int:
        return self.normal.dim

    @property
    def through_origin(self) -> bool:
        return self.offset == 0.0

    def contains(self, y) -> bool:
        scale = np.linalg.norm(self.normal.coeffs) * (1.0 + np.max(np.abs(y)))
        return bool(abs(self.normal(y) - self.offset) <= self.tol.eq_tol * scale)

    def direction_basis(self) -> np.ndarray:
        """Basis (rows) of the direction space ker(normal)."""
        return complement_basis(self.normal.coeffs)


# JSON encodings -------------------------------------------------------------

def vector_to_json(x) -> list:
    return [float(c) for c in np.asarray(x)]


def functional_to_json(phi: Functional) -> dict:
    return {"dual": vector_to_json(phi.coeffs)}


def functional_from_json(obj) -> Functional:
    if isinstance(obj, dict):
        if "dual" not in obj:
            raise ValueError("functional JSON must have a 'dual' field")
        return Functional(obj["dual"])
    return Functional(obj)


def hyperplane_to_json(h: Hyperplane) -> dict:
    return {"normal": vector_to_json(h.normal.coeffs), "offset": h.offset}


def hyperplane_from_json(obj: dict) -> Hyperplane:
    return Hyperplane(Functional(obj["normal"]), float(obj.get("offset", 0.0)))


def make_rng(seed: int | None = 0) -> np.random.Generator:
    """Counter-based (Philox) generator; all randomness in the package flows from here."""
    return np.random.Generator(np.random.Philox(seed))
