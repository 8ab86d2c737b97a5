"""Birkhoff orthogonality.

``x`` is Birkhoff left-orthogonal to ``y`` when ||x + t y|| >= ||x|| for all
real t. For smooth norms this is equivalent to L(x).y = 0, which is the
test used here; a golden-section search over t is run alongside it as an
independent check and reported in the result.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, Hyperplane, Tolerances, as_vector
from .errors import SingularPointError
from .legendre import legendre, legendre_inverse
from .linesearch import golden_section
from .norms import SINGULAR_RADIUS, Norm


@dataclass(frozen=True)
class OrthogonalityReport:
    holds: bool
    residual: float
    witness_t: float
    line_search_gap: float

    def to_json(self) -> dict:
        return {"holds": self.holds, "residual": self.residual,
                "witness_t": self.witness_t, "line_search_gap": self.line_search_gap}


def line_search_gap(N: Norm, x, y) -> tuple[float, float]:
    """``(||x|| - min_t ||x + t y||, argmin t)`` by golden-section search."""
    nx, ny = float(N.evaluate(x)), float(N.evaluate(y))
    if ny == 0:
        return 0.0, 0.0
    T = 2 * nx / ny
    t, val = golden_section(lambda t: float(N.evaluate(x + t * y)), -T, T, xtol=1e-12)
    if val >= nx:
        t = 0.0
    return max(nx - val, 0.0), t


def birkhoff_vv(N: Norm, x, y, tol: Tolerances = DEFAULT_TOL) -> OrthogonalityReport:
    x = as_vector(x, N.dim)
    y = as_vector(y, N.dim)
    nx, ny = float(N.evaluate(x)), float(N.evaluate(y))
    if nx < SINGULAR_RADIUS:
        raise SingularPointError("Birkhoff orthogonality is undefined for x = 0")
    if ny == 0:
        return OrthogonalityReport(True, 0.0, 0.0, 0.0)
    residual = abs(legendre(N, x, tol)(y)) / (nx * ny)
    gap, t = line_search_gap(N, x, y)
    holds = residual <= tol.eq_tol
    return OrthogonalityReport(bool(holds), float(residual), float(0.0 if holds else t), float(gap))


def birkhoff_vh(N: Norm, x, h: Hyperplane, tol: Tolerances = DEFAULT_TOL) -> OrthogonalityReport:
    """x against every vector of the linear hyperplane ``h``, via a basis of h."""
    if not h.through_origin:
        raise ValueError("hyperplane must pass through the origin")
    reports = [birkhoff_vv(N, x, z, tol) for z in h.direction_basis()]
    worst = max(reports, key=lambda r: r.residual)
    return OrthogonalityReport(all(r.holds for r in reports), worst.residual,
                               worst.witness_t, worst.line_search_gap)


def left_orthogonal_direction(N: Norm, h: Hyperplane, tol: Tolerances = DEFAULT_TOL,
                              seed: int = 0) -> np.ndarray:
    """Unit vector x with x Birkhoff left-orthogonal to ``h`` and h.normal(x) > 0."""
    if not h.through_origin:
        raise ValueError("hyperplane must pass through the origin")
    x = legendre_inverse(N, h.normal, tol, seed=seed)
    return x / float(N.evaluate(x))
