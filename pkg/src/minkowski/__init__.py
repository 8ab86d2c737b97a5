"""Convex analysis in smooth, strictly convex finite-dimensional normed spaces.

The Legendre transform L(x) = ||x|| d||.||_x replaces the Riesz map of an
inner-product space; with it the package provides Birkhoff orthogonality,
metric projections onto convex bodies, norm gradients and sub-gradients,
and Rockafellar potentials of cyclically monotone data.
"""
from .birkhoff import OrthogonalityReport, birkhoff_vh, birkhoff_vv, left_orthogonal_direction
from .bodies import (ConvexBody, NormalCone, NormBall, ParallelBody, Polytope, make_ball,
                     make_polytope, normal_cone, parallel_body)
from .core import (DEFAULT_TOL, Bidual, Functional, Hyperplane, Tolerances, as_vector,
                   canonical_embed, make_rng)
from .errors import (ConvergenceError, DegenerateBodyError, DimensionError, MinkowskiError,
                     MonotonicityError, NotDifferentiableError, NotOnBoundaryError,
                     SingularPointError)
from .legendre import LegendrePair, dual_legendre, dual_norm, legendre, legendre_inverse
from .norms import (CustomNorm, EllipsoidalNorm, EuclideanNorm, Norm, WeightedPNorm,
                    norm_from_json, sphere_sample)
from .projection import (ProjectionResult, distance, distance_gradient, parallel_normal_check,
                         project, sun_check)
from .subdifferential import (DistanceFunction, MaxAffine, MonotoneData, SmoothFunction,
                              cyclic_monotone_check, estimate_check, function_from_json,
                              half_square, norm_function, norm_gradient, rockafellar_potential,
                              subgradient_construct, subgradient_member)

__version__ = "0.1.0"
