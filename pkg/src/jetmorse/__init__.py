"""Exact curvature, Morse-integral and intersection computations for jet
towers over complex surfaces."""

from .chern import IntersectionForm, TowerRingElement, intersection_polynomials
from .cone import (
    MkRecord,
    OptimizerConfig,
    SurfaceInvariants,
    cone_contains,
    jet_order_for_surface,
    maximize_ratio,
    mk_table,
    theta_positivity_certificate,
)
from .exact import ContextError, MultiPoly, Rational
from .morse import SurfaceModel, fg_via_integrals, negativity_count, restricted_morse_integral
from .recursion import WeightVector, curvature_profile, transfer_matrix

__version__ = "0.1.0"
