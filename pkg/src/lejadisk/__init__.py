"""Kergin and Hakopian interpolation at Leja sequences for the unit disk."""

from .bounds import (
    BoundsReport,
    PairGeometry,
    hakopian_pair_norms,
    hst_magnitude_bounds,
    kergin_pair_norms,
    lagrange_lebesgue,
    lebesgue_inequality_sides,
)
from .functions import REGISTRY, TestFunctionRegistry, get_function
from .geometry import DiskGrid, PlanePoint, make_disk_grid
from .interpolants import (
    DegenerateNodesError,
    HakopianInterpolant,
    KerginInterpolant,
    NodeConfiguration,
    hakopian,
    kergin,
    newton_term,
    verify_mean_value_conditions,
)
from .leja import LejaSection, canonical_leja, decompose
from .mean_value import QuadratureRule, ScalarField, segment_integral, simplex_integral
from .polys import BivariatePoly, ComplexPoly, SignLogValue, UnivariatePoly

__version__ = "0.1.0"
