"""Convex projective surfaces of finite volume.

Build holonomy representations from pants data, deform them along curves,
tile the developed domain of a pair of pants, measure Hilbert geometry on
polygons and audit arbitrary representations.
"""

from .audit import AuditReport, hom_p_audit, irreducibility_check, parabolic_variety_member, trace_audit
from .catalog import standard_spec
from .classify import BoundaryInvariant, IsometryClass, Region, Tag, classify, fixed_data, invariants, region_of
from .config import DEFAULT, Tolerances
from .errors import CPMError
from .hilbert import ConvexBody, busemann_area, finsler_norm, hilbert_distance
from .pants import PantsChart, build_pants, conic_chart, sample_chart, solve_chart
from .projective import AffineChart, ProjLine, ProjPoint, cross_ratio
from .render import render_svg
from .surface import HolonomyRep, SurfaceSpec, TwistParams, assemble, chart_dimension, twist_action
from .tiler import certify_convex, check_properly_convex, expand_orbit

__version__ = "0.1.0"

__all__ = [
    "AffineChart", "AuditReport", "BoundaryInvariant", "CPMError", "ConvexBody", "DEFAULT", "HolonomyRep",
    "IsometryClass", "PantsChart", "ProjLine", "ProjPoint", "Region", "SurfaceSpec", "Tag", "Tolerances",
    "TwistParams", "assemble", "build_pants", "busemann_area", "certify_convex", "chart_dimension",
    "check_properly_convex", "classify", "conic_chart", "cross_ratio", "expand_orbit", "finsler_norm",
    "fixed_data", "hilbert_distance", "hom_p_audit", "invariants", "irreducibility_check",
    "parabolic_variety_member", "region_of", "render_svg", "sample_chart", "solve_chart", "standard_spec",
    "trace_audit", "twist_action",
]
