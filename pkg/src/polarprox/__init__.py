"""Polar envelopes, polar proximal maps and the projected polar proximal point method."""

from .diagnostics import (
    UNBOUNDED,
    FacialReport,
    PropertyReport,
    Verdict,
    audit_composite_contraction,
    audit_fejer,
    audit_T_fqne,
    check_shadow_limit,
    e_gap,
    estimate_lambda_prime,
    search_fqne_violation,
    verify_facial_characterization,
)
from .gauges import (
    ConvexFunctionSpec,
    FundamentalSetDescriptor,
    GaugeOracle,
    abs_shift,
    constant,
    dead_zone,
    fundamental_set,
    make_gauge_plus_indicator,
    make_minkowski_gauge,
    make_norm_gauge,
    make_perspective_gauge,
    parabola_descriptor,
    piecewise_linear,
    rescale_gauge,
    shifted_quadratic,
)
from .geometry import LiftedPoint, ProjectionSettings, lift, project_S
from .polar import CaseTag, PolarProxResult, polar_envelope, polar_prox, radius_gap
from .solver import SolverConfig, SolverTrace, Status, gp4a_step, relaxed_step, run_gp4a, run_p4a

__version__ = "0.1.0"

__all__ = [
    "abs_shift",
    "audit_composite_contraction",
    "audit_fejer",
    "audit_T_fqne",
    "CaseTag",
    "check_shadow_limit",
    "constant",
    "ConvexFunctionSpec",
    "dead_zone",
    "e_gap",
    "estimate_lambda_prime",
    "FacialReport",
    "fundamental_set",
    "FundamentalSetDescriptor",
    "GaugeOracle",
    "gp4a_step",
    "lift",
    "LiftedPoint",
    "make_gauge_plus_indicator",
    "make_minkowski_gauge",
    "make_norm_gauge",
    "make_perspective_gauge",
    "parabola_descriptor",
    "piecewise_linear",
    "polar_envelope",
    "polar_prox",
    "PolarProxResult",
    "project_S",
    "ProjectionSettings",
    "PropertyReport",
    "radius_gap",
    "relaxed_step",
    "rescale_gauge",
    "run_gp4a",
    "run_p4a",
    "search_fqne_violation",
    "shifted_quadratic",
    "SolverConfig",
    "SolverTrace",
    "Status",
    "UNBOUNDED",
    "Verdict",
    "verify_facial_characterization",
]

