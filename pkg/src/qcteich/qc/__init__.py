"""Sampled tensor calculus on model domains."""

from .bers import BersResult, CauchyTarget, RationalTarget, bers_density_experiment
from .checks import (IdentityReport, RadialProfile, RotationReport, TheoremAReport,
                     annulus_triviality_form, cauchy_pompeiu_check, named_profile,
                     radial_roundtrip_error, radial_solve, random_band_limited, residue_check,
                     rotation_average, rotation_fourier_check, stokes_check, theorem_a_check)
from .domains import DomainKind, ModelDomain, hyperbolic_density
from .fields import (GridField, dbar_numeric, pair, pair_qd_beltrami, sup_hyperbolic_norm)
from .transfer import (adjointness_check, nabla_f, pullback_beltrami, pushforward_quadratic,
                       sample_quadratic)

__all__ = [
    "BersResult", "CauchyTarget", "RationalTarget", "bers_density_experiment",
    "IdentityReport", "RadialProfile", "RotationReport", "TheoremAReport",
    "annulus_triviality_form", "cauchy_pompeiu_check", "named_profile", "radial_roundtrip_error",
    "radial_solve", "random_band_limited", "residue_check", "rotation_average",
    "rotation_fourier_check", "stokes_check", "theorem_a_check", "DomainKind", "ModelDomain",
    "hyperbolic_density", "GridField", "dbar_numeric", "pair", "pair_qd_beltrami",
    "sup_hyperbolic_norm", "adjointness_check", "nabla_f", "pullback_beltrami",
    "pushforward_quadratic", "sample_quadratic",
]
