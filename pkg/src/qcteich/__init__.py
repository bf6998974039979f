"""Teichmueller dimension of rational maps and numerical checks of the quasiconformal vector-field calculus."""

from .deformation import (RationalVectorField, TfBasis, aut_rank, delta_f, dpsi_at_zero,
                          in_tangent_orbit, pullback_vf, rank_invariance_check, teich_dim, tf_basis,
                          vanishing_multiplicity_test)
from .dynamics import Annotations, DynamicalPortrait, DynamicsConfig, critical_points, find_cycles, portrait
from .errors import (ClassificationIndeterminate, ConsistencyError, InputError, PreconditionError,
                     QCTeichError)
from .poly import Polynomial, roots
from .sphere import INF, MoebiusTransform, RationalFunction, RationalMap, compose, conjugate, derivative

__version__ = "0.1.0"

__all__ = [
    "RationalVectorField", "TfBasis", "aut_rank", "delta_f", "dpsi_at_zero", "in_tangent_orbit",
    "pullback_vf", "rank_invariance_check", "teich_dim", "tf_basis", "vanishing_multiplicity_test",
    "Annotations", "DynamicalPortrait", "DynamicsConfig", "critical_points", "find_cycles",
    "portrait", "ClassificationIndeterminate", "ConsistencyError", "InputError",
    "PreconditionError", "QCTeichError", "Polynomial", "roots", "INF", "MoebiusTransform",
    "RationalFunction", "RationalMap", "compose", "conjugate", "derivative", "__version__",
]
