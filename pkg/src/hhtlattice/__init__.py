"""Exact Picard-lattice engine for hyperelliptic tangential covers.

Intersection theory on a ruled surface over a hyperelliptic curve of genus
``g >= 2``, its blow-ups and its involution quotient; lattice checks of the
lambda lemmas; enumeration of admissible cover types; and formal checks of
the bundle transition matrices.
"""

from .cocycle import (
    FormalLinear,
    FormalMatrix,
    affine_action,
    transition_matrix_affine,
    transition_matrix_rank2,
    verify_cocycle,
)
from .cover import (
    ConsistencyError,
    DaggerClass,
    QuotientCoverModel,
    L_nnn,
    build_quotient_model,
    dagger_adjunction_genus,
    dagger_intersect,
    dagger_pullback,
    lambda_class,
    verify_canonical_pullback,
    verify_lambda_pullback,
)
from .lattice import (
    DivisorClass,
    LatticeError,
    PullbackMap,
    SurfaceMismatchError,
    SurfaceModel,
    adjunction_genus,
    blow_up,
    intersect,
    make_ruled_surface,
    pullback,
)
from .theorems import (
    CoverType,
    VerificationReport,
    check_lambda_dot_K,
    check_lambda_self,
    enumerate_cover_types,
    finiteness_summary,
    genus_lambda,
    is_admissible,
    moduli_dimension,
    rigidity_constant,
)

__version__ = "0.1.0"
