"""Data-driven finite-horizon behaviors, implementability, and controller synthesis."""

from .canonical import (
    ClosedLoopReport,
    ControllerBasis,
    PermutationPlan,
    controller_basis,
    plant_projector,
    reference_lift_projector,
    sample_controller_trajectory,
    verify_closed_loop,
)
from .implementability import (
    DataBundle,
    ImplementabilityVerdict,
    InvariantBounds,
    check_data,
    check_model,
    hidden_basis,
    reference_basis,
    uncontrolled_basis,
)
from .lti_core import (
    IntegerInvariants,
    StateSpaceModel,
    invariants_of,
    random_minimal_model,
    restricted_behavior_basis,
    simulate,
)
from .signal import Partition, Trajectory, cut, hankel, is_gpe, shift
from .subspace import (
    BehaviorBasis,
    Projector,
    RankTolerance,
    intersect,
    is_subspace_of,
    orthonormal_basis,
    pinv,
    principal_angles,
    projector_onto,
    subspaces_equal,
)

__version__ = "0.1.0"

__all__ = [
    "BehaviorBasis",
    "ClosedLoopReport",
    "ControllerBasis",
    "DataBundle",
    "ImplementabilityVerdict",
    "IntegerInvariants",
    "InvariantBounds",
    "Partition",
    "PermutationPlan",
    "Projector",
    "RankTolerance",
    "StateSpaceModel",
    "Trajectory",
    "check_data",
    "check_model",
    "controller_basis",
    "cut",
    "hankel",
    "hidden_basis",
    "intersect",
    "invariants_of",
    "is_gpe",
    "is_subspace_of",
    "orthonormal_basis",
    "pinv",
    "plant_projector",
    "principal_angles",
    "projector_onto",
    "random_minimal_model",
    "reference_basis",
    "reference_lift_projector",
    "restricted_behavior_basis",
    "sample_controller_trajectory",
    "shift",
    "simulate",
    "subspaces_equal",
    "uncontrolled_basis",
    "verify_closed_loop",
]
