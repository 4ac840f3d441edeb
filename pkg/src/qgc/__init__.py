"""Controllability of finite-dimensional bilinear quantum control systems.

Dynamical Lie-algebra closure, accessibility ranks on projective Hilbert
space, Killing-field pure-state tests, and the symplectic / Fubini-Study
phase-space machinery used to cross-check them.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .accessibility import (
    RankConditionResult,
    TangentSubspace,
    accessibility_distribution,
    corollary_check,
    rank_condition,
)
from .dynamics import (
    Trajectory,
    fidelity,
    flow_deviation,
    hamilton_flow_integrate,
    propagate_state,
    propagate_unitary,
    random_shooting_reach,
)
from .geometry import (
    GeometryContext,
    MixedState,
    PureState,
    TangentVector,
    basis_state,
    fubini_study_metric,
    haar_sample,
    hamiltonian_field,
    isometry_check,
    mc_expectation,
    observable_function,
    poisson_bracket_generator,
    pure_state_from_ket,
    state_density,
    symplectic_form,
    tangent_from_generator,
)
from .lie import (
    ControllabilityReport,
    LieAlgebraBasis,
    analyze,
    centralizer,
    contains,
    killing_pure_state_verdict,
    lie_closure,
    subspace_intersection_dim,
)
from .operators import Tolerances, commutator, hs_inner, matrix_exp, real_span_rank
from .systems import ControlSchedule, ControlSystem, Segment
