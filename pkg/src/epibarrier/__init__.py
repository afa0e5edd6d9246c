"""Barrier-based admissible and robust invariant sets for a two-state
vector-borne infection model with bounded fumigation control."""

from .barrier import (
    BarrierCurve,
    BarrierHorizonError,
    BarrierVerification,
    Termination,
    TerminationKind,
    compute_barrier,
    switching_input,
    verify_barrier,
)
from .classifier import (
    Audit,
    Case,
    CASE_ORDER,
    Classification,
    classification_report,
    classify,
    parse_report,
)
from .model import (
    ConstraintCaps,
    Costate,
    Face,
    ModelParams,
    State,
    active_faces,
    adjoint_rhs,
    constraint_values,
    endemic_equilibrium,
    in_box,
    lie_derivative,
    state_jacobian,
    vector_field,
)
from .oracle import Agreement, GridVerdict, compare, grid_membership
from .policy import (
    Action,
    POLICY,
    PolicyAdvice,
    Trajectory,
    recommend,
    simulate,
)
from .region import (
    Membership,
    MembershipStatus,
    RegionSet,
    area,
    build_regions,
    compute_regions,
    contains,
    efficiency_ratio,
)
from .scenario import RunSettings, Scenario, ScenarioError, load_scenario
from .tangency import (
    SetKind,
    TangentPoint,
    entry_condition,
    tangent_point_g1,
    tangent_point_g3,
)

__version__ = "0.1.0"
