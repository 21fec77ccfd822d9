"""Topological interference management over alternating connectivity.

Exact GF(q) linear algebra, the 27-state Wyner-type connectivity catalog,
executable joint/separate coding schemes with a rank-based decodability
oracle, a deterministic Monte-Carlo engine, and the genie-aided DoF upper
bound -- all accounting in exact rationals.
"""

__version__ = "0.1.0"

from .bounds import BoundReport, gap_report, upper_bound
from .coding import (
    BUILTIN_SCHEMES,
    CancelStep,
    ChannelDraw,
    DecodeResult,
    DimensionMismatchError,
    LinearScheme,
    PlanError,
    SchemeBlock,
    SchemeFormatError,
    SolveStep,
    Use,
    as_linear_scheme,
    builtin_scheme,
    decode_block,
    plan_fallback_single,
    plan_naive_h,
    plan_quadruple,
    plan_separate,
    scheme_from_json,
    scheme_to_json,
    transmit,
    verify_decodable,
)
from .galois import (
    Field,
    FieldElement,
    FieldMatrix,
    FieldMismatchError,
    InconsistentSystemError,
    LinearSolveError,
    NotPrimeError,
    UnderdeterminedSystemError,
    field_new,
    is_prime,
    rank,
    solve,
)
from .simulate import (
    BlockOutcome,
    BlockSpec,
    ConfigError,
    SimulationConfig,
    SimulationReport,
    accounting,
    run,
    schedule,
    separate_rate,
)
from .topology import (
    STATE_ORDER,
    DistributionError,
    StateDistribution,
    TopologyState,
    UnknownStateError,
    all_states,
    both_state,
    delta,
    derived_delta,
    derived_gamma,
    derived_theta,
    from_pattern,
    gamma,
    lookup,
    silent_candidates,
    theta,
    to_dot,
)

__all__ = [name for name in dir() if not name.startswith("_")]
