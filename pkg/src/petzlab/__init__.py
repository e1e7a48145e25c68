"""Quantum-channel coding numerics: random codes decoded with the
transpose-channel recovery map, one-shot and second-order achievability
bounds on entanglement transmission, and a verification suite for the
supporting identities. Dimensions are desk scale (inputs up to 8, tensor
products up to 256)."""

from .bounds import (
    CoherentInfoResult,
    OneShotParams,
    OneShotResult,
    OrderingReport,
    SecondOrderResult,
    bloch_grid_coherent_info,
    capacity_ordering_check,
    implied_error,
    maximize_coherent_info,
    one_shot_rhs,
    preset_split,
    quantum_dispersion,
    second_order_bound,
)
from .channel import (
    Channel,
    channel_from_dict,
    channel_to_dict,
    kraus_from_choi,
    load_channel,
    make_channel,
    parse_channel,
    random_channel,
)
from .entropy import (
    EntropyValue,
    binary_entropy,
    channel_variance,
    coherent_info,
    collision_d2,
    dmax,
    ds_eps,
    exp2_collision,
    inv_normal_cdf,
    normal_cdf,
    reference_output,
    rel_entropy,
    rel_entropy_variance,
    von_neumann_entropy,
)
from .errors import (
    BadParameterError,
    BadParamsError,
    BadProjectorError,
    ConfigError,
    DimensionMismatchError,
    EmptyCodeError,
    EpsilonHalfError,
    NotInvariantError,
    NotPSDError,
    NotTracePreservingError,
    NotUnitaryError,
    NumericsError,
    OutOfRangeError,
    PetzlabError,
    RankDeficientRhoError,
    RankTooLargeError,
    ScaleLimitError,
    SupportViolationError,
)
from .linalg import (
    hermitian_eig,
    hermitian_fn,
    hermitize,
    kernel_basis,
    partial_trace,
    support_basis,
    support_projector,
    support_rank,
)
from .petz import (
    CodeExperimentStats,
    CodeSpec,
    DephasingMap,
    PetzDecoder,
    avg_fidelity_mc,
    build_code,
    clock_invariant_state,
    code_max_entangled,
    dephasing_map,
    ent_fidelity,
    fidelity_to_target,
    petz_decoder,
    random_code_experiment,
    weak_monotonicity_violation,
)
from .qstate import (
    DensityMatrix,
    PureState,
    Subspace,
    avg_from_ent_fidelity,
    fidelity,
    flip_operator,
    haar_projector,
    haar_state,
    haar_state_in,
    haar_unitary,
    keyed_stream,
    max_entangled,
    projector_pair_moment,
    purify,
    random_subspace,
    trace_distance,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BadParameterError",
    "BadParamsError",
    "BadProjectorError",
    "Channel",
    "CodeExperimentStats",
    "CodeSpec",
    "CoherentInfoResult",
    "ConfigError",
    "DensityMatrix",
    "DephasingMap",
    "DimensionMismatchError",
    "EmptyCodeError",
    "EntropyValue",
    "EpsilonHalfError",
    "NotInvariantError",
    "NotPSDError",
    "NotTracePreservingError",
    "NotUnitaryError",
    "NumericsError",
    "OneShotParams",
    "OneShotResult",
    "OrderingReport",
    "OutOfRangeError",
    "PetzDecoder",
    "PetzlabError",
    "PureState",
    "RankDeficientRhoError",
    "RankTooLargeError",
    "ScaleLimitError",
    "SecondOrderResult",
    "Subspace",
    "SupportViolationError",
    "avg_fidelity_mc",
    "avg_from_ent_fidelity",
    "binary_entropy",
    "bloch_grid_coherent_info",
    "build_code",
    "capacity_ordering_check",
    "channel_from_dict",
    "channel_to_dict",
    "channel_variance",
    "clock_invariant_state",
    "code_max_entangled",
    "coherent_info",
    "collision_d2",
    "dephasing_map",
    "dmax",
    "ds_eps",
    "ent_fidelity",
    "exp2_collision",
    "fidelity",
    "fidelity_to_target",
    "flip_operator",
    "haar_projector",
    "haar_state",
    "haar_state_in",
    "haar_unitary",
    "hermitian_eig",
    "hermitian_fn",
    "hermitize",
    "implied_error",
    "inv_normal_cdf",
    "kernel_basis",
    "keyed_stream",
    "kraus_from_choi",
    "load_channel",
    "make_channel",
    "max_entangled",
    "maximize_coherent_info",
    "normal_cdf",
    "one_shot_rhs",
    "parse_channel",
    "partial_trace",
    "petz_decoder",
    "preset_split",
    "projector_pair_moment",
    "purify",
    "quantum_dispersion",
    "random_channel",
    "random_code_experiment",
    "random_subspace",
    "reference_output",
    "rel_entropy",
    "rel_entropy_variance",
    "second_order_bound",
    "support_basis",
    "support_projector",
    "support_rank",
    "trace_distance",
    "von_neumann_entropy",
    "weak_monotonicity_violation",
]
