"""Analytical worst-case state bounds for stable LTI systems under bounded
additive disturbances, with a numerical cross-validation oracle and a
lateral trajectory-following-controller application."""

from .bounds import (
    BoundResult,
    ComplexPairWork,
    DoubleRealWork,
    RealPairWork,
    TotalBound,
    antiderivative_F,
    assemble_channel_bound,
    bound_complex_pair,
    bound_distinct_real_pair,
    bound_double_real_pair,
    bound_singleton,
    complex_phase,
    loose_bound,
    make_complex_pair_work,
    make_double_real_work,
    make_real_pair_work,
    switch_time_real_pair,
    total_bound,
    zero_count,
    zero_locations,
)
from .errors import (
    InputFormatError,
    QuadratureError,
    UnstableSystemError,
    UnsupportedMultiplicityError,
    WcboundError,
)
from .modal import (
    ComplexPairGroup,
    DoubleRealPair,
    ModalExpansion,
    ModalTerm,
    PairedExpansion,
    PairingStrategy,
    RealPair,
    Singleton,
    TermKind,
    evaluate_impulse_channel,
    modal_coefficients,
    pair_terms,
)
from .oracle import (
    DisturbanceProfile,
    SimulationTrace,
    VerificationReport,
    constant_profile,
    fixed_response_bound,
    matrix_exponential,
    quadrature_bound,
    simulate,
    verify,
    worst_case_disturbance,
)
from .systems import (
    ClosedLoopSystem,
    DisturbanceBounds,
    EigenClass,
    Eigenstructure,
    build_closed_loop,
    check_hurwitz,
    eigendecompose_and_classify,
)
from .tfc import (
    Regime,
    SafeRegionMap,
    TfcParams,
    build_tfc,
    overshoot_constant_disturbance,
    sweep,
    tfc_bound_closed_form,
    tfc_eigenvalues,
    tfc_regime,
)

__version__ = "0.1.0"
