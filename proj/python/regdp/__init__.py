"""Tikhonov regularization with a discrepancy-principle parameter choice.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface. Operators are dense numpy matrices, data vectors are
1-d numpy arrays, and every seeded routine is deterministic for a fixed
seed on a fixed platform.
"""

from ._regdp import (
    BadPairCertificate,
    BudgetExhaustedError,
    ConfigError,
    DPResult,
    Error,
    NoRootError,
    QuasiMinResult,
    RegularizedSolution,
    StudyRow,
    TruncationInsufficientError,
    __version__,
    apply_forward_volterra,
    build_bad_pair,
    discrepancy_value,
    dp_root,
    dp_root_model,
    filter_factor,
    filter_operator_norm,
    h1_norm,
    make_noisy,
    nonuniformity_sweep,
    penalized_value,
    phi,
    phi_enclosure,
    psi,
    quasi_minimize,
    regularize_dp,
    run_linear_study,
    run_nonlinear_study,
    saturation_norm,
    solve,
)

__all__ = [
    "BadPairCertificate",
    "BudgetExhaustedError",
    "ConfigError",
    "DPResult",
    "Error",
    "NoRootError",
    "QuasiMinResult",
    "RegularizedSolution",
    "StudyRow",
    "TruncationInsufficientError",
    "__version__",
    "apply_forward_volterra",
    "build_bad_pair",
    "discrepancy_value",
    "dp_root",
    "dp_root_model",
    "filter_factor",
    "filter_operator_norm",
    "h1_norm",
    "make_noisy",
    "nonuniformity_sweep",
    "penalized_value",
    "phi",
    "phi_enclosure",
    "psi",
    "quasi_minimize",
    "regularize_dp",
    "run_linear_study",
    "run_nonlinear_study",
    "saturation_norm",
    "solve",
]
