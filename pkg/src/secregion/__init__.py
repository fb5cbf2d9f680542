"""Secrecy capacity regions of two-receiver MIMO Gaussian broadcast
channels with one common and two confidential messages.

The package computes the rate functionals of the region, solves the
weighted confidential-rate maximization that parameterizes the boundary,
certifies candidate optima through KKT multipliers and the enhanced-noise
identity chain, and traces boundary surfaces and slices to CSV.
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateConstraint,
    DimMismatch,
    InfeasibleCovariance,
    InfeasibleTarget,
    InvalidChannel,
    InvalidMatrix,
    NoCertificate,
    NotAlignable,
    NotPositiveDefinite,
    ParseError,
    SecregionError,
    UnsupportedDim,
)
from .matcore import (
    TOL_PD,
    SymMatrix,
    is_psd,
    loewner_leq,
    logdet,
    min_eig,
    psd_project,
    sym_eig,
    sym_inverse,
)
from .channel import (
    TOL_FEAS,
    AlignedChannel,
    CovSplit,
    GeneralChannel,
    RateTriple,
    check_feasible,
    dpc_precoder,
    f0,
    f1,
    f2,
    grad_f0_b0,
    grad_f1_b1,
    grad_f2_b0,
    grad_f2_b1,
    is_feasible,
    rates_aligned,
    rates_general,
    to_aligned,
)
from .optimizer import (
    GridStats,
    RegionSample,
    SolverConfig,
    SolverResult,
    Weights,
    grid_oracle,
    maximize_weighted,
    r0_max,
    slice_at_r0,
    trace_surface,
)
from .certify import (
    ENHANCEMENT_TOLS,
    KKT_PASS_TOL,
    EnhancementReport,
    KktCertificate,
    construct_enhanced_noise,
    converse_gap,
    kkt_max_residual,
    recover_multipliers,
    verify_enhancement,
    verify_kkt,
)
