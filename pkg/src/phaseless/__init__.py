"""Compressive phase retrieval by l1 minimization: decoders, certifiers and bounds."""

from .bounds import (
    BOUNDARY_DEGENERATE,
    l1_io_constants,
    mixed_ktilde,
    mixed_nsp_constant,
    nsp_const_from_rip,
    rip_from_srip,
    srip_stability_threshold,
    stability_constants,
)
from .certify import (
    lemma31_check,
    mixed_nsp_check,
    nsp_constant,
    phaseless_io_condition_estimate,
    rip_constant,
    snsp_constant,
    snsp_constant_naive,
    srip_bounds,
    srip_bounds_naive,
)
from .decoders import (
    DecodeResult,
    SignPattern,
    decode_alternating,
    decode_noiseless_l1,
    decode_noisy_l1,
    decode_sigma_k,
    error_report,
)
from .errors import (
    CapacityError,
    DomainError,
    InfeasibleError,
    InputError,
    PhaselessError,
    PreconditionError,
    SolverError,
    UnsupportedParameterError,
)
from .harness import ExperimentConfig, run_experiment, verify_io_theorem, verify_stability_theorem
from .measurements import (
    MeasurementMatrix,
    Observation,
    add_noise,
    phaseless_measure,
    row_submatrix,
    sample_gaussian,
    sign_partition,
)
from .polytope import PolytopeDecomposition, polytope_membership, sparse_decompose, tail_power_bound
from .signals import SparseApprox, best_k_term, canonical_sign, lp_norm, sim_distance

__version__ = "0.1.0"
