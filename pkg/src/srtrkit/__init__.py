"""Toolkit for system response-type realizations of LTI networks.

The package builds (W, V) pairs with G = (lambda I - W)^{-1} V from
partitioned state-space data, certifies coprimeness through a linear
pencil, converts to and from left coprime factorizations over the stable
rational functions via a nonsymmetric Riccati equation, synthesizes
sparse low-order controller rows, and assembles the resulting closed
loops.
"""

from .errors import (
    AlgebraicLoopError,
    DimensionError,
    InexactTruncationError,
    InfeasibleError,
    InvalidInputError,
    InvalidThetaError,
    InvalidTransformError,
    KontrollerFormError,
    NonFiniteError,
    NoSolutionError,
    NumericalFailureError,
    PoleEvaluationError,
    PreconditionError,
    RegularityViolationError,
    SrtrKitError,
    TrivialCaseError,
    UnsupportedFeedthroughError,
)
from .factorization import (
    LcfOverS,
    LcfReport,
    RiccatiSolution,
    ThetaFactor,
    lcf_from_srtr,
    make_theta,
    mn_sparsity,
    riccati_residual,
    solve_ctnare,
    srtr_from_lcf,
    to_kontroller_form,
    verify_lcf,
)
from .linalg import (
    eigenvalues,
    in_stability_region,
    is_stable_spectrum,
    pbh_test,
    rank_with_tolerance,
    row_compressor,
    sample_complex_points,
    stability_distance,
    stability_margin,
    structural_property,
)
from .loop import (
    ClosedLoopModel,
    KdController,
    RowImplementation,
    Trajectory,
    assemble_closed_loop,
    check_internal_stability,
    kd_from_srtr,
    rowwise_implementation,
    simulate,
    unstable_pole_count,
)
from .rational import RationalFn, faddeev, realization_entry_numerators
from .srtr import (
    CoprimeReport,
    NrfPair,
    SparsityPattern,
    SrtrPair,
    check_flcf,
    nrf_from_srtr,
    sparsity_pattern,
    srtr_from_k,
    srtr_is_stable,
    verify_srtr_identity,
)
from .synthesis import (
    ConditionReport,
    SolveOptions,
    SynthesisSpec,
    assign_stable_spectrum,
    compress_rows,
    dense_spec,
    mm_conditions,
    mm_solve,
    reduce_rows,
    verify_structured,
)
from .systems import (
    PartitionedRealization,
    RingNetwork,
    StateSpaceSystem,
    apply_transform,
    build_ring_network,
    eval_tfm,
    is_minimal,
    minimal_realization,
    ring_shift,
    to_output_normal,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraicLoopError",
    "ClosedLoopModel",
    "ConditionReport",
    "CoprimeReport",
    "DimensionError",
    "InexactTruncationError",
    "InfeasibleError",
    "InvalidInputError",
    "InvalidThetaError",
    "InvalidTransformError",
    "KdController",
    "KontrollerFormError",
    "LcfOverS",
    "LcfReport",
    "NoSolutionError",
    "NonFiniteError",
    "NrfPair",
    "NumericalFailureError",
    "PartitionedRealization",
    "PoleEvaluationError",
    "PreconditionError",
    "RationalFn",
    "RegularityViolationError",
    "RiccatiSolution",
    "RingNetwork",
    "RowImplementation",
    "SolveOptions",
    "SparsityPattern",
    "SrtrKitError",
    "SrtrPair",
    "StateSpaceSystem",
    "SynthesisSpec",
    "ThetaFactor",
    "Trajectory",
    "TrivialCaseError",
    "UnsupportedFeedthroughError",
    "apply_transform",
    "assemble_closed_loop",
    "assign_stable_spectrum",
    "build_ring_network",
    "check_flcf",
    "check_internal_stability",
    "compress_rows",
    "dense_spec",
    "eigenvalues",
    "eval_tfm",
    "faddeev",
    "in_stability_region",
    "is_minimal",
    "is_stable_spectrum",
    "kd_from_srtr",
    "lcf_from_srtr",
    "make_theta",
    "minimal_realization",
    "mm_conditions",
    "mm_solve",
    "mn_sparsity",
    "nrf_from_srtr",
    "pbh_test",
    "rank_with_tolerance",
    "realization_entry_numerators",
    "reduce_rows",
    "riccati_residual",
    "ring_shift",
    "row_compressor",
    "rowwise_implementation",
    "sample_complex_points",
    "simulate",
    "solve_ctnare",
    "sparsity_pattern",
    "srtr_from_k",
    "srtr_from_lcf",
    "srtr_is_stable",
    "stability_distance",
    "stability_margin",
    "structural_property",
    "to_kontroller_form",
    "to_output_normal",
    "unstable_pole_count",
    "verify_lcf",
    "verify_srtr_identity",
    "verify_structured",
]
