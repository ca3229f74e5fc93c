"""Rate-limited secret-key capacities and a desk-scale distillation simulator."""

from seqkey.binary import (
    AlphaPair,
    AsymBinarySource,
    BscCascadeSource,
    CounterexampleReport,
    beta0_solve,
    bsc_matrix,
    c_rec_bsc,
    c_wsk_bec,
    c_wsk_bsc,
    counterexample_solve,
)
from seqkey.errors import (
    ConvergenceError,
    InfeasibleError,
    ParameterError,
    RateSaturated,
    SeqkeyError,
)
from seqkey.gaussian import (
    GaussianSource,
    c_rec_gauss,
    c_wsk_gauss,
    channel_mi_y,
    channel_noise_var,
    channel_rate,
    sigma0,
)
from seqkey.gf2n import POLY_TAPS, gf_mul, gf_mul_vec, gf_pow, modulus
from seqkey.measures import (
    DiscreteDist,
    DiscreteJoint,
    binary_entropy,
    conditional_entropy,
    conditional_mutual_information,
    entropy,
    gaussian_mi,
    inverse_binary_entropy,
    joint_from_cascade,
    min_entropy,
    mutual_information,
    star,
)
from seqkey.optimizer import (
    CapacityResult,
    OptimizerOptions,
    ProbeReport,
    TestChannel,
    TwoWayChannels,
    convexity_probe,
    objective_rec,
    objective_twoway,
    objective_wsk,
    optimize_oneway,
    rate_constraint,
)
from seqkey.protocol import (
    ProtocolParams,
    Rates,
    ReconCode,
    ReconcileResult,
    RunMetrics,
    design_rates,
    leakage_estimate,
    privacy_amplify,
    reconcile,
    run_experiment,
    sample_source,
)
from seqkey.quantize import (
    BoundCheckReport,
    GapBoundConstants,
    Partition,
    UniformQuantizer,
    bound_check,
    gap_bound,
    gap_constants,
    optimize_partition,
    partition_mi,
    partition_rate,
    quantized_mi,
    quantizer_marginal,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaPair",
    "AsymBinarySource",
    "BoundCheckReport",
    "BscCascadeSource",
    "CapacityResult",
    "ConvergenceError",
    "CounterexampleReport",
    "DiscreteDist",
    "DiscreteJoint",
    "GapBoundConstants",
    "GaussianSource",
    "InfeasibleError",
    "OptimizerOptions",
    "POLY_TAPS",
    "ParameterError",
    "Partition",
    "ProbeReport",
    "ProtocolParams",
    "Rates",
    "RateSaturated",
    "ReconCode",
    "ReconcileResult",
    "RunMetrics",
    "SeqkeyError",
    "TestChannel",
    "TwoWayChannels",
    "UniformQuantizer",
    "__version__",
    "beta0_solve",
    "binary_entropy",
    "bound_check",
    "bsc_matrix",
    "c_rec_bsc",
    "c_rec_gauss",
    "c_wsk_bec",
    "c_wsk_bsc",
    "c_wsk_gauss",
    "channel_mi_y",
    "channel_noise_var",
    "channel_rate",
    "conditional_entropy",
    "conditional_mutual_information",
    "convexity_probe",
    "counterexample_solve",
    "design_rates",
    "entropy",
    "gap_bound",
    "gap_constants",
    "gaussian_mi",
    "gf_mul",
    "gf_mul_vec",
    "gf_pow",
    "inverse_binary_entropy",
    "joint_from_cascade",
    "leakage_estimate",
    "min_entropy",
    "modulus",
    "mutual_information",
    "objective_rec",
    "objective_twoway",
    "objective_wsk",
    "optimize_oneway",
    "optimize_partition",
    "partition_mi",
    "partition_rate",
    "privacy_amplify",
    "quantized_mi",
    "quantizer_marginal",
    "rate_constraint",
    "reconcile",
    "run_experiment",
    "sample_source",
    "sigma0",
    "star",
]
