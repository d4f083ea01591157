"""Watchdog lift-privacy mechanism with greedy subset merging of high-risk symbols."""

from ._kernels import BACKEND
from .distribution import (
    JointDistribution,
    Marginals,
    entropy_x,
    marginals,
    sample_random_joint,
    validate,
)
from .errors import (
    CoverMismatch,
    DeadSymbol,
    DegenerateSampler,
    EmptySubset,
    InvalidDistribution,
    IoFailure,
    MassNotNormalizable,
    NegativeEntry,
    PartitionMismatch,
    TooLarge,
    WatchdogError,
    ZeroEntropy,
)
from .lift import LiftProfile, RiskSplit, compute_lift_profile, risk_split, subset_omega
from .mechanism import (
    HighRiskPartition,
    SanitizationChannel,
    build_channel,
    complete_merging,
    merged_leakage,
    mutual_information,
    nmil,
    output_omegas,
    post_leakage,
)
from .partition import (
    GreedyTrace,
    MergeStep,
    OracleResult,
    brute_force_optimal,
    greedy_refine,
    is_refinement,
)
from .experiment import SweepConfig, SweepResult, emit_csv, emit_json, run_sweep

__version__ = "0.1.0"
