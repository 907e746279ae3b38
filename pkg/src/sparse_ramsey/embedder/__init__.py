"""Monochromatic embedding of degenerate and bounded-degree graphs into coloured random hosts."""

from .cn import CNResult, cn_injectivize, fill_schedule, level_partition
from .constants import ConstantsPack, InfeasibleConstants, paper_sizes
from .extensions import (
    TooLarge,
    complete_segment,
    enumerate_extensions,
    is_completable,
    is_promising,
    lookahead_budget,
)
from .growth import EmbedState, GrowthOracle, StepRecord, candidate_set, cross_off, grow_homomorphism
from .hsz import RebalancingBudgetExceeded, hajnal_szemeredi_partition, verify_distance_partition
from .instance import EmbeddingInstance
from .lookahead import (
    LookaheadContext,
    SpencerVerificationFailed,
    build_all,
    build_lookahead,
    build_segment_lookahead,
)
from .pipeline import (
    EmbedReport,
    RegularityConfig,
    embed_monochromatic,
    find_k4,
    segment_length,
    shortest_cycle,
    verify_embedding,
)

__all__ = [
    "CNResult", "ConstantsPack", "EmbedReport", "EmbedState", "EmbeddingInstance", "GrowthOracle",
    "InfeasibleConstants", "LookaheadContext", "RebalancingBudgetExceeded", "RegularityConfig",
    "SpencerVerificationFailed", "StepRecord", "TooLarge", "build_all", "build_lookahead",
    "build_segment_lookahead", "candidate_set", "cn_injectivize", "complete_segment", "cross_off",
    "embed_monochromatic", "enumerate_extensions", "fill_schedule", "find_k4", "grow_homomorphism",
    "hajnal_szemeredi_partition", "is_completable", "is_promising", "level_partition",
    "lookahead_budget", "paper_sizes", "segment_length", "shortest_cycle", "verify_distance_partition",
    "verify_embedding",
]
