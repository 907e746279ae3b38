"""Targets, colourings, campaigns and result verification."""

from .campaign import (
    SCHEMA_VERSION,
    CampaignResult,
    ExperimentConfig,
    aggregate,
    build_trial,
    host_digest,
    read_records,
    run_campaign,
    run_trial,
    sweep,
    trial_seeds,
)
from .colourings import STRATEGIES, colour_edges, monochromatic_cliques
from .targets import InfeasibleParameters, generate_target, in_class, maxdegree_target
from .verify import VerifyReport, check_record, verify_result

__all__ = [
    "SCHEMA_VERSION", "STRATEGIES", "CampaignResult", "ExperimentConfig", "InfeasibleParameters",
    "VerifyReport", "aggregate", "build_trial", "check_record", "colour_edges", "generate_target",
    "host_digest", "in_class", "maxdegree_target", "monochromatic_cliques", "read_records",
    "run_campaign", "run_trial", "sweep", "trial_seeds", "verify_result",
]
