"""Throughput of one-hop random-connection networks with noisy one-bit feedback."""

__version__ = "0.1.0"

from .asymptotics import (
    FeasibilityReport,
    TheoremParams,
    chernoff_exponent,
    corollary_tolerance,
    corollary_transfer_check,
    falk_constants,
    first_kind_tail_bound,
    max_feasible_m,
    theorem_margin,
)
from .distributions import ChannelModel, DomainError
from .experiments import ExperimentConfig, MRule, ZetaRule
from .simulation import (
    ActivationState,
    SlotOutcome,
    SlotRealization,
    apply_feedback_noise,
    cross_gain,
    draw_direct_gains,
    evaluate_slot,
    run_slot,
    select_strongest,
)
