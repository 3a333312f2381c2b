"""Seeded Monte Carlo samplers and correlation estimators."""
from .sampler import (
    BACKEND,
    SAMPLERS,
    STEP_CAP,
    StepCapExceeded,
    TrialStream,
    TrialOutcome,
    CorrelationEstimate,
    OneStepEstimate,
    get_backend,
    default_threads,
    run_trial,
    run_trial_generative,
    sample_outcomes,
    pearson_from_sums,
    estimate_correlation,
    one_step_empirical,
)

__all__ = [
    "BACKEND",
    "SAMPLERS",
    "STEP_CAP",
    "StepCapExceeded",
    "TrialStream",
    "TrialOutcome",
    "CorrelationEstimate",
    "OneStepEstimate",
    "get_backend",
    "default_threads",
    "run_trial",
    "run_trial_generative",
    "sample_outcomes",
    "pearson_from_sums",
    "estimate_correlation",
    "one_step_empirical",
]
