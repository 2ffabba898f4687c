"""Benchmarking harnesses, statistical estimators, and the CLI."""

from .estimators import (CycleFidelity, DecayFit, DepolFit, GhzFidelity,
                         GhzVerifierSpec, InfidelityBound, PowerlawFit,
                         SurvivalFit, fidelity_from_cycle, fit_decay_mle,
                         fit_depolarizing, fit_powerlaw, fit_survival,
                         ghz_fidelity, union_bounds, wilson_interval)
from .experiments import (ExperimentRecord, aggregate, noise_model,
                          run_experiment)

__all__ = [
    "CycleFidelity",
    "DecayFit",
    "DepolFit",
    "ExperimentRecord",
    "GhzFidelity",
    "GhzVerifierSpec",
    "InfidelityBound",
    "PowerlawFit",
    "SurvivalFit",
    "aggregate",
    "fidelity_from_cycle",
    "fit_decay_mle",
    "fit_depolarizing",
    "fit_powerlaw",
    "fit_survival",
    "ghz_fidelity",
    "noise_model",
    "run_experiment",
    "union_bounds",
    "wilson_interval",
]
