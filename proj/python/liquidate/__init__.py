"""Propagator-model optimal liquidation experiments."""

from ._core import (
    ConfigError,
    Grid,
    NumericalError,
    __version__,
    cell_averages,
    exploration_indices,
    greedy_rollout,
    initial_explorations,
    is_admissible,
    lsmc_hyperparams,
    min_convolution_eig,
    run_experiment,
    schedule,
    singular_values,
)

EXPERIMENTS = ("estimate-rate", "regret", "signal-rate", "control-check", "dist-fn")

__all__ = [
    "ConfigError",
    "EXPERIMENTS",
    "Grid",
    "NumericalError",
    "__version__",
    "cell_averages",
    "exploration_indices",
    "greedy_rollout",
    "initial_explorations",
    "is_admissible",
    "lsmc_hyperparams",
    "min_convolution_eig",
    "run_experiment",
    "schedule",
    "singular_values",
]
