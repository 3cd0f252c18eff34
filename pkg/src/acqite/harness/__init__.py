"""Config-driven experiments and the command line interface."""
from .config import ConfigError, ExperimentConfig, load_config
from .runner import (RunResult, distance_sweep, fidelity_sweep, gate_comparison, gate_count,
                     run_experiment)
