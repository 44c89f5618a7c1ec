"""Experiment harness: configuration, Monte Carlo sweeps, file IO and CLI."""

from .config import ConfigError, McConfig, load_config, parse_config
from .io import read_csv, read_iq, write_csv, write_iq
from .montecarlo import McResult, McRow, run_sweep, run_trial, trial_seed
