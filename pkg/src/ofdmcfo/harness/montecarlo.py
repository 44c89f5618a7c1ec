"""
Monte Carlo sweeps over SNR and pilot count.

Each trial draws all of its randomness from a seed derived from
``(seed, snr_index, n_p_index, trial_index)``, so results do not depend on
how trials are scheduled across workers. Reduction is always done in trial
order.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from ..estimator import Estimator, Mode, estimate_cfo_moose, estimate_frame
from ..impairments import ImpairmentState, apply_awgn, apply_cfo, apply_channel, apply_phn
from ..pilots import gen_pattern
from ..txrx import QPSK_POINTS, modulate_frame, random_grid
from .config import ConfigError, McConfig

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(x: int) -> int:
    # splitmix64 finaliser
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def trial_seed(master: int, snr_index: int, n_p_index: int, trial_index: int) -> int:
    h = _mix64(master & _MASK64)
    for v in (snr_index, n_p_index, trial_index):
        h = _mix64(h ^ ((v + _GOLDEN) & _MASK64))
    return h


class TrialOutcome(NamedTuple):
    epsilon_hat: float
    phn_error: float


@dataclass
class McRow:
    snr_db: float
    n_p: int
    trials: int
    mse: float
    mean_error: float
    var_error: float
    mean_phn_error: float

    def as_tuple(self) -> tuple:
        return (self.snr_db, self.n_p, self.trials, self.mse, self.mean_error, self.var_error, self.mean_phn_error)


@dataclass
class McResult:
    rows: list[McRow] = field(default_factory=list)
    # per-point raw frequency errors in trial order, keyed by (snr_db, n_p)
    errors: dict = field(default_factory=dict, repr=False)

    def row(self, snr_db: float, n_p: int) -> McRow:
        for r in self.rows:
            if r.snr_db == snr_db and r.n_p == n_p:
                return r
        raise KeyError((snr_db, n_p))

    def mse_stderr(self, snr_db: float, n_p: int) -> float:
        """Standard error of the MSE estimate at one sweep point."""
        e2 = np.asarray(self.errors[(snr_db, n_p)]) ** 2
        return float(np.std(e2, ddof=1) / np.sqrt(e2.size)) if e2.size > 1 else float("inf")


def _wrap(x):
    return (np.asarray(x) + np.pi) % (2 * np.pi) - np.pi


def _index_of(values, v, name) -> int:
    try:
        return list(values).index(v)
    except ValueError:
        raise ConfigError(f"{name} {v!r} is not in the configured sweep") from None


def run_trial(config: McConfig, trial_index: int, snr_db: float, n_p: int) -> TrialOutcome:
    """Simulate one frame and estimate it.

    Returns the frame-mean frequency estimate and the mean wrapped
    phase-noise error over pilot-bearing symbols (NaN for Moose).
    """
    si = _index_of(config.snr_db_list, snr_db, "snr_db")
    pi = _index_of(config.n_p_list, n_p, "n_p")
    rng = np.random.default_rng(trial_seed(config.seed, si, pi, trial_index))

    params = config.params
    geometry = config.geometry(n_p)
    lattice = gen_pattern(config.pattern, params, geometry)
    channel = config.channel_model()

    grid = random_grid(params, config.constellation_spec(), rng, lattice)
    if config.estimator is Estimator.MOOSE:
        preamble = QPSK_POINTS[rng.integers(0, 4, size=params.n)]
        grid.symbols[0] = preamble
        grid.symbols[1] = preamble

    faded, H = apply_channel(grid, channel, params, rng)
    frame = modulate_frame(faded, params)
    frame = apply_cfo(frame, config.epsilon, params)
    state = ImpairmentState(config.epsilon, config.phn_sigma2, snr_db=snr_db, channel=channel)
    frame = apply_phn(frame, state, rng)
    frame = apply_awgn(frame, snr_db, rng)

    if config.estimator is Estimator.MOOSE:
        eps = estimate_cfo_moose(frame.body[0], frame.body[1])
        return TrialOutcome(eps, float("nan"))

    records = estimate_frame(
        frame,
        lattice,
        geometry,
        params,
        mode=config.mode,
        known=(grid, H),
        estimator=config.estimator,
        gamma=config.gamma,
    )
    eps = float(np.mean([r.epsilon_hat for r in records]))
    direct = [r for r in records if not r.interpolated]
    phn_err = _wrap([r.phn_hat - state.phn_trajectory[r.symbol_index] for r in direct])
    return TrialOutcome(eps, float(np.mean(phn_err)))


def _run_block(config: McConfig, snr_db: float, n_p: int, start: int, stop: int) -> np.ndarray:
    out = np.empty((stop - start, 2))
    for j, t in enumerate(range(start, stop)):
        try:
            out[j] = run_trial(config, t, snr_db, n_p)
        except Exception as exc:
            raise RuntimeError(f"trial failed at snr_db={snr_db}, n_p={n_p}, trial={t}: {exc}") from exc
    return out


def _summarise(snr_db: float, n_p: int, epsilon: float, outcomes: np.ndarray) -> tuple[McRow, np.ndarray]:
    err = outcomes[:, 0] - epsilon
    mean = float(np.mean(err))
    var = float(np.mean((err - mean) ** 2))
    mse = float(np.mean(err**2))
    phn = float(np.mean(outcomes[:, 1]))
    return McRow(snr_db, n_p, len(err), mse, mean, var, phn), err


def run_sweep(config: McConfig, workers: Optional[int] = 1, block: int = 250) -> McResult:
    """Run every (snr_db, n_p) point of ``config``.

    ``workers=1`` runs in-process; ``None`` uses one process per CPU. The
    result is identical for any worker count.
    """
    config.validate()
    points = [(s, p) for s in config.snr_db_list for p in config.n_p_list]
    tasks = [
        (s, p, start, min(start + block, config.trials))
        for s, p in points
        for start in range(0, config.trials, block)
    ]
    if workers is None:
        workers = os.cpu_count() or 1

    if workers <= 1:
        blocks = [_run_block(config, *t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_block, config, *t) for t in tasks]
            blocks = [f.result() for f in futures]

    result = McResult()
    it = iter(blocks)
    n_blocks = len(range(0, config.trials, block))
    for s, p in points:
        outcomes = np.concatenate([next(it) for _ in range(n_blocks)])
        row, err = _summarise(s, p, config.epsilon, outcomes)
        result.rows.append(row)
        result.errors[(s, p)] = err
        logger.info("snr_db=%s n_p=%d mse=%.3e", s, p, row.mse)
    return result
