"""Forward-model helpers shared by estimator and acceptance tests."""

import numpy as np

from ofdmcfo import (
    ChannelModel,
    ImpairmentState,
    OfdmParams,
    apply_awgn,
    apply_cfo,
    apply_channel,
    apply_phn,
    modulate_frame,
    random_grid,
)


def forward(params: OfdmParams, epsilon, trajectory=None, snr_db=np.inf, channel=None, seed=0, lattice=None):
    """Random QPSK frame through channel, CFO, phase noise and noise.

    Returns ``(frame, grid, H)``.
    """
    rng = np.random.default_rng(seed)
    grid = random_grid(params, seed=rng, lattice=lattice)
    faded, H = apply_channel(grid, channel or ChannelModel(), params, rng)
    frame = apply_cfo(modulate_frame(faded, params), epsilon, params)
    if trajectory is not None:
        frame = apply_phn(frame, ImpairmentState(phn_trajectory=np.asarray(trajectory, float)))
    frame = apply_awgn(frame, snr_db, rng)
    return frame, grid, H


def wrap(x):
    return (np.asarray(x) + np.pi) % (2 * np.pi) - np.pi
