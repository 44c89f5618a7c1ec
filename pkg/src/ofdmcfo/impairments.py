"""
Channel and oscillator impairments applied to OFDM frames.

The CFO rotation uses a sample counter that ignores the cyclic prefix:
the body of symbol ``l`` starts at counter ``l * N`` and its prefix occupies
``[l*N - cp_len, l*N)``. The per-symbol phase advance is therefore exactly
``2*pi*epsilon``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import FreqGrid, OfdmParams, TimeFrame, ValidationError

logger = logging.getLogger(__name__)


class ChannelKind(str, enum.Enum):
    IDENTITY = "identity"
    STATIC_TAPS = "static_taps"
    BLOCK_RAYLEIGH = "block_rayleigh"


@dataclass
class ChannelModel:
    """Multipath model.

    For ``block_rayleigh`` the squared tap magnitudes act as the power delay
    profile and ``rho`` is the correlation of each tap between consecutive
    symbols. The sampled spectra are only used for moment computations.
    """

    kind: ChannelKind = ChannelKind.IDENTITY
    taps: np.ndarray = field(default_factory=lambda: np.array([1.0 + 0j]))
    rho: float = 0.9
    doppler_spectrum: Optional[np.ndarray] = None
    power_profile: Optional[np.ndarray] = None

    def __post_init__(self):
        self.kind = ChannelKind(self.kind)
        self.taps = np.atleast_1d(np.asarray(self.taps, dtype=complex))
        if not 0.0 <= self.rho <= 1.0:
            raise ValidationError(f"rho must lie in [0, 1] (got {self.rho})")


@dataclass
class ImpairmentState:
    epsilon: float = 0.0
    phn_sigma2: float = 0.0
    phn_trajectory: Optional[np.ndarray] = None
    snr_db: float = math.inf
    channel: ChannelModel = field(default_factory=ChannelModel)

    def __post_init__(self):
        if self.phn_sigma2 < 0:
            raise ValidationError("phn_sigma2 must be non-negative")


def cfo_counter(params: OfdmParams, n_symbols: int) -> np.ndarray:
    """Sample counter ``n + l*N`` for every sample of the frame, CP included."""
    n = np.arange(-params.cp_len, params.n)[None, :]
    l = np.arange(n_symbols)[:, None]
    return n + l * params.n


def apply_cfo(frame: TimeFrame, epsilon: float, params: OfdmParams) -> TimeFrame:
    """Multiply every sample by ``exp(j*2*pi*epsilon*(n + l*N)/N)``."""
    if epsilon == 0:
        return frame.copy()
    counter = cfo_counter(params, frame.n_symbols)
    if not frame.has_cp:
        counter = counter[:, params.cp_len :]
    rot = np.exp(2j * np.pi * epsilon * counter / params.n)
    return TimeFrame(frame.samples * rot, frame.cp_len, frame.has_cp)


def wiener_phase(n_symbols: int, sigma2: float, seed=None) -> np.ndarray:
    """Per-symbol random walk starting from zero before symbol 0."""
    rng = np.random.default_rng(seed)
    if sigma2 == 0:
        return np.zeros(n_symbols)
    return np.cumsum(rng.normal(0.0, math.sqrt(sigma2), size=n_symbols))


def apply_phn(frame: TimeFrame, state: ImpairmentState, seed=None) -> TimeFrame:
    """Rotate symbol ``l`` by the symbol-constant angle ``phi_PHN(l)``.

    Draws a Wiener trajectory into ``state.phn_trajectory`` when none is set.
    """
    if state.phn_trajectory is None:
        state.phn_trajectory = wiener_phase(frame.n_symbols, state.phn_sigma2, seed)
    traj = np.asarray(state.phn_trajectory, dtype=float)
    if traj.shape != (frame.n_symbols,):
        raise ValidationError(
            f"phase-noise trajectory has {traj.size} entries, frame has {frame.n_symbols} symbols"
        )
    if not np.any(traj):
        return frame.copy()
    return TimeFrame(frame.samples * np.exp(1j * traj)[:, None], frame.cp_len, frame.has_cp)


def apply_awgn(frame: TimeFrame, snr_db: float, seed=None) -> TimeFrame:
    """Add circular complex Gaussian noise at ``snr_db`` per complex sample.

    Noise variance is the measured mean sample power divided by the linear
    SNR. ``snr_db = inf`` returns the frame unchanged.
    """
    if math.isinf(snr_db) and snr_db > 0:
        return frame.copy()
    power = float(np.mean(np.abs(frame.samples) ** 2)) if frame.samples.size else 0.0
    if power == 0.0:
        raise ValidationError("undefined signal power: frame is all zeros")
    rng = np.random.default_rng(seed)
    var = power / 10.0 ** (snr_db / 10.0)
    noise = rng.standard_normal(frame.samples.shape) + 1j * rng.standard_normal(frame.samples.shape)
    return TimeFrame(frame.samples + noise * math.sqrt(var / 2.0), frame.cp_len, frame.has_cp)


def _rayleigh_taps(profile: np.ndarray, n_symbols: int, rho: float, rng) -> np.ndarray:
    scale = np.sqrt(profile / 2.0)

    def draw():
        return (rng.standard_normal(profile.size) + 1j * rng.standard_normal(profile.size)) * scale

    taps = np.empty((n_symbols, profile.size), dtype=complex)
    taps[0] = draw()
    innov = math.sqrt(1.0 - rho * rho)
    for l in range(1, n_symbols):
        taps[l] = rho * taps[l - 1] + innov * draw()
    return taps


def apply_channel(
    grid: FreqGrid, channel: ChannelModel, params: OfdmParams, seed=None
) -> tuple[FreqGrid, np.ndarray]:
    """Multiply each subcarrier by the channel response.

    Returns the faded grid and the realised ``H`` with shape ``(L, N)``.
    ``H(k)`` is the unnormalised DFT of the taps, so a unit tap at delay
    ``d`` gives ``exp(-j*2*pi*k*d/N)``.
    """
    L, N = grid.symbols.shape
    if channel.kind is ChannelKind.IDENTITY:
        return FreqGrid(grid.symbols.copy(), grid.pilot_mask), np.ones((L, N), dtype=complex)

    if channel.taps.size > max(params.cp_len, 1):
        raise ValidationError(
            f"channel has {channel.taps.size} taps but cp_len is {params.cp_len}"
        )
    if channel.kind is ChannelKind.STATIC_TAPS:
        H = np.broadcast_to(np.fft.fft(channel.taps, N), (L, N)).copy()
    else:
        rng = np.random.default_rng(seed)
        taps = _rayleigh_taps(np.abs(channel.taps) ** 2, L, channel.rho, rng)
        H = np.fft.fft(taps, N, axis=1)
    return FreqGrid(grid.symbols * H, grid.pilot_mask), H


def spectrum_moment4(density, w=None, atol: float = 1e-3) -> float:
    """Fourth moment ``(1/2pi) * integral w**4 S(w) dw`` over ``[-pi, pi]``.

    ``density`` is sampled on a uniform grid covering ``[-pi, pi]`` end to
    end (at least 4096 points) and must integrate to one in the same
    ``1/2pi`` normalisation. Trapezoid rule.
    """
    s = np.asarray(density, dtype=float)
    if s.ndim != 1 or s.size < 4096:
        raise ValidationError(f"need at least 4096 spectrum samples (got {s.size})")
    if w is None:
        w = np.linspace(-np.pi, np.pi, s.size)
    else:
        w = np.asarray(w, dtype=float)
        if w.shape != s.shape:
            raise ValidationError("frequency grid and spectrum differ in length")
        step = np.diff(w)
        if not (np.isclose(w[0], -np.pi) and np.isclose(w[-1], np.pi)):
            raise ValidationError("frequency grid must span [-pi, pi]")
        if not np.allclose(step, step[0], rtol=1e-6, atol=1e-12):
            raise ValidationError("frequency grid must be uniform")
    mass = np.trapezoid(s, w) / (2 * np.pi)
    if abs(mass - 1.0) > atol:
        raise ValidationError(f"spectrum is not a normalised density (mass {mass:.6g})")
    return float(np.trapezoid(w**4 * s, w) / (2 * np.pi))
