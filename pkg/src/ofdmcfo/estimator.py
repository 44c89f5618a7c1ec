"""
Frequency-offset and phase-noise estimation from pilot phases.

The pilot phases of one symbol follow a straight line in the pilot index
``i``::

    theta(i) = A*i + C(l) + disturbance,   A = 2*pi*eps*delta_t/N,
                                          C(l) = 2*pi*eps*l + phi_PHN(l)

so the slope gives the frequency offset and the intercept, once the
accumulated ``2*pi*eps*l`` is removed, gives the symbol's phase noise.
Pilot indices start at zero throughout.

Two observation modes are supported. ``paper`` takes the raw sample phase
and leaves the transmitted-signal phase in as a disturbance. ``known_signal``
removes the exact noiseless phase of the transmitted samples, which needs
the transmitted grid and the realised channel.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .model import (
    EstimateRecord,
    FreqGrid,
    OfdmParams,
    PilotGeometry,
    TimeFrame,
    ValidationError,
    pilot_time_indices,
    unambiguous_range,
)
from .pilots import PilotLattice, pilot_bearing_symbols

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


class Mode(str, enum.Enum):
    PAPER = "paper"
    KNOWN_SIGNAL = "known_signal"


class Estimator(str, enum.Enum):
    SUM = "sum"
    REGRESSION = "regression"
    MOOSE = "moose"


@dataclass
class PhaseSeries:
    theta: np.ndarray
    symbol_index: int = 0
    unwrapped: bool = False

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        if self.theta.ndim != 1 or self.theta.size < 1:
            raise ValidationError("phase series needs at least one value")
        if not np.all(np.isfinite(self.theta)):
            raise ValidationError("phase series contains non-finite values")

    @property
    def n_p(self) -> int:
        return self.theta.size


@dataclass(frozen=True)
class RegressionFit:
    a_hat: float
    c_hat: float

    def residuals(self, series: PhaseSeries) -> np.ndarray:
        i = np.arange(series.n_p)
        return series.theta - self.a_hat * i - self.c_hat


def known_reference(grid: FreqGrid, H: Optional[np.ndarray], l: int) -> np.ndarray:
    """Noiseless body of symbol ``l`` as transmitted through ``H``."""
    row = grid.symbols[l] if H is None else grid.symbols[l] * H[l]
    return np.fft.ifft(row, norm="ortho")


def extract_phase_series(
    frame: TimeFrame,
    l: int,
    geometry: PilotGeometry,
    mode=Mode.PAPER,
    known: Optional[tuple[FreqGrid, Optional[np.ndarray]]] = None,
) -> PhaseSeries:
    """Raw (wrapped) pilot phases of symbol ``l`` at body samples ``i*delta_t``."""
    mode = Mode(mode)
    if not 0 <= l < frame.n_symbols:
        raise ValidationError(f"symbol {l} not in frame of {frame.n_symbols} symbols")
    idx = pilot_time_indices(geometry)
    body = frame.body[l]
    if idx[-1] >= body.size:
        raise ValidationError("pilot indices exceed symbol")
    r = body[idx]

    if mode is Mode.KNOWN_SIGNAL:
        if known is None:
            raise ValidationError("known_signal mode needs the transmitted grid and channel")
        grid, H = known
        ref = known_reference(grid, H, l)[idx]
        zero = np.flatnonzero(ref == 0)
        if zero.size:
            raise ValidationError(f"reference sample at pilot index {int(zero[0])} is zero")
        r = r * np.conj(ref)

    zero = np.flatnonzero(r == 0)
    if zero.size:
        raise ValidationError(f"received sample at pilot index {int(zero[0])} is zero; phase undefined")
    return PhaseSeries(np.angle(r), symbol_index=l)


def unwrap(series: PhaseSeries) -> PhaseSeries:
    """Remove 2*pi jumps so consecutive differences land in ``(-pi, pi]``."""
    theta = series.theta
    if theta.size > 1:
        d = np.diff(theta)
        turns = np.ceil((d - np.pi) / TWO_PI)
        if np.any(turns):
            theta = theta.copy()
            theta[1:] -= TWO_PI * np.cumsum(turns)
    return PhaseSeries(theta, series.symbol_index, unwrapped=True)


def estimate_cfo_sum(series: PhaseSeries, l: int, geometry: PilotGeometry, params: OfdmParams) -> float:
    """Phase-sum estimator; assumes no phase noise.

    Uses the absolute accumulated phase ``2*pi*eps*l``, so it only works
    while ``|eps*l| < 1/2``.
    """
    n_p, dt, N = series.n_p, geometry.delta_t, params.n
    denom = np.pi * n_p * (dt * (n_p - 1) + 2 * l * N)
    if denom == 0:
        raise ValidationError("estimator undefined: n_p = 1 and l = 0")
    return float(N * np.sum(series.theta) / denom)


def fit_phase_line(series: PhaseSeries) -> RegressionFit:
    """Closed-form least-squares line through ``(i, theta(i))``."""
    n_p = series.n_p
    if n_p < 2:
        raise ValidationError("regression needs n_p >= 2")
    theta = series.theta
    i = np.arange(n_p)
    s0 = np.sum(theta)
    s1 = np.dot(i, theta)
    a = 12.0 / ((n_p - 1) * n_p * (n_p + 1)) * (s1 - (n_p - 1) / 2.0 * s0)
    c = s0 / n_p - (n_p - 1) / 2.0 * a
    return RegressionFit(float(a), float(c))


def ls_oracle(series: PhaseSeries) -> RegressionFit:
    """Solve the 2x2 normal equations by explicit inversion.

    Kept deliberately independent of :func:`fit_phase_line`.
    """
    n_p = series.n_p
    if n_p < 2:
        raise ValidationError("regression needs n_p >= 2")
    sii = sit = si = st = 0.0
    for i, t in enumerate(series.theta.tolist()):
        sii += i * i
        si += i
        sit += i * t
        st += t
    det = sii * n_p - si * si
    if det == 0:
        raise ValidationError("singular normal equations")
    a = (n_p * sit - si * st) / det
    c = (sii * st - si * sit) / det
    return RegressionFit(a, c)


def estimate_cfo_regression(series: PhaseSeries, geometry: PilotGeometry, params: OfdmParams) -> float:
    fit = fit_phase_line(series)
    return slope_to_epsilon(fit.a_hat, geometry, params)


def slope_to_epsilon(a_hat: float, geometry: PilotGeometry, params: OfdmParams) -> float:
    return float(a_hat * params.n / (TWO_PI * geometry.delta_t))


def estimate_phn(
    fit: RegressionFit, epsilon_hat: float, l: int, geometry: PilotGeometry, params: OfdmParams
) -> float:
    """Phase noise of symbol ``l``: intercept minus the accumulated CFO phase."""
    return float(fit.c_hat - TWO_PI * epsilon_hat * l)


def interpolate_cfo(eps_l: float, eps_l_plus_x1: float, delta: float, x1: float) -> float:
    """Linear interpolation at ``delta`` symbols past a pilot-bearing symbol."""
    if not 0 < delta < x1:
        raise ValidationError(f"delta must satisfy 0 < delta < x1 (got {delta}, {x1})")
    w = delta / x1
    out = (1.0 - w) * eps_l + w * eps_l_plus_x1
    return float(min(max(out, min(eps_l, eps_l_plus_x1)), max(eps_l, eps_l_plus_x1)))


def smooth_cfo(eps_sequence: Sequence[float], gamma: float) -> np.ndarray:
    """Three-tap smoother ``(e[l] + g*e[l-1] + g*e[l+1]) / (1 + 2g)``.

    End points use the single neighbour they have, ``(e[0] + g*e[1]) / (1+g)``.
    """
    eps = np.asarray(eps_sequence, dtype=float)
    if eps.size == 0:
        raise ValidationError("cannot smooth an empty sequence")
    if gamma < 0:
        raise ValidationError("gamma must be non-negative")
    if gamma == 0 or eps.size == 1:
        return eps.copy()
    num = eps.copy()
    wsum = np.ones_like(eps)
    num[1:] += gamma * eps[:-1]
    num[:-1] += gamma * eps[1:]
    wsum[1:] += gamma
    wsum[:-1] += gamma
    out = num / wsum
    # rounding can push a constant sequence off by an ulp; clamp to the input hull
    return np.clip(out, eps.min(), eps.max())


def estimate_cfo_moose(sym_a: np.ndarray, sym_b: np.ndarray) -> float:
    """Repeated-symbol correlation estimator, unambiguous for ``|eps| < 1/2``."""
    a = np.asarray(sym_a)
    b = np.asarray(sym_b)
    if a.shape != b.shape:
        raise ValidationError("Moose symbols must have equal length")
    corr = np.sum(b * np.conj(a))
    if corr == 0:
        raise ValidationError("zero correlation between repeated symbols")
    return float(np.angle(corr) / TWO_PI)


def _direct_estimate(
    frame: TimeFrame,
    l: int,
    geometry: PilotGeometry,
    params: OfdmParams,
    mode: Mode,
    known,
    estimator: Estimator,
) -> EstimateRecord:
    series = unwrap(extract_phase_series(frame, l, geometry, mode, known))
    if estimator is Estimator.SUM:
        eps = estimate_cfo_sum(series, l, geometry, params)
        a = eps * TWO_PI * geometry.delta_t / params.n
        c = float(np.mean(series.theta) - (series.n_p - 1) / 2.0 * a)
        fit = RegressionFit(a, c)
    else:
        fit = fit_phase_line(series)
        eps = slope_to_epsilon(fit.a_hat, geometry, params)
    phn = estimate_phn(fit, eps, l, geometry, params)
    return EstimateRecord(l, eps, fit.c_hat, phn)


def estimate_frame(
    frame: TimeFrame,
    lattice: PilotLattice,
    geometry: PilotGeometry,
    params: OfdmParams,
    mode=Mode.PAPER,
    known: Optional[tuple[FreqGrid, Optional[np.ndarray]]] = None,
    estimator=Estimator.REGRESSION,
    gamma: float = 0.0,
) -> list[EstimateRecord]:
    """One :class:`EstimateRecord` per symbol of ``frame``.

    Pilot-bearing symbols are estimated directly (then optionally smoothed
    across neighbouring pilot-bearing symbols with ``gamma``). Symbols in
    between are linearly interpolated; symbols before the first or after the
    last pilot-bearing symbol hold the nearest direct estimate.
    """
    mode, estimator = Mode(mode), Estimator(estimator)
    if estimator is Estimator.MOOSE:
        raise ValidationError("Moose works on a repeated preamble, use estimate_cfo_moose")
    pilots = [l for l in pilot_bearing_symbols(lattice) if l < frame.n_symbols]
    if not pilots:
        raise ValidationError("lattice has no pilot-bearing symbols in this frame")

    direct = [_direct_estimate(frame, l, geometry, params, mode, known, estimator) for l in pilots]
    eps = np.array([r.epsilon_hat for r in direct])
    phn = np.array([r.phn_hat for r in direct])
    c_hat = np.array([r.c_hat for r in direct])
    if gamma > 0:
        eps = smooth_cfo(eps, gamma)
        phn = smooth_cfo(phn, gamma)
        c_hat = phn + TWO_PI * eps * np.asarray(pilots)

    limit = unambiguous_range(params, geometry)
    if estimator is Estimator.REGRESSION and np.any(np.abs(eps) > limit):
        raise ValidationError(f"estimate outside unambiguous range |eps| <= {limit}")
    if np.any(np.abs(eps) >= limit):
        logger.warning("frequency estimate at or beyond the unambiguous range %g", limit)

    records: list[EstimateRecord] = []
    for l in range(frame.n_symbols):
        j = int(np.searchsorted(pilots, l))
        if j < len(pilots) and pilots[j] == l:
            records.append(EstimateRecord(l, float(eps[j]), float(c_hat[j]), float(phn[j])))
            continue
        if j == 0:
            e, p = eps[0], phn[0]
        elif j == len(pilots):
            e, p = eps[-1], phn[-1]
        else:
            lo, hi = pilots[j - 1], pilots[j]
            e = interpolate_cfo(eps[j - 1], eps[j], l - lo, hi - lo)
            p = interpolate_cfo(phn[j - 1], phn[j], l - lo, hi - lo)
        records.append(
            EstimateRecord(l, float(e), float(p + TWO_PI * e * l), float(p), interpolated=True)
        )
    return records
