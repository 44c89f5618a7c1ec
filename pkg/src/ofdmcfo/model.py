"""
Domain types shared across the toolkit.

All containers are plain dataclasses around numpy arrays. They do not
validate themselves on construction; call :func:`validate` on a
``(OfdmParams, PilotGeometry)`` pair before running anything that depends
on the joint constraints.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class ValidationError(ValueError):
    """Raised when parameters violate a type or joint invariant."""


class PilotPattern(str, enum.Enum):
    BLOCK = "block"
    COMB = "comb"
    RECTANGULAR = "rectangular"
    HEXAGONAL = "hexagonal"
    PARALLELOGRAM = "parallelogram"
    DIAMOND = "diamond"


@dataclass(frozen=True)
class OfdmParams:
    """Static link dimensions: ``n`` subcarriers, ``cp_len`` prefix samples,
    ``l_symbols`` OFDM symbols per frame."""

    n: int = 64
    cp_len: int = 16
    l_symbols: int = 8

    @property
    def symbol_len(self) -> int:
        return self.cp_len + self.n


@dataclass(frozen=True)
class PilotGeometry:
    """Pilot observation layout.

    ``delta_t`` and ``n_p`` describe where the phase observations sit inside
    a symbol body (sample ``i * delta_t`` for ``i < n_p``). ``x1`` and ``y2``
    are the lattice intervals in the symbol and subcarrier directions.
    """

    delta_t: int = 8
    n_p: int = 8
    pattern: PilotPattern = PilotPattern.RECTANGULAR
    x1: int = 4
    y2: int = 8

    def __post_init__(self):
        # accept plain strings for the pattern
        object.__setattr__(self, "pattern", PilotPattern(self.pattern))


@dataclass
class FreqGrid:
    """Frequency-domain symbols ``S_l(k)`` with shape ``(L, N)``.

    ``pilot_mask`` marks cells holding known pilot values (None if unknown).
    """

    symbols: np.ndarray
    pilot_mask: Optional[np.ndarray] = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.symbols.shape


@dataclass
class TimeFrame:
    """Time-domain samples, one row of ``cp_len + n`` samples per symbol."""

    samples: np.ndarray
    cp_len: int
    has_cp: bool = True

    @property
    def body(self) -> np.ndarray:
        """Samples with the cyclic prefix stripped, shape ``(L, N)``."""
        if not self.has_cp:
            return self.samples
        return self.samples[:, self.cp_len :]

    @property
    def n_symbols(self) -> int:
        return self.samples.shape[0]

    def copy(self) -> "TimeFrame":
        return TimeFrame(self.samples.copy(), self.cp_len, self.has_cp)


@dataclass(frozen=True)
class EstimateRecord:
    symbol_index: int
    epsilon_hat: float
    c_hat: float
    phn_hat: float
    interpolated: bool = field(default=False, compare=False)

    def __post_init__(self):
        for name in ("epsilon_hat", "c_hat", "phn_hat"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} is not finite")


def _is_power_of_two(x: int) -> bool:
    return x >= 1 and (x & (x - 1)) == 0


def validate(params: OfdmParams, geometry: Optional[PilotGeometry] = None) -> None:
    """Check every invariant of ``params`` and ``geometry`` jointly.

    Raises
    ------
    ValidationError
        Listing each violated constraint, separated by ``"; "``.
    """
    problems = []
    if params.n < 2 or not _is_power_of_two(params.n):
        problems.append(f"n must be a power of two >= 2 (got {params.n})")
    if params.cp_len < 0:
        problems.append(f"cp_len >= 0 violated (got {params.cp_len})")
    if params.cp_len >= params.n:
        problems.append(f"cp_len < n violated ({params.cp_len} >= {params.n})")
    if params.l_symbols < 1:
        problems.append(f"l_symbols >= 1 violated (got {params.l_symbols})")

    if geometry is not None:
        g = geometry
        if g.delta_t < 1:
            problems.append(f"delta_t >= 1 violated (got {g.delta_t})")
        if g.n_p < 1:
            problems.append(f"n_p >= 1 violated (got {g.n_p})")
        if g.x1 < 1:
            problems.append(f"x1 >= 1 violated (got {g.x1})")
        if g.y2 < 1:
            problems.append(f"y2 >= 1 violated (got {g.y2})")
        if g.n_p >= 1 and (g.n_p - 1) * g.delta_t >= params.n:
            problems.append(
                "pilot indices exceed symbol: "
                f"(n_p-1)*delta_t = {(g.n_p - 1) * g.delta_t} >= n = {params.n}"
            )

    if problems:
        raise ValidationError("; ".join(problems))


def pilot_time_indices(geometry: PilotGeometry) -> np.ndarray:
    """Body sample indices ``k * delta_t`` for ``k = 0 .. n_p - 1``."""
    return np.arange(geometry.n_p, dtype=np.int64) * geometry.delta_t


def unambiguous_range(params: OfdmParams, geometry: PilotGeometry) -> float:
    """Largest |epsilon| whose per-pilot phase step stays below pi."""
    return params.n / (2.0 * geometry.delta_t)
