"""
OFDM modulator and receiver front-end.

Both directions use the unitary DFT (``1/sqrt(N)`` on each side), so symbol
energy is the same in the time and frequency domains.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import FreqGrid, OfdmParams, TimeFrame, ValidationError
from .pilots import PilotLattice

QPSK_POINTS = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]) / np.sqrt(2.0)
BPSK_POINTS = np.array([1 + 0j, -1 + 0j])


class Constellation(str, enum.Enum):
    QPSK = "qpsk"
    BPSK = "bpsk"
    KNOWN_UNIT = "known_unit"


@dataclass(frozen=True)
class ConstellationSpec:
    """How :func:`random_grid` fills the grid.

    Data cells are drawn from ``kind``. Lattice cells receive
    ``pilot_value``. When ``pilot_symbol_data`` is False, the non-pilot
    cells of pilot-bearing symbols are left empty, so those symbols carry
    nothing but known pilots.
    """

    kind: Constellation = Constellation.QPSK
    pilot_value: complex = 1 + 0j
    pilot_symbol_data: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", Constellation(self.kind))
        if not np.isclose(abs(self.pilot_value), 1.0):
            raise ValidationError("pilot_value must have unit magnitude")


def _check_grid(grid: FreqGrid, params: OfdmParams) -> None:
    if grid.symbols.shape != (params.l_symbols, params.n):
        raise ValidationError(
            f"grid shape {grid.symbols.shape} does not match "
            f"(l_symbols, n) = {(params.l_symbols, params.n)}"
        )


def modulate_frame(grid: FreqGrid, params: OfdmParams) -> TimeFrame:
    """Unitary inverse DFT per symbol, then prepend the cyclic prefix."""
    _check_grid(grid, params)
    body = np.fft.ifft(grid.symbols, axis=1, norm="ortho")
    if params.cp_len:
        samples = np.concatenate([body[:, -params.cp_len :], body], axis=1)
    else:
        samples = body
    return TimeFrame(samples, params.cp_len, has_cp=True)


def demodulate_frame(frame: TimeFrame, params: OfdmParams) -> FreqGrid:
    if not frame.has_cp:
        raise ValidationError("demodulate_frame expects a frame with its cyclic prefix")
    expected = (params.l_symbols, params.symbol_len)
    if frame.samples.shape != expected or frame.cp_len != params.cp_len:
        raise ValidationError(
            f"frame shape {frame.samples.shape} (cp_len={frame.cp_len}) "
            f"does not match {expected} (cp_len={params.cp_len})"
        )
    return FreqGrid(np.fft.fft(frame.body, axis=1, norm="ortho"))


def random_grid(
    params: OfdmParams,
    spec: ConstellationSpec = ConstellationSpec(),
    seed=None,
    lattice: Optional[PilotLattice] = None,
) -> FreqGrid:
    """Draw a frame of random data symbols and place pilots.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    rng = np.random.default_rng(seed)
    shape = (params.l_symbols, params.n)
    if spec.kind is Constellation.QPSK:
        symbols = QPSK_POINTS[rng.integers(0, 4, size=shape)]
    elif spec.kind is Constellation.BPSK:
        symbols = BPSK_POINTS[rng.integers(0, 2, size=shape)]
    else:
        symbols = np.ones(shape, dtype=complex)

    mask = None
    if lattice is not None:
        mask = lattice.mask(params)
        if not spec.pilot_symbol_data:
            pilot_rows = mask.any(axis=1)
            symbols[pilot_rows] = 0
        symbols[mask] = spec.pilot_value
    return FreqGrid(symbols, mask)
