"""
Pilot lattices over the L x N time-frequency grid and the isotropy rule
linking the symbol interval ``x1`` to the subcarrier interval ``y2``.

Every pattern is parameterised by the same ``(x1, y2)`` pair:

- block: every subcarrier of symbols ``l % x1 == 0``
- comb: subcarriers ``k % y2 == 0`` in every symbol
- rectangular: ``l % x1 == 0`` and ``k % y2 == 0``
- hexagonal, diamond: rectangular, with every other pilot row shifted by
  ``y2 // 2`` (a quincunx; the two differ only by the x1/y2 aspect ratio
  the caller picks)
- parallelogram: pilot row ``j = l // x1`` shifted by ``j * (y2 // 2)``
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import OfdmParams, PilotGeometry, PilotPattern, ValidationError


@dataclass
class PilotLattice:
    """Pilot cells as an ``(M, 2)`` integer array of ``(l, k)`` rows, sorted."""

    points: np.ndarray
    kind: PilotPattern
    l_symbols: int
    n: int

    @property
    def density(self) -> float:
        return len(self.points) / float(self.l_symbols * self.n)

    def mask(self, params: OfdmParams | None = None) -> np.ndarray:
        shape = (self.l_symbols, self.n)
        if params is not None and (params.l_symbols, params.n) != shape:
            raise ValidationError(f"lattice is {shape}, params ask for {(params.l_symbols, params.n)}")
        m = np.zeros(shape, dtype=bool)
        if len(self.points):
            m[self.points[:, 0], self.points[:, 1]] = True
        return m

    def as_set(self) -> set[tuple[int, int]]:
        return {(int(l), int(k)) for l, k in self.points}


def _from_mask(mask: np.ndarray, kind: PilotPattern) -> PilotLattice:
    pts = np.argwhere(mask).astype(np.int64)
    return PilotLattice(pts, kind, mask.shape[0], mask.shape[1])


def gen_pattern(kind, params: OfdmParams, geometry: PilotGeometry) -> PilotLattice:
    try:
        kind = PilotPattern(kind)
    except ValueError:
        raise ValidationError(f"unknown pilot pattern {kind!r}") from None

    L, N = params.l_symbols, params.n
    x1, y2 = geometry.x1, geometry.y2
    l = np.arange(L)[:, None]
    k = np.arange(N)[None, :]
    row = l % x1 == 0
    pilot_row_index = l // x1

    if kind is PilotPattern.BLOCK:
        mask = np.broadcast_to(row, (L, N))
    elif kind is PilotPattern.COMB:
        mask = np.broadcast_to(k % y2 == 0, (L, N))
    elif kind is PilotPattern.RECTANGULAR:
        mask = row & (k % y2 == 0)
    elif kind in (PilotPattern.HEXAGONAL, PilotPattern.DIAMOND):
        offset = (pilot_row_index % 2) * (y2 // 2)
        mask = row & ((k - offset) % y2 == 0)
    else:  # parallelogram
        offset = (pilot_row_index * (y2 // 2)) % N
        mask = row & ((k - offset) % y2 == 0)
    return _from_mask(np.array(mask, dtype=bool), kind)


def pilot_bearing_symbols(lattice: PilotLattice) -> list[int]:
    if len(lattice.points) == 0:
        return []
    return sorted({int(l) for l in lattice.points[:, 0]})


def analytic_density(kind, geometry: PilotGeometry) -> float:
    kind = PilotPattern(kind)
    if kind is PilotPattern.BLOCK:
        return 1.0 / geometry.x1
    if kind is PilotPattern.COMB:
        return 1.0 / geometry.y2
    return 1.0 / (geometry.x1 * geometry.y2)


def isotropy_gap(x1: float, y2: float, m1: float, m2: float) -> float:
    """Signed residual ``m1*x1**4 - m2*y2**4``; zero when the lattice is
    balanced against the Doppler (m1) and delay (m2) fourth moments."""
    if m1 < 0 or m2 < 0:
        raise ValidationError("fourth moments must be non-negative")
    return m1 * x1**4 - m2 * y2**4


def solve_y2(x1: float, m1: float, m2: float) -> tuple[float, int]:
    """Subcarrier interval that zeroes :func:`isotropy_gap` for a given ``x1``.

    Returns the real solution and the lattice value, rounded down (denser
    in frequency) and clamped to at least 1.
    """
    if m2 <= 0:
        raise ValidationError("m2 must be positive to solve for y2")
    if m1 < 0:
        raise ValidationError("m1 must be non-negative")
    real = (m1 / m2) ** 0.25 * x1
    # guard against 3.9999999 from the fourth root
    return real, max(1, int(np.floor(real + 1e-9)))
