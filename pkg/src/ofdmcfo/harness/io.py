"""CSV reports and raw cf32 IQ files."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

import numpy as np

from ..model import EstimateRecord, OfdmParams, TimeFrame, ValidationError

CSV_HEADER = ("snr_db", "n_p", "trials", "mse", "mean_error", "var_error", "mean_phn_error")
RECORD_HEADER = ("symbol_index", "epsilon_hat", "c_hat", "phn_hat", "interpolated")


def _fmt(x) -> str:
    # repr() of a float is the shortest string that round-trips
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_rows(path, header, rows: Iterable) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_csv(result, path) -> None:
    """One line per sweep point under the fixed :data:`CSV_HEADER`."""
    _write_rows(path, CSV_HEADER, (row.as_tuple() for row in result.rows))


def read_csv(path):
    from .montecarlo import McResult, McRow

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValidationError(f"unexpected CSV header {header}")
        rows = [
            McRow(float(r[0]), int(r[1]), int(r[2]), *(float(x) for x in r[3:]))
            for r in reader
            if r
        ]
    return McResult(rows)


def write_records(records: Iterable[EstimateRecord], path) -> None:
    _write_rows(
        path,
        RECORD_HEADER,
        ((r.symbol_index, r.epsilon_hat, r.c_hat, r.phn_hat, r.interpolated) for r in records),
    )


def write_iq(frame: TimeFrame, path) -> None:
    """Interleaved little-endian float32 I/Q, symbols back to back, CP included."""
    data = np.ascontiguousarray(frame.samples.ravel(), dtype="<c8")
    Path(path).write_bytes(data.tobytes())


def read_iq(path, params: OfdmParams) -> TimeFrame:
    raw = Path(path).read_bytes()
    if len(raw) % 8:
        raise ValidationError(f"truncated IQ file: {len(raw)} bytes is not a multiple of 8")
    samples = np.frombuffer(raw, dtype="<c8").astype(complex)
    per_symbol = params.symbol_len
    if samples.size != params.l_symbols * per_symbol:
        raise ValidationError(
            f"IQ file holds {samples.size} samples, expected "
            f"{params.l_symbols} x {per_symbol} = {params.l_symbols * per_symbol}"
        )
    return TimeFrame(samples.reshape(params.l_symbols, per_symbol), params.cp_len, has_cp=True)
