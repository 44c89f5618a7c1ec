"""
Command line entry point.

Exit codes: 0 success, 1 configuration or usage error, 2 IO error.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from ..estimator import Mode, estimate_frame
from ..impairments import spectrum_moment4
from ..model import OfdmParams, PilotGeometry, PilotPattern, ValidationError, validate
from ..pilots import gen_pattern
from .config import load_config
from .io import read_iq, write_csv, write_records
from .montecarlo import run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ofdmcfo", description="Pilot-phase CFO/PHN estimation toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run a Monte Carlo sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1, help="worker processes (1 = serial)")

    p = sub.add_parser("estimate", help="estimate offsets in a recorded cf32 IQ file")
    p.add_argument("--config", required=True)
    p.add_argument("--iq", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("patterns", help="emit a pilot lattice as l,k rows")
    p.add_argument("--kind", required=True, choices=[k.value for k in PilotPattern])
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--l-symbols", type=int, default=8)
    p.add_argument("--x1", type=int, default=4)
    p.add_argument("--y2", type=int, default=16)
    p.add_argument("--out", default="-")

    p = sub.add_parser("moments", help="fourth moment of a sampled spectrum")
    p.add_argument("--spectrum", required=True, help="CSV with columns s or w,s")
    p.add_argument("--out", default=None, help="also write the value to this file")
    return parser


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    result = run_sweep(cfg, workers=args.workers)
    write_csv(result, args.out)
    return EXIT_OK


def _cmd_estimate(args) -> int:
    cfg = load_config(args.config)
    if cfg.mode is not Mode.PAPER:
        raise ValidationError("offline estimation has no transmitted grid; use mode = paper")
    params = cfg.params
    geometry = cfg.geometry(cfg.n_p_list[0])
    frame = read_iq(args.iq, params)
    lattice = gen_pattern(cfg.pattern, params, geometry)
    records = estimate_frame(frame, lattice, geometry, params, mode=Mode.PAPER, gamma=cfg.gamma)
    write_records(records, args.out)
    return EXIT_OK


def _cmd_patterns(args) -> int:
    params = OfdmParams(args.n, 0, args.l_symbols)
    geometry = PilotGeometry(1, 1, args.kind, args.x1, args.y2)
    validate(params, geometry)
    lattice = gen_pattern(args.kind, params, geometry)
    lines = ["l,k"] + [f"{l},{k}" for l, k in lattice.points]
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    return EXIT_OK


def _read_spectrum(path):
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rows.append([float(x) for x in line.split(",")])
            except ValueError:
                if rows:
                    raise ValidationError(f"non-numeric spectrum row: {line!r}") from None
                # header line
    data = np.array(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] not in (1, 2):
        raise ValidationError("spectrum CSV must have one column (s) or two (w,s)")
    if data.shape[1] == 1:
        return data[:, 0], None
    return data[:, 1], data[:, 0]


def _cmd_moments(args) -> int:
    s, w = _read_spectrum(args.spectrum)
    value = spectrum_moment4(s, w)
    print(repr(value))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(repr(value) + "\n")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "patterns": _cmd_patterns,
    "moments": _cmd_moments,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return _COMMANDS[args.command](args)
    except OSError as exc:
        print(f"ofdmcfo: IO error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"ofdmcfo: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
