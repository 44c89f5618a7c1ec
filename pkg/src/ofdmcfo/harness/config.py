"""
Experiment configuration in plain ``key = value`` form.

``#`` starts a comment, lists are comma separated, and ``inf`` is accepted
wherever an SNR is expected. Example::

    n = 64
    cp_len = 16
    delta_t = 4
    n_p_list = 6, 10
    snr_db_list = 6, 13
    mode = paper
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..estimator import Estimator, Mode
from ..impairments import ChannelKind, ChannelModel
from ..model import OfdmParams, PilotGeometry, PilotPattern, ValidationError, validate
from ..txrx import Constellation, ConstellationSpec


class ConfigError(ValidationError):
    pass


@dataclass(frozen=True)
class McConfig:
    n: int = 64
    cp_len: int = 16
    l_symbols: int = 8
    delta_t: int = 4
    n_p_list: tuple[int, ...] = (6, 10)
    pattern: PilotPattern = PilotPattern.RECTANGULAR
    x1: int = 4
    y2: int = 16
    epsilon: float = 0.05
    snr_db_list: tuple[float, ...] = (6.0, 13.0)
    trials: int = 2000
    seed: int = 1
    mode: Mode = Mode.PAPER
    estimator: Estimator = Estimator.REGRESSION
    channel: ChannelKind = ChannelKind.IDENTITY
    taps: tuple[complex, ...] = (1 + 0j,)
    phn_sigma2: float = 0.0
    gamma: float = 0.0
    # extensions beyond the core key set
    rho: float = 0.9
    constellation: Constellation = Constellation.QPSK
    pilot_symbol_data: bool = False

    def __post_init__(self):
        coerce = {
            "pattern": PilotPattern,
            "mode": Mode,
            "estimator": Estimator,
            "channel": ChannelKind,
            "constellation": Constellation,
        }
        for name, typ in coerce.items():
            try:
                object.__setattr__(self, name, typ(getattr(self, name)))
            except ValueError:
                raise ConfigError(f"invalid value for {name}: {getattr(self, name)!r}") from None
        for name in ("n_p_list", "snr_db_list", "taps"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def params(self) -> OfdmParams:
        return OfdmParams(self.n, self.cp_len, self.l_symbols)

    def geometry(self, n_p: int) -> PilotGeometry:
        return PilotGeometry(self.delta_t, n_p, self.pattern, self.x1, self.y2)

    def channel_model(self) -> ChannelModel:
        return ChannelModel(self.channel, np.array(self.taps, dtype=complex), self.rho)

    def constellation_spec(self) -> ConstellationSpec:
        return ConstellationSpec(self.constellation, pilot_symbol_data=self.pilot_symbol_data)

    def validate(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.n_p_list or not self.snr_db_list:
            raise ConfigError("n_p_list and snr_db_list must be non-empty")
        if self.phn_sigma2 < 0 or self.gamma < 0:
            raise ConfigError("phn_sigma2 and gamma must be non-negative")
        for n_p in self.n_p_list:
            validate(self.params, self.geometry(n_p))
            if self.estimator is Estimator.REGRESSION and n_p < 2:
                raise ConfigError("regression needs every n_p >= 2")
        if self.estimator is Estimator.MOOSE and self.l_symbols < 2:
            raise ConfigError("Moose needs at least two symbols")
        if self.channel is not ChannelKind.IDENTITY and len(self.taps) > max(self.cp_len, 1):
            raise ConfigError("taps longer than cp_len")
        if not 0.0 <= self.rho <= 1.0:
            raise ConfigError("rho must lie in [0, 1]")

    def replace(self, **changes) -> "McConfig":
        return dataclasses.replace(self, **changes)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _parse_float(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "+inf", "infinity"):
        return math.inf
    return float(t)


def _split(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


_PARSERS = {
    "n": int,
    "cp_len": int,
    "l_symbols": int,
    "delta_t": int,
    "n_p_list": lambda v: tuple(int(x) for x in _split(v)),
    "pattern": str.strip,
    "x1": int,
    "y2": int,
    "epsilon": float,
    "snr_db_list": lambda v: tuple(_parse_float(x) for x in _split(v)),
    "trials": int,
    "seed": int,
    "mode": str.strip,
    "estimator": str.strip,
    "channel": str.strip,
    "taps": lambda v: tuple(complex(x.replace(" ", "")) for x in _split(v)),
    "phn_sigma2": float,
    "gamma": float,
    "rho": float,
    "constellation": str.strip,
    "pilot_symbol_data": _parse_bool,
}


def parse_config(text: str) -> McConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[key](value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from None
    cfg = McConfig(**values)
    cfg.validate()
    return cfg


def load_config(path) -> McConfig:
    """Read and validate a config file. ``OSError`` propagates for IO failures."""
    return parse_config(Path(path).read_text())


def format_config(cfg: McConfig) -> str:
    """Serialise back to the ``key = value`` form accepted by :func:`parse_config`."""

    def fmt(v):
        if isinstance(v, tuple):
            return ", ".join(fmt(x) for x in v)
        if isinstance(v, complex):
            return repr(v).strip("()")
        if hasattr(v, "value"):
            return v.value
        if isinstance(v, bool):
            return "true" if v else "false"
        return repr(v) if isinstance(v, float) else str(v)

    lines = [f"{f.name} = {fmt(getattr(cfg, f.name))}" for f in dataclasses.fields(cfg)]
    return "\n".join(lines) + "\n"
