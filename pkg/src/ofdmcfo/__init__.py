"""OFDM frequency-offset and phase-noise estimation from pilot phases."""

from .estimator import (
    Estimator,
    Mode,
    PhaseSeries,
    RegressionFit,
    estimate_cfo_moose,
    estimate_cfo_regression,
    estimate_cfo_sum,
    estimate_frame,
    estimate_phn,
    extract_phase_series,
    fit_phase_line,
    interpolate_cfo,
    ls_oracle,
    smooth_cfo,
    unwrap,
)
from .impairments import (
    ChannelKind,
    ChannelModel,
    ImpairmentState,
    apply_awgn,
    apply_cfo,
    apply_channel,
    apply_phn,
    spectrum_moment4,
)
from .model import (
    EstimateRecord,
    FreqGrid,
    OfdmParams,
    PilotGeometry,
    PilotPattern,
    TimeFrame,
    ValidationError,
    pilot_time_indices,
    validate,
)
from .pilots import PilotLattice, gen_pattern, isotropy_gap, pilot_bearing_symbols, solve_y2
from .txrx import Constellation, ConstellationSpec, demodulate_frame, modulate_frame, random_grid

__version__ = "0.1.0"
