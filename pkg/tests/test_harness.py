import math

import numpy as np
import pytest

from ofdmcfo import OfdmParams, TimeFrame, ValidationError
from ofdmcfo.harness import (
    ConfigError,
    McConfig,
    McResult,
    McRow,
    parse_config,
    read_csv,
    read_iq,
    run_sweep,
    run_trial,
    trial_seed,
    write_csv,
    write_iq,
)
from ofdmcfo.harness.config import format_config

SMALL = McConfig(trials=40, l_symbols=5, snr_db_list=(10.0, 20.0), n_p_list=(6, 8))


class TestConfig:
    def test_parse_all_core_keys(self):
        text = """
        # sweep
        n = 128
        cp_len = 32
        l_symbols = 9
        delta_t = 8
        n_p_list = 6, 8 , 10
        pattern = diamond
        x1 = 8
        y2 = 16
        epsilon = -0.02
        snr_db_list = 6, 9.5, inf
        trials = 10
        seed = 42
        mode = known_signal
        estimator = sum
        channel = static_taps
        taps = 1, 0.5-0.1j, 0.2j   # three paths
        phn_sigma2 = 1e-3
        gamma = 0.25
        """
        cfg = parse_config(text)
        assert cfg.n == 128 and cfg.n_p_list == (6, 8, 10)
        assert cfg.snr_db_list == (6.0, 9.5, math.inf)
        assert cfg.taps == (1 + 0j, 0.5 - 0.1j, 0.2j)
        assert cfg.mode.value == "known_signal" and cfg.estimator.value == "sum"
        assert cfg.pattern.value == "diamond"

    def test_round_trip_format(self):
        cfg = McConfig(taps=(1, 0.5j), snr_db_list=(3.0, math.inf), pilot_symbol_data=True)
        assert parse_config(format_config(cfg)) == cfg

    @pytest.mark.parametrize(
        "text",
        ["bogus = 1", "n = sixty", "trials = 0", "n_p_list =", "mode = psychic", "just text", "n_p_list = 40"],
    )
    def test_rejects(self, text):
        # ConfigError is a ValidationError; joint geometry checks raise the base class
        with pytest.raises(ValidationError):
            parse_config(text)


class TestSeeds:
    def test_distinct_and_stable(self):
        seeds = {trial_seed(1, s, p, t) for s in range(3) for p in range(3) for t in range(100)}
        assert len(seeds) == 900
        assert trial_seed(1, 0, 0, 0) == trial_seed(1, 0, 0, 0)
        assert all(0 <= s < 2**64 for s in seeds)


class TestRunTrial:
    def test_deterministic(self):
        assert run_trial(SMALL, 3, 10.0, 6) == run_trial(SMALL, 3, 10.0, 6)

    def test_noiseless_exact(self):
        cfg = SMALL.replace(mode="known_signal", snr_db_list=(math.inf,), phn_sigma2=0.0)
        out = run_trial(cfg, 0, math.inf, 8)
        assert abs(out.epsilon_hat - cfg.epsilon) < 1e-9
        assert abs(out.phn_error) < 1e-9

    def test_noiseless_with_phase_noise(self):
        cfg = SMALL.replace(mode="known_signal", snr_db_list=(math.inf,), phn_sigma2=0.01)
        out = run_trial(cfg, 5, math.inf, 8)
        assert abs(out.epsilon_hat - cfg.epsilon) < 1e-9
        assert abs(out.phn_error) < 1e-9

    def test_trial_index_changes_noise(self):
        assert run_trial(SMALL, 0, 10.0, 6) != run_trial(SMALL, 1, 10.0, 6)

    def test_unknown_sweep_point(self):
        with pytest.raises(ConfigError):
            run_trial(SMALL, 0, 11.0, 6)

    def test_moose(self):
        cfg = SMALL.replace(estimator="moose", epsilon=0.3, snr_db_list=(math.inf,))
        out = run_trial(cfg, 0, math.inf, 6)
        assert out.epsilon_hat == pytest.approx(0.3, abs=1e-9)
        assert math.isnan(out.phn_error)

    def test_multipath_rayleigh(self):
        cfg = SMALL.replace(
            mode="known_signal", channel="block_rayleigh", taps=(1, 0.5, 0.3), snr_db_list=(math.inf,)
        )
        assert run_trial(cfg, 2, math.inf, 6).epsilon_hat == pytest.approx(cfg.epsilon, abs=1e-9)


class TestSweep:
    def test_single_trial_matches_run_trial(self):
        cfg = SMALL.replace(trials=1)
        res = run_sweep(cfg)
        for row in res.rows:
            eps = run_trial(cfg, 0, row.snr_db, row.n_p).epsilon_hat
            assert row.mse == (eps - cfg.epsilon) ** 2
            assert row.mean_error == eps - cfg.epsilon

    def test_rows_cover_cross_product(self):
        res = run_sweep(SMALL)
        assert [(r.snr_db, r.n_p) for r in res.rows] == [(10.0, 6), (10.0, 8), (20.0, 6), (20.0, 8)]
        assert all(r.trials == 40 for r in res.rows)

    def test_mse_decomposition(self):
        for r in run_sweep(SMALL).rows:
            assert r.mse >= 0
            assert r.mse == pytest.approx(r.var_error + r.mean_error**2, rel=1e-9)

    def test_block_size_does_not_matter(self):
        a = run_sweep(SMALL, block=7)
        b = run_sweep(SMALL, block=1000)
        assert [r.as_tuple() for r in a.rows] == [r.as_tuple() for r in b.rows]

    def test_parallel_matches_serial(self, tmp_path):
        write_csv(run_sweep(SMALL, workers=1), tmp_path / "a.csv")
        write_csv(run_sweep(SMALL, workers=3, block=9), tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_failure_reports_context(self, monkeypatch):
        import ofdmcfo.harness.montecarlo as mc

        def boom(*a, **k):
            raise ValueError("boom")

        monkeypatch.setattr(mc, "estimate_frame", boom)
        with pytest.raises(RuntimeError, match=r"snr_db=10.0, n_p=6, trial=0"):
            run_sweep(SMALL)

    def test_data_in_pilot_symbols_hurts_paper_mode_only(self):
        # the transmitted-signal phase is a disturbance in paper mode, removed in known_signal mode
        cfg = McConfig(snr_db_list=(20.0,), n_p_list=(8,), trials=200, pilot_symbol_data=True)
        paper = run_sweep(cfg).rows[0].mse
        known = run_sweep(cfg.replace(mode="known_signal")).rows[0].mse
        assert paper > 100 * known

    @pytest.mark.slow
    def test_known_signal_mse_monotone(self):
        cfg = McConfig(mode="known_signal", snr_db_list=(6.0, 9.0, 13.0), n_p_list=(6, 8, 10), trials=2000)
        res = run_sweep(cfg)

        def guard(a, b):
            return 3 * math.hypot(res.mse_stderr(*a), res.mse_stderr(*b))

        for n_p in cfg.n_p_list:
            for lo, hi in ((6.0, 9.0), (9.0, 13.0)):
                assert res.row(hi, n_p).mse <= res.row(lo, n_p).mse + guard((lo, n_p), (hi, n_p))
            assert res.row(6.0, n_p).mse > res.row(13.0, n_p).mse
        for snr in cfg.snr_db_list:
            for a, b in ((6, 8), (8, 10)):
                assert res.row(snr, b).mse <= res.row(snr, a).mse + guard((snr, a), (snr, b))


class TestCsv:
    def test_empty(self, tmp_path):
        write_csv(McResult(), tmp_path / "e.csv")
        assert (tmp_path / "e.csv").read_bytes() == b"snr_db,n_p,trials,mse,mean_error,var_error,mean_phn_error\n"

    def test_one_row(self, tmp_path):
        res = McResult([McRow(6.0, 8, 10, 0.1, 0.01, 0.0999, float("nan"))])
        write_csv(res, tmp_path / "o.csv")
        lines = (tmp_path / "o.csv").read_text().split("\n")
        assert lines[1] == "6.0,8,10,0.1,0.01,0.0999,nan" and lines[2] == ""

    def test_round_trip_bytes(self, tmp_path):
        res = run_sweep(SMALL)
        write_csv(res, tmp_path / "a.csv")
        write_csv(read_csv(tmp_path / "a.csv"), tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert [r.as_tuple() for r in read_csv(tmp_path / "a.csv").rows] == [r.as_tuple() for r in res.rows]


class TestIq:
    def test_round_trip(self, tmp_path, rng):
        p = OfdmParams(32, 8, 3)
        frame = TimeFrame(rng.normal(size=(3, 40)) + 1j * rng.normal(size=(3, 40)), 8)
        write_iq(frame, tmp_path / "f.cf32")
        back = read_iq(tmp_path / "f.cf32", p)
        assert np.max(np.abs(back.samples - frame.samples)) < 1e-6

    def test_empty_frame(self, tmp_path):
        write_iq(TimeFrame(np.zeros((0, 40), complex), 8), tmp_path / "e.cf32")
        assert (tmp_path / "e.cf32").stat().st_size == 0

    def test_three_samples_is_24_bytes(self, tmp_path):
        write_iq(TimeFrame(np.array([[1 + 2j, 3 - 4j, 0.5j]]), 0, has_cp=False), tmp_path / "t.cf32")
        raw = (tmp_path / "t.cf32").read_bytes()
        assert len(raw) == 24
        np.testing.assert_array_equal(np.frombuffer(raw, "<f4"), [1, 2, 3, -4, 0, 0.5])

    def test_truncated(self, tmp_path):
        (tmp_path / "t.cf32").write_bytes(b"\0" * 12)
        with pytest.raises(ValidationError, match="truncated"):
            read_iq(tmp_path / "t.cf32", OfdmParams(4, 0, 1))

    def test_dimension_mismatch(self, tmp_path):
        (tmp_path / "t.cf32").write_bytes(b"\0" * 8 * 10)
        with pytest.raises(ValidationError, match="expected"):
            read_iq(tmp_path / "t.cf32", OfdmParams(4, 1, 3))
