import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from windowmax import laws, simulate as sim
from windowmax.rng import PURPOSE_INCREMENTS, PURPOSE_WINDOWS, generator

BERN = laws.bernoulli_pm1()
K_TERMS = sim.WindowCountConvention.K_TERMS
K_PLUS_1 = sim.WindowCountConvention.K_PLUS_1_TERMS


def _strip_wall(rec):
    return dataclasses.replace(rec, wall_ms=0.0)


class TestConfig:
    def test_validation(self):
        with pytest.raises(sim.ConfigError):
            sim.SimConfig(n=0, law=BERN, window=1)
        with pytest.raises(sim.ConfigError):
            sim.SimConfig(n=10, law=BERN, window=11)
        with pytest.raises(sim.ConfigError):
            sim.SimConfig(n=10, law=BERN, window=10, convention=K_PLUS_1)
        with pytest.raises(sim.ConfigError):
            sim.SimConfig(n=10, law=BERN, window=2, trials=0)
        with pytest.raises(sim.ConfigError):
            sim.SimConfig(n=10, law=BERN, window="nope")

    def test_wrong_runner_rejected(self):
        cfg = sim.SimConfig(n=10, law=BERN, window=2)
        with pytest.raises(sim.ConfigError):
            sim.stochastic_eta(cfg)
        cfg2 = sim.SimConfig(n=10, law=BERN, window=laws.poisson_window(2.0))
        with pytest.raises(sim.ConfigError):
            sim.classical_eta(cfg2)


class TestBruteForce:
    def test_hand_example(self):
        # windows of 2 over (+1,-1,+1,+1,-1,-1): best is (+1,+1) at i=3
        stream = [1.0, -1.0, 1.0, 1.0, -1.0, -1.0]
        assert sim.brute_force_eta(stream, 2, 2.0) == 1.0

    def test_whole_stream_window_is_the_mean(self):
        stream = [0.5, 1.5, -1.0, 2.0]
        assert sim.brute_force_eta(stream, 4, 4.0) == pytest.approx(np.mean(stream))

    def test_length_error(self):
        with pytest.raises(sim.LengthError):
            sim.brute_force_eta([1.0, 1.0], 3, 3.0)
        with pytest.raises(sim.LengthError):
            sim.brute_force_eta([1.0, 1.0], [1, 2], 1.0)


class TestClassicalEta:
    def test_degenerate_all_ones(self):
        cfg = sim.SimConfig(n=50, law=laws.constant(1.0), window=7)
        rec = sim.classical_eta(cfg)
        assert rec.eta == 1.0
        assert rec.max_window_drawn == 7

    def test_hand_stream_via_oracle(self):
        cfg = sim.SimConfig(n=6, law=BERN, window=2, seed=5)
        rec = sim.classical_eta(cfg)
        xs = sim.draw_increments(BERN, 6, generator(5, 0, PURPOSE_INCREMENTS))
        assert rec.eta == sim.brute_force_eta(list(xs), 2, 2.0)

    def test_eta_range(self):
        for seed in range(20):
            cfg = sim.SimConfig(n=200, law=BERN, window=11, seed=seed)
            rec = sim.classical_eta(cfg)
            assert -1.0 <= rec.eta <= 1.0
            assert 1 <= rec.argmax_index <= 200 - 11 + 1

    def test_conventions_differ_in_window_count(self):
        cfg_k = sim.SimConfig(n=100, law=BERN, window=10, seed=3, convention=K_TERMS)
        cfg_k1 = sim.SimConfig(n=100, law=BERN, window=10, seed=3, convention=K_PLUS_1)
        xs = list(sim.draw_increments(BERN, 100, generator(3, 0, PURPOSE_INCREMENTS)))
        assert sim.classical_eta(cfg_k).eta == sim.brute_force_eta(xs, 10, 10.0)
        assert sim.classical_eta(cfg_k1).eta == sim.brute_force_eta(xs, 11, 10.0)

    def test_determinism(self):
        cfg = sim.SimConfig(n=5000, law=BERN, window=17, seed=11, trials=3)
        a = [_strip_wall(r) for r in sim.run_trials(cfg)]
        b = [_strip_wall(r) for r in sim.run_trials(cfg)]
        assert a == b

    @settings(deadline=None, max_examples=60)
    @given(
        n=st.integers(5, 200),
        seed=st.integers(0, 2**32),
        kfrac=st.floats(0.01, 1.0),
        plus1=st.booleans(),
    )
    def test_oracle_equivalence(self, n, seed, kfrac, plus1):
        conv = K_PLUS_1 if plus1 else K_TERMS
        kmax = n - 1 if plus1 else n
        k = max(1, min(kmax, int(round(kfrac * kmax))))
        cfg = sim.SimConfig(n=n, law=BERN, window=k, seed=seed, convention=conv)
        rec = sim.classical_eta(cfg)
        xs = list(sim.draw_increments(BERN, n, generator(seed, 0, PURPOSE_INCREMENTS)))
        w = k + 1 if plus1 else k
        assert rec.eta == sim.brute_force_eta(xs, w, float(k))


class TestStochasticEta:
    def test_degenerate_all_ones_fixed_window(self):
        w = laws.deterministic_window(10.0)
        cfg = sim.SimConfig(n=20, law=laws.constant(1.0), window=w)
        rec = sim.stochastic_eta(cfg)
        assert rec.eta == 1.0

    def test_zero_windows_pin_the_convention(self):
        w = laws.deterministic_window(2.0, k=0)
        cfg = sim.SimConfig(n=30, law=BERN, window=w, seed=9)
        assert sim.stochastic_eta(cfg).eta == 0.0  # empty sums under k_terms
        cfg1 = sim.SimConfig(n=30, law=BERN, window=w, seed=9, convention=K_PLUS_1)
        xs = sim.draw_increments(BERN, 31, generator(9, 0, PURPOSE_INCREMENTS))
        assert sim.stochastic_eta(cfg1).eta == pytest.approx(max(xs[:30]) / 2.0)

    def test_eta_bounded_by_max_window_ratio(self):
        w = laws.poisson_window(6.0)
        for seed in range(10):
            cfg = sim.SimConfig(n=300, law=BERN, window=w, seed=seed)
            rec = sim.stochastic_eta(cfg)
            assert rec.eta <= rec.max_window_drawn / w.p + 1e-12

    def test_window_cap(self):
        w = laws.poisson_window(50.0)
        cfg = sim.SimConfig(n=100, law=BERN, window=w, seed=1, lambda_cap=10)
        with pytest.raises(sim.WindowCapExceeded):
            sim.stochastic_eta(cfg)

    def test_determinism(self):
        w = laws.poisson_window(8.0)
        cfg = sim.SimConfig(n=4000, law=BERN, window=w, seed=13, trials=3)
        a = [_strip_wall(r) for r in sim.run_trials(cfg)]
        b = [_strip_wall(r) for r in sim.run_trials(cfg)]
        assert a == b

    @settings(deadline=None, max_examples=60)
    @given(
        n=st.integers(5, 200),
        seed=st.integers(0, 2**32),
        p=st.floats(0.5, 20.0),
        plus1=st.booleans(),
    )
    def test_oracle_equivalence(self, n, seed, p, plus1):
        conv = K_PLUS_1 if plus1 else K_TERMS
        wlaw = laws.poisson_window(p)
        cfg = sim.SimConfig(n=n, law=BERN, window=wlaw, seed=seed, convention=conv)
        rec = sim.stochastic_eta(cfg)
        lam = sim.draw_windows(wlaw, n, generator(seed, 0, PURPOSE_WINDOWS))
        extra = 1 if plus1 else 0
        xs = sim.draw_increments(
            BERN, n + int(lam.max()) + extra, generator(seed, 0, PURPOSE_INCREMENTS)
        )
        windows = [int(l) + extra for l in lam]
        assert rec.eta == sim.brute_force_eta(list(xs), windows, p)


class TestMeanShift:
    def test_shift_moves_eta_exactly(self):
        # power-of-two window and shift keep every float operation exact
        gen = generator(21, 0, PURPOSE_INCREMENTS)
        xs = list(sim.draw_increments(BERN, 64, gen))
        delta = 0.5
        k = 8
        base = sim.brute_force_eta(xs, k, float(k))
        shifted = sim.brute_force_eta([x + delta for x in xs], k, float(k))
        assert shifted == base + delta


class TestTailBounds:
    def test_all_ones_point(self):
        lo, hi, exact = sim.binomial_tail_bounds(10, 10.0)
        assert exact == pytest.approx(2.0**-10, abs=1e-15)

    def test_symmetric_half(self):
        _, _, exact = sim.binomial_tail_bounds(10, 0.0)
        assert exact >= 0.5

    def test_sandwich_on_grid(self):
        for l in (10, 100, 1000, 10_000):
            for x in np.arange(0.1, 0.91, 0.1):
                lo, hi, exact = sim.binomial_tail_log_bounds(l, float(x) * l)
                assert lo <= exact <= hi

    def test_matches_linear_form(self):
        lo, hi, exact = sim.binomial_tail_bounds(1000, 100.0)
        llo, lhi, lexact = sim.binomial_tail_log_bounds(1000, 100.0)
        assert exact == pytest.approx(math.exp(lexact))
        assert lo <= exact <= hi

    def test_domain_errors(self):
        with pytest.raises(laws.DomainError):
            sim.binomial_tail_bounds(0, 0.0)
        with pytest.raises(laws.DomainError):
            sim.binomial_tail_bounds(10, 11.0)


class TestConvergenceSweep:
    def test_degenerate_law_is_flat(self):
        cfg = sim.SimConfig(n=100, law=laws.constant(1.0), window=5,
                            trials=4, growth_C=2.0)
        rows = sim.convergence_sweep(cfg, [100, 1000])
        assert all(r.median_eta == 1.0 for r in rows)

    def test_grid_must_increase(self):
        cfg = sim.SimConfig(n=100, law=BERN, window=5, trials=2, growth_C=2.0)
        with pytest.raises(sim.ConfigError):
            sim.convergence_sweep(cfg, [1000, 100])

    def test_rows_carry_quartiles(self):
        cfg = sim.SimConfig(n=100, law=BERN, window=5, trials=8, growth_C=1.5)
        rows = sim.convergence_sweep(cfg, [200, 400])
        for row in rows:
            assert row.q1 <= row.median_eta <= row.q3


class TestCsv:
    def test_trial_row_round_trip(self):
        cfg = sim.SimConfig(n=100, law=BERN, window=5, seed=3)
        rec = sim.classical_eta(cfg)
        row = sim.trial_csv_row(rec)
        parts = row.split(",")
        assert len(parts) == len(sim.TRIAL_CSV_HEADER.split(","))
        assert int(parts[0]) == rec.seed
        assert float(parts[3]) == rec.eta
        assert int(parts[4]) == rec.argmax_index

    def test_sweep_row_round_trip(self):
        row = sim.SweepRow(n=100, median_eta=0.5, q1=0.25, q3=1.0 / 3.0)
        parts = sim.sweep_csv_row(row).split(",")
        assert float(parts[3]) == 1.0 / 3.0
