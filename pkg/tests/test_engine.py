import dataclasses
import math

import numpy as np
import pytest

from conftest import enumerate_success_distribution, make_config

from rasim.acb import AcbPolicy
from rasim.engine import (
    contend_uniform,
    realization_metrics,
    realization_seed,
    run_monte_carlo,
    run_simulation,
)


class TestContention:
    @pytest.mark.parametrize("kind", ["gf", "opt-inv", "opt-lit", "static"])
    def test_lone_ue_always_served(self, kind, rng):
        policy = AcbPolicy(kind, 0.2) if kind == "static" else AcbPolicy(kind)
        counts, factors, survivors = contend_uniform(1, 4, policy, rng)
        assert counts.sum() == 1
        assert (survivors == 1).sum() == 1

    def test_two_on_one_channel_grant_free_collide(self, rng):
        counts, factors, survivors = contend_uniform(2, 1, AcbPolicy("gf"), rng)
        assert survivors.tolist() == [2]  # collision, nobody served

    def test_two_on_one_channel_inverse_half_success(self, rng):
        # P(success) = 2 * 1/2 * 1/2 = 0.5
        trials = 30_000
        wins = 0
        pol = AcbPolicy("opt-inv")
        for _ in range(trials):
            _, _, surv = contend_uniform(2, 1, pol, rng)
            wins += surv[0] == 1
        se = math.sqrt(0.25 / trials)
        assert abs(wins / trials - 0.5) < 3 * se

    def test_zero_channels(self, rng):
        counts, factors, survivors = contend_uniform(5, 0, AcbPolicy("gf"), rng)
        assert counts.size == 0 and survivors.size == 0

    def test_grant_free_equals_skipping_barring(self, rng):
        # same rng stream: grant-free confers no extra draws and same outcome
        r1 = np.random.default_rng(5)
        r2 = np.random.default_rng(5)
        c1, f1, s1 = contend_uniform(20, 7, AcbPolicy("gf"), r1)
        c2 = r2.multinomial(20, np.full(7, 1 / 7))
        assert np.array_equal(c1, c2)
        assert np.array_equal(s1, c1)
        assert r1.bit_generator.state == r2.bit_generator.state

    def test_gf_success_distribution_matches_enumeration(self, rng):
        # classic slotted multichannel model, exhaustively enumerated
        for n, length in [(2, 2), (3, 2), (4, 3), (3, 3)]:
            exact = enumerate_success_distribution(n, length)
            trials = 20_000
            seen = {}
            pol = AcbPolicy("gf")
            for _ in range(trials):
                _, _, surv = contend_uniform(n, length, pol, rng)
                s = int((surv == 1).sum())
                seen[s] = seen.get(s, 0) + 1
            for s, p in exact.items():
                assert abs(seen.get(s, 0) / trials - p) < 0.015, (n, length, s)


class TestFrames:
    def test_single_frame_run(self):
        cfg = make_config(frames=1, slicer="counts:2,10", predictor="perfect")
        out = run_simulation(cfg)
        assert len(out) == 1
        assert out[0].frame_index == 0

    def test_zero_frames_rejected(self):
        with pytest.raises(ValueError):
            make_config(frames=0).validate()

    def test_observation_sums_match_plan(self):
        cfg = make_config(frames=40, slicer="counts:3,20")
        for fr in run_simulation(cfg):
            o = fr.observation
            assert o.v_s_u + o.v_c_u + o.v_i_u == fr.plan_summary[0]
            assert o.v_s_m + o.v_c_m + o.v_i_m == fr.plan_summary[1]

    def test_conservation_per_frame(self):
        cfg = make_config(frames=60, slicer="maxrect", predictor="perfect", seed=9)
        results = run_simulation(cfg)
        for prev, cur in zip(results, results[1:]):
            # UEs that failed in the previous frame all retry now
            assert cur.backlog.retry_u == prev.failed_u
            assert cur.backlog.retry_m == prev.failed_m
            assert cur.backlog.active_u == cur.backlog.new_u + cur.backlog.retry_u
        for fr in results:
            assert 0 <= fr.served_u <= fr.backlog.active_u
            assert 0 <= fr.served_m <= fr.backlog.active_m

    def test_mode_without_channels_is_backlogged_not_fatal(self):
        cfg = make_config(
            frames=12, slicer="counts:0,8", traffic__alpha=1.0, traffic__beta=1.0,
            traffic__k_u=10, seed=3,
        )
        results = run_simulation(cfg)
        assert all(fr.served_u == 0 for fr in results)
        assert any(fr.backlog.active_u > 0 for fr in results)
        # URLLC keeps accumulating while mMTC is still being served
        assert any(fr.served_m > 0 for fr in results)

    def test_acb_stats_recorded_per_channel(self):
        cfg = make_config(frames=3, slicer="counts:2,5", acb=AcbPolicy("opt-inv"))
        fr = run_simulation(cfg)[-1]
        assert fr.acb_counts.shape == (7,)
        assert fr.acb_pass.shape == (7,)
        loaded = fr.acb_counts >= 2
        assert np.allclose(fr.acb_pass[loaded], 1.0 / fr.acb_counts[loaded])
        assert np.all(fr.acb_survivors <= fr.acb_counts)

    def test_barred_to_empty_counts_as_idle(self):
        # force heavy barring: static factor 0 bars every collision completely
        cfg = make_config(
            frames=30, slicer="counts:0,2", acb=AcbPolicy("static", 0.0),
            traffic__k_u=0, traffic__k_m=30, traffic__p_act=0.5, traffic__k_m_periodic=0,
            seed=11,
        )
        for fr in run_simulation(cfg):
            o = fr.observation
            if (fr.acb_counts >= 2).all() and fr.acb_counts.size:
                assert o.v_c_m == 0  # all barred away: observed idle, not collision
                assert o.v_i_m == 2


class TestDeterminism:
    def test_same_seed_same_results(self):
        cfg = make_config(frames=50, slicer="maxrect", predictor="perfect", seed=42)
        a = run_simulation(cfg)
        b = run_simulation(cfg)
        for fa, fb in zip(a, b):
            assert fa.observation == fb.observation
            assert fa.backlog == fb.backlog
            assert np.array_equal(fa.acb_survivors, fb.acb_survivors)

    def test_sub_seeds_are_order_insensitive(self):
        cfg = make_config(frames=20, slicer="counts:2,10", realizations=4, seed=7)
        fwd = [realization_metrics(cfg, i) for i in range(4)]
        rev = [realization_metrics(cfg, i) for i in (3, 2, 1, 0)][::-1]
        for a, b in zip(fwd, rev):
            for key in a:
                assert np.array_equal(a[key], b[key], equal_nan=True)

    def test_distinct_realizations_differ(self):
        cfg = make_config(frames=30, slicer="counts:2,10", seed=7)
        a = realization_metrics(cfg, 0)
        b = realization_metrics(cfg, 1)
        assert not np.array_equal(a["eta"], b["eta"], equal_nan=True)

    def test_seed_sequence_spawn_equivalence(self):
        direct = realization_seed(123, 5)
        spawned = np.random.SeedSequence(123).spawn(7)[5]
        assert direct.generate_state(4).tolist() == spawned.generate_state(4).tolist()


class TestMonteCarlo:
    def test_single_realization_equals_run_simulation(self):
        cfg = make_config(frames=25, slicer="counts:2,10", realizations=1, seed=13)
        mc = run_monte_carlo(cfg)
        rng = np.random.default_rng(realization_seed(cfg.seed, 0))
        frames = run_simulation(cfg, rng=rng)
        eta = [
            (fr.served_u + fr.served_m) / sum(fr.plan_summary) for fr in frames
        ]
        assert np.allclose(mc.stacks["eta"][0], eta)

    def test_stderr_shrinks_with_realizations(self):
        base = make_config(
            frames=60, slicer="counts:2,10", seed=5,
            traffic__k_m=300, traffic__p_act=0.02,
        )
        small = run_monte_carlo(dataclasses.replace(base, realizations=25))
        large = run_monte_carlo(dataclasses.replace(base, realizations=100))
        se_small = np.nanmean(small.stderr("eta"))
        se_large = np.nanmean(large.stderr("eta"))
        ratio = se_small / se_large
        assert 1.4 < ratio < 2.8  # ~sqrt(4) with Monte-Carlo slack

    def test_parallel_matches_serial(self):
        cfg = make_config(frames=15, slicer="counts:2,10", realizations=3, seed=21)
        serial = run_monte_carlo(cfg, workers=1)
        parallel = run_monte_carlo(cfg, workers=2)
        for key in serial.stacks:
            assert np.array_equal(serial.stacks[key], parallel.stacks[key], equal_nan=True)

    def test_overload_grant_free_throughput_collapses(self):
        # frozen regression: saturated population on the classic 54-channel pool
        cfg = make_config(
            frames=300, slicer="counts:5,49", acb=AcbPolicy("gf"),
            traffic__k_m=30_000, traffic__k_u=750, realizations=1, seed=2,
        )
        mc = run_monte_carlo(cfg)
        eta_tail = np.nanmean(mc.stacks["eta"][0, -200:])
        assert eta_tail < 0.05


class TestPredictorsInTheLoop:
    def test_perfect_predictor_sees_truth(self):
        cfg = make_config(frames=30, slicer="maxrect", predictor="perfect", seed=17)
        for fr in run_simulation(cfg):
            assert fr.prediction.k_hat_u == fr.backlog.active_u
            assert fr.prediction.k_hat_m == fr.backlog.active_m

    def test_naive_predictor_runs_and_stays_bounded(self):
        cfg = make_config(frames=40, slicer="maxrect", predictor="naive", seed=17)
        for fr in run_simulation(cfg):
            assert 0 <= fr.prediction.k_hat_u <= cfg.traffic.k_u
            assert 0 <= fr.prediction.k_hat_m <= cfg.traffic.k_m

    def test_lstm_predictor_roundtrip_through_engine(self, tmp_path, rng):
        from rasim.lstm import init_lstm
        from rasim.predictor import LstmPredictor, save_predictor

        pred = LstmPredictor(init_lstm(4, rng=rng), init_lstm(4, rng=rng), 25, 1000, t_w=10)
        path = tmp_path / "m.model"
        save_predictor(pred, path)
        cfg = make_config(frames=15, slicer="maxrect", predictor=f"lstm:{path}", seed=3)
        results = run_simulation(cfg)
        assert len(results) == 15

    def test_unknown_predictor_rejected(self):
        with pytest.raises(ValueError):
            make_config(predictor="psychic").validate()
