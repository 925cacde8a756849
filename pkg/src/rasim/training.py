"""Offline training of the backlog predictor from simulated traces.

Traces are produced by the grant-free engine (no barring round) so the
observations reflect raw contention, then cut into (window, next backlog)
pairs per use mode. Validation always happens on a trace the models never
saw, and the moment-matching baseline is scored on the same held-out frames
for a like-for-like comparison.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .engine import SimulationConfig, run_simulation
from .lstm import lstm_train
from .metrics import predictor_mse, predictor_mse_raw
from .predictor import (
    LstmPredictor,
    ObservationHistory,
    naive_predict,
    record_observation,
    training_pairs,
)


def generate_trace(cfg: SimulationConfig, frames: int, seed: int):
    """Grant-free trace: per-frame observations and true per-mode backlogs."""
    trace_cfg = dataclasses.replace(
        cfg,
        acb=type(cfg.acb)("gf"),
        predictor="perfect",
        frames=frames,
        seed=seed,
    )
    results = run_simulation(trace_cfg)
    observations = [fr.observation for fr in results]
    backlog_u = [fr.backlog.active_u for fr in results]
    backlog_m = [fr.backlog.active_m for fr in results]
    return observations, backlog_u, backlog_m


@dataclass
class TrainingReport:
    train_mse_u: float
    train_mse_m: float
    val_mse_u: float
    val_mse_m: float
    val_mse_u_raw: float
    val_mse_m_raw: float
    naive_mse_u: float
    naive_mse_m: float
    epochs: int
    samples: int


def train_backlog_predictor(
    cfg: SimulationConfig,
    samples: int = 1000,
    epochs: int = 100,
    hidden_size: int = 20,
    learning_rate: float = 1e-2,
    val_samples: int | None = None,
) -> tuple[LstmPredictor, TrainingReport]:
    """Train both class models and score them against the naive baseline.

    Sample counts refer to usable windows; the generated traces are longer by
    the warm-up window. Everything is seeded from cfg.seed, so the same
    config yields byte-identical serialized models.
    """
    if samples < 1:
        raise ValueError("need at least one training sample")
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    tc = cfg.traffic
    val_samples = val_samples or max(1, samples // 5)

    obs, bu, bm = generate_trace(cfg, samples + cfg.t_w, seed=cfg.seed)
    pairs_u, pairs_m = training_pairs(obs, bu, bm, cfg.t_w, tc.k_u, tc.k_m)

    rng_u = np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(101,)))
    rng_m = np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(102,)))
    model_u, hist_u = lstm_train(
        pairs_u, epochs, learning_rate, rng_u, hidden_size=hidden_size
    )
    model_m, hist_m = lstm_train(
        pairs_m, epochs, learning_rate, rng_m, hidden_size=hidden_size
    )
    predictor = LstmPredictor(model_u, model_m, tc.k_u, tc.k_m, cfg.t_w)

    v_obs, v_bu, v_bm = generate_trace(cfg, val_samples + cfg.t_w, seed=cfg.seed + 7919)
    lstm_pred, naive_pred, truth = _score_on_trace(predictor, cfg, v_obs, v_bu, v_bm)
    report = TrainingReport(
        train_mse_u=hist_u[-1],
        train_mse_m=hist_m[-1],
        val_mse_u=predictor_mse(lstm_pred["u"], truth["u"], tc.k_u),
        val_mse_m=predictor_mse(lstm_pred["m"], truth["m"], tc.k_m),
        val_mse_u_raw=predictor_mse_raw(lstm_pred["u"], truth["u"]),
        val_mse_m_raw=predictor_mse_raw(lstm_pred["m"], truth["m"]),
        naive_mse_u=predictor_mse(naive_pred["u"], truth["u"], tc.k_u),
        naive_mse_m=predictor_mse(naive_pred["m"], truth["m"], tc.k_m),
        epochs=epochs,
        samples=len(pairs_u),
    )
    return predictor, report


def _score_on_trace(predictor: LstmPredictor, cfg: SimulationConfig, obs, bu, bm):
    """Per-frame predictions of both estimators over one held-out trace."""
    from .predictor import predict_backlog

    hist = ObservationHistory(cfg.t_w)
    lstm_pred = {"u": [], "m": []}
    naive_pred = {"u": [], "m": []}
    truth = {"u": [], "m": []}
    for t, o in enumerate(obs):
        if len(hist) == cfg.t_w:
            lp = predict_backlog(predictor, hist, hist)
            np_ = naive_predict(hist, cfg.traffic.k_u, cfg.traffic.k_m)
            lstm_pred["u"].append(lp.k_hat_u)
            lstm_pred["m"].append(lp.k_hat_m)
            naive_pred["u"].append(np_.k_hat_u)
            naive_pred["m"].append(np_.k_hat_m)
            truth["u"].append(bu[t])
            truth["m"].append(bm[t])
        record_observation(hist, o)
    return lstm_pred, naive_pred, truth
