#!/usr/bin/env python3
"""Train the backlog predictor on simulated traces and watch it track truth.

The station only sees per-frame channel-state triplets (success / collision /
idle counts per mode). Two small recurrent models, one per use mode, learn to
map a 10-frame window of those triplets to the current number of active UEs.
The moment-matching baseline inverts the latest idle fraction instead.
Takes around half a minute.
"""

from rasim.engine import SimulationConfig
from rasim.predictor import ObservationHistory, predict_backlog, record_observation
from rasim.traffic import TrafficConfig
from rasim.training import generate_trace, train_backlog_predictor

cfg = SimulationConfig(
    traffic=TrafficConfig(k_m=500, k_u=13),
    slicer="counts:5,49",
    predictor="perfect",
    frames=100,
    seed=3,
)

print("training on 1000 grant-free frames (two models, 20 hidden units each)...")
predictor, report = train_backlog_predictor(cfg, samples=1000, epochs=100)
print(f"  train nmse: urllc={report.train_mse_u:.2e} mmtc={report.train_mse_m:.2e}")
print(f"  val   nmse: urllc={report.val_mse_u:.2e} mmtc={report.val_mse_m:.2e}")
print(f"  naive nmse: urllc={report.naive_mse_u:.2e} mmtc={report.naive_mse_m:.2e}")

print("\ntracking a fresh trace (true vs predicted active UEs):")
obs, bu, bm = generate_trace(cfg, 40, seed=2024)
hist = ObservationHistory(cfg.t_w)
print(f"{'frame':>6} {'true u':>7} {'pred u':>7} {'true m':>7} {'pred m':>7}")
for t, o in enumerate(obs):
    if len(hist) == cfg.t_w and t % 3 == 0:
        pred = predict_backlog(predictor, hist, hist)
        print(f"{t:>6} {bu[t]:>7} {pred.k_hat_u:>7} {bm[t]:>7} {pred.k_hat_m:>7}")
    record_observation(hist, o)
