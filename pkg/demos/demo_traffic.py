#!/usr/bin/env python3
"""Walk through the two arrival models and the backlog recurrence.

mMTC devices wake up sporadically (binomial) plus a small periodic group;
URLLC devices follow a repeating Beta-shaped burst. The second half shows how
unserved UEs pile up into the backlog when service is withheld.
"""

import numpy as np

from rasim.traffic import (
    BacklogState,
    TrafficConfig,
    beta_activation_profile,
    sample_mmtc_arrivals,
    sample_urllc_arrivals,
    update_backlog,
)

cfg = TrafficConfig()  # stock populations: 1000 mMTC (10 periodic), 25 URLLC
rng = np.random.default_rng(7)

print("URLLC activation profile over one period (Beta(3,4) shape):")
bars = [beta_activation_profile(cfg, t) for t in range(cfg.t_u)]
for t, p in enumerate(bars):
    print(f"  phase {t}: p={p:5.3f} {'#' * int(60 * p)}")

print("\nOne period of sampled arrivals (mMTC | URLLC):")
for t in range(10):
    a_m = sample_mmtc_arrivals(cfg, t, rng)
    a_u = sample_urllc_arrivals(cfg, t, rng)
    tag = " <- periodic mMTC group wakes up" if t % cfg.t_m == 0 else ""
    print(f"  frame {t}: {a_m:3d} | {a_u:2d}{tag}")

print("\nBacklog growth with zero service (every active UE fails each frame):")
state = BacklogState()
for t in range(25):
    a_m = sample_mmtc_arrivals(cfg, t, rng)
    a_u = sample_urllc_arrivals(cfg, t, rng)
    state = update_backlog(state, a_m, a_u, state.active_m, state.active_u, cfg)
    if t % 4 == 0:
        print(f"  frame {t:2d}: active mMTC {state.active_m:4d}, active URLLC {state.active_u:2d}")
print(f"  ... the counts keep climbing toward the populations "
      f"({cfg.k_m} and {cfg.k_u}) and then saturate.")
