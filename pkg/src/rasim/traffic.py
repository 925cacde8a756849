"""Per-frame arrival models for the two use modes and backlog bookkeeping.

mMTC devices activate independently with a small per-frame probability, plus a
fixed sub-population that wakes up periodically. URLLC devices activate with a
probability that follows a Beta-shaped profile repeating every period, which
produces the characteristic periodic burst. Backlog = new arrivals plus UEs
retrying after a failed access attempt (retry happens in the very next frame).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import beta as _beta_fn


@dataclass(frozen=True)
class TrafficConfig:
    """Population sizes and activation parameters for both use modes."""

    k_m: int = 1000          # mMTC population
    k_u: int = 25            # URLLC population
    p_act: float = 0.005     # mMTC per-frame activation probability
    k_m_periodic: int = 10   # mMTC UEs that wake every t_m frames
    t_m: int = 10            # mMTC wake-up period, frames
    t_u: int = 10            # URLLC burst period, frames
    alpha: float = 3.0       # Beta shape of the burst profile
    beta: float = 4.0

    def validate(self):
        if self.k_m < 0 or self.k_u < 0:
            raise ValueError("population sizes must be non-negative")
        if self.k_m_periodic < 0 or self.k_m_periodic > self.k_m:
            raise ValueError("k_m_periodic must lie in [0, k_m]")
        if self.t_m < 1 or self.t_u < 1:
            raise ValueError("periods t_m, t_u must be >= 1")
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if not 0.0 <= self.p_act <= 1.0:
            raise ValueError("p_act must lie in [0, 1]")
        return self


@dataclass(frozen=True)
class BacklogState:
    """Active-UE accounting for one frame, split into new arrivals and retries."""

    new_m: int = 0
    new_u: int = 0
    retry_m: int = 0
    retry_u: int = 0
    frame_index: int = -1

    @property
    def active_m(self) -> int:
        return self.new_m + self.retry_m

    @property
    def active_u(self) -> int:
        return self.new_u + self.retry_u

    @property
    def active_total(self) -> int:
        return self.active_m + self.active_u


def beta_activation_profile(cfg: TrafficConfig, t: int) -> float:
    """Per-UE URLLC activation probability at frame t.

    The profile is the Beta(alpha, beta) density stretched over one period and
    evaluated at the integer phase tau = t mod t_u:

        tau^(a-1) * (t_u - tau)^(b-1) / (t_u^(a+b-1) * B(a, b))

    clamped into [0, 1] so it is always usable as a probability.
    """
    if t < 0:
        raise ValueError("frame index must be non-negative")
    if cfg.alpha <= 0 or cfg.beta <= 0:
        raise ValueError("alpha and beta must be positive")
    tau = t % cfg.t_u
    a, b = cfg.alpha, cfg.beta
    if tau == 0:
        if a > 1:
            return 0.0
        if a < 1:
            return 1.0  # density diverges at the period edge; clamp
        num = float(cfg.t_u) ** (b - 1.0)
    else:
        num = tau ** (a - 1.0) * (cfg.t_u - tau) ** (b - 1.0)
    dens = num / (cfg.t_u ** (a + b - 1.0) * _beta_fn(a, b))
    return float(min(max(dens, 0.0), 1.0))


def sample_mmtc_arrivals(cfg: TrafficConfig, t: int, rng: np.random.Generator) -> int:
    """New mMTC packets in frame t: binomial activations plus the periodic comb."""
    if t < 0:
        raise ValueError("frame index must be non-negative")
    n = int(rng.binomial(cfg.k_m - cfg.k_m_periodic, cfg.p_act))
    if t % cfg.t_m == 0:
        n += cfg.k_m_periodic
    return n


def sample_urllc_arrivals(cfg: TrafficConfig, t: int, rng: np.random.Generator) -> int:
    """New URLLC packets in frame t, binomial with the periodic Beta profile."""
    p = beta_activation_profile(cfg, t)
    return int(rng.binomial(cfg.k_u, p))


def update_backlog(
    state: BacklogState,
    arrivals_m: int,
    arrivals_u: int,
    failed_m: int,
    failed_u: int,
    cfg: TrafficConfig,
) -> BacklogState:
    """Advance the backlog by one frame.

    UEs that failed this frame retry in the next one (zero barring time).
    A backlogged UE does not queue a second packet, so effective new arrivals
    are capped at the population headroom beyond the retrying UEs.
    """
    if failed_m < 0 or failed_u < 0 or arrivals_m < 0 or arrivals_u < 0:
        raise ValueError("counts must be non-negative")
    if failed_m > state.active_m or failed_u > state.active_u:
        raise ValueError(
            f"failed counts ({failed_m}, {failed_u}) exceed active counts "
            f"({state.active_m}, {state.active_u})"
        )
    new_m = min(arrivals_m, cfg.k_m - failed_m)
    new_u = min(arrivals_u, cfg.k_u - failed_u)
    return BacklogState(
        new_m=new_m,
        new_u=new_u,
        retry_m=failed_m,
        retry_u=failed_u,
        frame_index=state.frame_index + 1,
    )


def expected_arrivals_per_frame(cfg: TrafficConfig) -> tuple[float, float]:
    """Long-run mean arrivals per frame (URLLC, mMTC); used as a cold-start prior."""
    mean_profile = sum(beta_activation_profile(cfg, t) for t in range(cfg.t_u)) / cfg.t_u
    mean_u = cfg.k_u * mean_profile
    mean_m = (cfg.k_m - cfg.k_m_periodic) * cfg.p_act + cfg.k_m_periodic / cfg.t_m
    return mean_u, mean_m
