"""Frame-by-frame execution of the predict / slice / contend access scheme.

Every frame runs the same four steps: the base station predicts the per-mode
backlog and broadcasts a slicing plan; active UEs each pick one channel of
their mode uniformly at random; the station broadcasts per-channel barring
factors and colliding UEs draw against them; channels with exactly one
remaining UE carry a decoded packet. Everyone else (collided, barred, or out
of channels) retries next frame. Under the grant-free policy the barring step
degenerates to a no-op, so success means being alone on the channel already
at selection time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .acb import AcbPolicy
from .predictor import (
    LstmPredictor,
    Observation,
    ObservationHistory,
    PredictionResult,
    load_predictor,
    naive_predict,
    perfect_predict,
    predict_backlog,
    record_observation,
)
from .slicing import (
    GridConfig,
    SlicingPlan,
    fixed_grid_slice,
    maxrect_slice,
    packet_size_rbs,
    plan_from_counts,
)
from .traffic import (
    BacklogState,
    TrafficConfig,
    expected_arrivals_per_frame,
    sample_mmtc_arrivals,
    sample_urllc_arrivals,
    update_backlog,
)


@dataclass(frozen=True)
class SimulationConfig:
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    acb: AcbPolicy = field(default_factory=lambda: AcbPolicy("gf"))
    predictor: str = "perfect"   # perfect | naive | lstm:<model path>
    slicer: str = "maxrect"      # maxrect | fixed:<l_u> | counts:<l_u>,<l_m>
    frames: int = 1200
    realizations: int = 1
    seed: int = 1
    t_acb: int = 0               # barred UEs return next frame; only 0 supported
    t_w: int = 10                # observation window length
    steady_fraction: float = 0.2

    def validate(self):
        self.traffic.validate()
        self.grid.validate()
        if self.frames < 1:
            raise ValueError("frames must be >= 1")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if self.t_acb != 0:
            raise ValueError("only t_acb = 0 is supported")
        if self.t_w < 1:
            raise ValueError("t_w must be >= 1")
        if not 0.0 < self.steady_fraction <= 1.0:
            raise ValueError("steady_fraction must lie in (0, 1]")
        kind = self.predictor.split(":", 1)[0]
        if kind not in ("perfect", "naive", "lstm"):
            raise ValueError(f"unknown predictor {self.predictor!r}")
        skind = self.slicer.split(":", 1)[0]
        if skind not in ("maxrect", "fixed", "counts"):
            raise ValueError(f"unknown slicer {self.slicer!r}")
        return self


@dataclass(frozen=True)
class FrameResult:
    frame_index: int
    observation: Observation
    served_u: int
    served_m: int
    backlog: BacklogState        # the frame's own active counts
    plan_summary: tuple[int, int]
    acb_counts: np.ndarray       # per channel, plan order (URLLC block first)
    acb_pass: np.ndarray
    acb_survivors: np.ndarray
    prediction: PredictionResult

    @property
    def failed_u(self) -> int:
        return self.backlog.active_u - self.served_u

    @property
    def failed_m(self) -> int:
        return self.backlog.active_m - self.served_m

    @property
    def backlog_after(self) -> BacklogState:
        """Carry-over into the next frame, before its new arrivals."""
        return BacklogState(
            new_m=0,
            new_u=0,
            retry_m=self.failed_m,
            retry_u=self.failed_u,
            frame_index=self.frame_index + 1,
        )


def contend_uniform(n_ues: int, n_channels: int, policy: AcbPolicy, rng: np.random.Generator):
    """One mode's selection and barring round.

    Returns (selection counts, pass factors, survivor counts) per channel.
    With zero channels everything is empty and all UEs fail this frame.
    """
    if n_channels == 0:
        z = np.zeros(0, dtype=int)
        return z, np.zeros(0), z
    counts = rng.multinomial(n_ues, np.full(n_channels, 1.0 / n_channels))
    factors = _acb_factors(policy, counts)
    barring = factors < 1.0
    if barring.any():
        survivors = counts.copy()
        survivors[barring] = rng.binomial(counts[barring], factors[barring])
    else:
        survivors = counts  # no draw at all: barring round is a no-op
    return counts, factors, survivors


def _acb_factors(policy: AcbPolicy, counts: np.ndarray) -> np.ndarray:
    """Vectorized acb_factor over per-channel contender counts."""
    factors = np.ones(len(counts))
    loaded = counts >= 2
    if policy.kind == "gf" or not loaded.any():
        return factors
    if policy.kind == "static":
        factors[loaded] = policy.p
    elif policy.kind == "opt-inv":
        factors[loaded] = 1.0 / counts[loaded]
    else:  # opt-lit
        factors[loaded] = 1.0 - 1.0 / counts[loaded]
    return factors


class SimulationState:
    """Mutable per-realization state threaded through run_frame."""

    def __init__(self, cfg: SimulationConfig, lstm: LstmPredictor | None = None):
        cfg.validate()
        self.cfg = cfg
        self.backlog = BacklogState(frame_index=-1)
        self.failed_u = 0
        self.failed_m = 0
        self.hist = ObservationHistory(cfg.t_w)
        self.frame = 0
        self._plan_cache: dict[tuple[int, int], SlicingPlan] = {}
        self._fixed_plan: SlicingPlan | None = None
        self._lstm = lstm
        kind, _, arg = cfg.predictor.partition(":")
        if kind == "lstm" and self._lstm is None:
            if not arg:
                raise ValueError("lstm predictor needs a model path (lstm:<path>)")
            self._lstm = load_predictor(arg)
        # demands beyond what the grid can hold produce the same plan
        _, iota_u = packet_size_rbs(cfg.grid.p_u, cfg.grid.m_u, cfg.grid.xi, cfg.grid.nu)
        _, iota_m = packet_size_rbs(cfg.grid.p_m, cfg.grid.m_m, cfg.grid.xi, cfg.grid.nu)
        area = cfg.grid.f * cfg.grid.s
        self._cap_u = area // iota_u + 1
        self._cap_m = area // iota_m + 1
        mean_u, mean_m = expected_arrivals_per_frame(cfg.traffic)
        self._prior = PredictionResult(round(mean_u), round(mean_m))

    def predict(self) -> PredictionResult:
        kind = self.cfg.predictor.split(":", 1)[0]
        if kind == "perfect":
            return perfect_predict(self.backlog)
        if not len(self.hist):
            return self._prior  # cold start: long-run mean arrivals
        if kind == "naive":
            return naive_predict(self.hist, self.cfg.traffic.k_u, self.cfg.traffic.k_m)
        return predict_backlog(self._lstm, self.hist, self.hist)

    def plan_for(self, pred: PredictionResult) -> SlicingPlan:
        kind, _, arg = self.cfg.slicer.partition(":")
        if kind == "fixed":
            if self._fixed_plan is None:
                self._fixed_plan = fixed_grid_slice(self.cfg.grid, int(arg) if arg else 5)
            return self._fixed_plan
        if kind == "counts":
            if self._fixed_plan is None:
                l_u, l_m = (int(v) for v in arg.split(","))
                self._fixed_plan = plan_from_counts(l_u, l_m)
            return self._fixed_plan
        key = (min(pred.k_hat_u, self._cap_u), min(pred.k_hat_m, self._cap_m))
        plan = self._plan_cache.get(key)
        if plan is None:
            plan = maxrect_slice(self.cfg.grid, key[0], key[1])
            self._plan_cache[key] = plan
        return plan


def run_frame(sim: SimulationState, cfg: SimulationConfig, rng: np.random.Generator) -> FrameResult:
    """Advance one frame: arrivals, prediction, slicing, contention, bookkeeping."""
    t = sim.frame
    arrivals_m = sample_mmtc_arrivals(cfg.traffic, t, rng)
    arrivals_u = sample_urllc_arrivals(cfg.traffic, t, rng)
    sim.backlog = update_backlog(
        sim.backlog, arrivals_m, arrivals_u, sim.failed_m, sim.failed_u, cfg.traffic
    )

    pred = sim.predict()
    plan = sim.plan_for(pred)
    l_u, l_m = plan.l_u, plan.l_m

    counts_u, pass_u, surv_u = contend_uniform(sim.backlog.active_u, l_u, cfg.acb, rng)
    counts_m, pass_m, surv_m = contend_uniform(sim.backlog.active_m, l_m, cfg.acb, rng)

    served_u = int(np.count_nonzero(surv_u == 1))
    served_m = int(np.count_nonzero(surv_m == 1))
    obs = Observation(
        v_s_u=served_u,
        v_c_u=int(np.count_nonzero(surv_u >= 2)),
        v_i_u=int(np.count_nonzero(surv_u == 0)),
        v_s_m=served_m,
        v_c_m=int(np.count_nonzero(surv_m >= 2)),
        v_i_m=int(np.count_nonzero(surv_m == 0)),
        frame_index=t,
    )
    record_observation(sim.hist, obs)

    result = FrameResult(
        frame_index=t,
        observation=obs,
        served_u=served_u,
        served_m=served_m,
        backlog=sim.backlog,
        plan_summary=(l_u, l_m),
        acb_counts=np.concatenate([counts_u, counts_m]),
        acb_pass=np.concatenate([pass_u, pass_m]),
        acb_survivors=np.concatenate([surv_u, surv_m]),
        prediction=pred,
    )
    sim.failed_u = result.failed_u
    sim.failed_m = result.failed_m
    sim.frame += 1
    return result


def run_simulation(
    cfg: SimulationConfig,
    rng: np.random.Generator | None = None,
    lstm: LstmPredictor | None = None,
) -> list[FrameResult]:
    """One realization: cfg.frames frames with persistent backlog and history."""
    cfg.validate()
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    sim = SimulationState(cfg, lstm=lstm)
    return [run_frame(sim, cfg, rng) for _ in range(cfg.frames)]


def realization_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    """Counter-split sub-seed: independent of order and of the total count."""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))


METRIC_COLUMNS = (
    "eta",
    "cl_u",
    "cl_m",
    "served_u",
    "served_m",
    "backlog_u",
    "backlog_m",
    "l_u",
    "l_m",
    "collisions_u",
    "collisions_m",
)


def realization_metrics(cfg: SimulationConfig, index: int, lstm: LstmPredictor | None = None):
    """Run realization `index` and reduce it to per-frame metric arrays."""
    rng = np.random.default_rng(realization_seed(cfg.seed, index))
    frames = run_simulation(cfg, rng=rng, lstm=lstm)
    out = {name: np.empty(len(frames)) for name in METRIC_COLUMNS}
    for i, fr in enumerate(frames):
        l_u, l_m = fr.plan_summary
        total = l_u + l_m
        out["eta"][i] = (fr.served_u + fr.served_m) / total if total else np.nan
        out["cl_u"][i] = fr.backlog.active_u / l_u if l_u else np.nan
        out["cl_m"][i] = fr.backlog.active_m / l_m if l_m else np.nan
        out["served_u"][i] = fr.served_u
        out["served_m"][i] = fr.served_m
        out["backlog_u"][i] = fr.backlog.active_u
        out["backlog_m"][i] = fr.backlog.active_m
        out["l_u"][i] = l_u
        out["l_m"][i] = l_m
        out["collisions_u"][i] = fr.observation.v_c_u
        out["collisions_m"][i] = fr.observation.v_c_m
    return out


def nanmean_quiet(data, axis=None):
    """nanmean that treats an all-NaN slice as NaN without a warning."""
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return np.nanmean(data, axis=axis)


@dataclass
class MonteCarloResult:
    """Per-frame metric stacks of shape (realizations, frames)."""

    stacks: dict[str, np.ndarray]
    cfg: SimulationConfig

    def mean(self, name: str) -> np.ndarray:
        return nanmean_quiet(self.stacks[name], axis=0)

    def stderr(self, name: str) -> np.ndarray:
        import warnings

        data = self.stacks[name]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            std = np.nanstd(data, axis=0, ddof=1) if data.shape[0] > 1 else np.zeros(data.shape[1])
        n = np.sum(np.isfinite(data), axis=0)
        return np.divide(std, np.sqrt(np.maximum(n, 1)))

    def steady_mean(self, name: str) -> float:
        """Scalar mean over the final steady-state window of the run."""
        per_frame = self.mean(name)
        start = int(len(per_frame) * (1.0 - self.cfg.steady_fraction))
        return float(nanmean_quiet(per_frame[start:]))


def run_monte_carlo(
    cfg: SimulationConfig,
    workers: int = 1,
    lstm: LstmPredictor | None = None,
) -> MonteCarloResult:
    """cfg.realizations independent runs, merged in index order."""
    cfg.validate()
    indices = range(cfg.realizations)
    if workers > 1 and cfg.realizations > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_mc_task, [(cfg, i, lstm) for i in indices]))
    else:
        results = [realization_metrics(cfg, i, lstm=lstm) for i in indices]
    stacks = {
        name: np.stack([r[name] for r in results]) for name in METRIC_COLUMNS
    }
    return MonteCarloResult(stacks, cfg)


def _mc_task(args):
    cfg, index, lstm = args
    return realization_metrics(cfg, index, lstm=lstm)
