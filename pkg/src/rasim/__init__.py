"""rasim: frame-based random access with traffic prediction, grid slicing and barring."""

__version__ = "0.1.0"

from .acb import AcbPolicy, acb_factor, acb_round, parse_policy
from .engine import (
    FrameResult,
    MonteCarloResult,
    SimulationConfig,
    run_frame,
    run_monte_carlo,
    run_simulation,
)
from .lstm import LstmModel, init_lstm, lstm_forward, lstm_train
from .metrics import channel_loading, normalized_throughput, predictor_mse
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
    save_predictor,
)
from .slicing import (
    ChannelAssignment,
    GridConfig,
    SlicingPlan,
    evaluate_objective,
    fixed_grid_slice,
    max_mmtc_channels,
    maxrect_slice,
    numerology_symbols,
    packet_size_rbs,
    validate_constraints,
)
from .traffic import (
    BacklogState,
    TrafficConfig,
    beta_activation_profile,
    sample_mmtc_arrivals,
    sample_urllc_arrivals,
    update_backlog,
)
