"""Windowed flood detection from traffic volume and flow-count statistics.

The pipeline: train a profile of normal traffic, compare each incoming
window's byte volume and active-flow count against tolerance-factor
thresholds, classify the flows of alerting windows against six-sigma
per-flow byte bands, then drop attack flows and throttle suspicious ones.
A synthetic traffic generator and an evaluation harness close the loop.
"""

from ._kernels import BACKEND
from .baseline import NormalProfile, train_profile
from .characterizer import (
    Characterization,
    ControlLimits,
    FlowState,
    characterize,
    characterize_run,
    classify_flow,
    control_limits,
)
from .detector import (
    DetectionOutcome,
    Thresholds,
    Trigger,
    detect,
    make_thresholds,
    run_detector,
    vba_detect,
)
from .errors import (
    ConfigError,
    ContractError,
    FileFormatError,
    FlowSentryError,
    InsufficientDataError,
    InvalidParameterError,
)
from .evaluation import Metrics, Mode, RocPoint, compare_vba, evaluate_run, roc_sweep
from .model import (
    FlowKey,
    PacketRecord,
    Protocol,
    TimeWindow,
    Trace,
    WindowStats,
    aggregate_window,
    window_stream,
)
from .responder import (
    ResponsePolicy,
    apply_response,
    apply_response_trace,
    attack_strength,
)
from .trafficgen import (
    PRESET_NAMES,
    GroundTruth,
    ScenarioConfig,
    build_scenario,
    gen_attack,
    gen_legitimate,
    normal_twin,
    preset_config,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Characterization",
    "ConfigError",
    "ContractError",
    "ControlLimits",
    "DetectionOutcome",
    "FileFormatError",
    "FlowKey",
    "FlowSentryError",
    "FlowState",
    "GroundTruth",
    "InsufficientDataError",
    "InvalidParameterError",
    "Metrics",
    "Mode",
    "NormalProfile",
    "PRESET_NAMES",
    "PacketRecord",
    "Protocol",
    "ResponsePolicy",
    "RocPoint",
    "ScenarioConfig",
    "Thresholds",
    "TimeWindow",
    "Trace",
    "Trigger",
    "WindowStats",
    "aggregate_window",
    "apply_response",
    "apply_response_trace",
    "attack_strength",
    "build_scenario",
    "characterize",
    "characterize_run",
    "classify_flow",
    "compare_vba",
    "control_limits",
    "detect",
    "evaluate_run",
    "gen_attack",
    "gen_legitimate",
    "make_thresholds",
    "normal_twin",
    "preset_config",
    "roc_sweep",
    "run_detector",
    "train_profile",
    "vba_detect",
    "window_stream",
    "__version__",
]
