from ._cli import main
from ._config import InitMode, ResampleMode, TrackerConfig, Variant
from ._eval import MetricsReport, evaluate, outputs_by_frame
from ._exceptions import (
    ConfigError,
    ConfigErrors,
    EvaluationError,
    FrameOrderError,
    ParseError,
    ParseErrors,
    SequenceError,
)
from ._models import BBox, Detection, FrameInput, Track, TrackOutput, TrackStatus
from ._synth import Scenario, generate, preset
from ._tracker import Tracker, TrackerState, reset, step, track_sequence

__all__ = [
    "BBox",
    "ConfigError",
    "ConfigErrors",
    "Detection",
    "evaluate",
    "EvaluationError",
    "FrameInput",
    "FrameOrderError",
    "generate",
    "InitMode",
    "main",
    "MetricsReport",
    "outputs_by_frame",
    "ParseError",
    "ParseErrors",
    "preset",
    "reset",
    "ResampleMode",
    "Scenario",
    "SequenceError",
    "step",
    "Track",
    "Tracker",
    "TrackerConfig",
    "TrackerState",
    "TrackOutput",
    "track_sequence",
    "TrackStatus",
    "Variant",
]
