"""Detection-driven UAV navigation toolkit for wildlife behavior video.

Library layout:
  camera      nadir pinhole model (ground sample distance, projection)
  controller  baseline and altitude-aware flight policies
  telemetry   log/annotation parsing, reconciliation, usability, statistics
  replay      expert-action labelling and policy agreement scoring
  sim         seeded closed-loop kinematic simulator
  cli         analyze / evaluate / simulate entry points
"""

from .camera import (
    DEFAULT_INTRINSICS,
    CameraIntrinsics,
    PixelPoint,
    ground_sample_distance,
    pixel_offset_to_ground_offset,
    project_target,
)
from .controller import (
    Command,
    CommandKind,
    Detection,
    PolicyConfig,
    UavState,
    decide_baseline,
    decide_improved,
    herd_centroid,
    mean_bbox_size,
)
from .errors import ConfigError, DataError, HerdNavError, NoDetectionsError, SchemaError
from .replay import ActionLabel, EvalReport, ReplayStep, label_expert_actions, replay, score
from .sim import HerdState, SimConfig, SimMetrics, SimResult, init_herd, run, sense, step_herd
from .telemetry import (
    UNUSABLE_BEHAVIORS,
    AnnotationRecord,
    ColumnMapping,
    FrameObservation,
    SummaryStats,
    TelemetryRecord,
    UsabilityReport,
    behavior_altitude_histogram,
    parse_annotations,
    parse_telemetry,
    reconcile,
    summarize,
    usability_report,
)

__version__ = "0.1.0"
