"""Detection-driven navigation policies.

Two policies share the same inputs (one frame's detections plus UAV state):

  decide_baseline  - lateral-only tracker: recenter the herd centroid in the
                     image, hover inside a pixel deadband, never change
                     altitude.
  decide_improved  - adds altitude control: keep altitude inside a preferred
                     band, then steer bounding boxes toward a target pixel
                     size (distance proxy), and hover whenever everything is
                     already in band. Priority: altitude safety > lateral
                     recentering > box-size targeting > hover.

Command sign conventions (see camera module for the frame definitions):
  MoveX: + east  (the direction the centroid's pixel-x offset points)
  MoveY: + north (opposite the centroid's pixel-y offset, since image y
         points south)
  MoveZ: + up

Both deciders are pure functions of their arguments: deterministic,
detection-order invariant (means use exact summation), and safe to call
concurrently. Callers own the decision cadence (cfg.decision_period_s).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .camera import CameraIntrinsics, PixelPoint, ground_sample_distance
from .errors import NoDetectionsError

__all__ = [
    "Detection",
    "UavState",
    "CommandKind",
    "Command",
    "PolicyConfig",
    "herd_centroid",
    "mean_bbox_size",
    "decide_baseline",
    "decide_improved",
]


@dataclass(frozen=True)
class Detection:
    """One animal's bounding box in a video frame, axis-aligned, in pixels."""

    frame: int
    bbox_min: PixelPoint
    bbox_max: PixelPoint
    behavior: str | None = None
    track_id: int | None = None

    def __post_init__(self) -> None:
        if self.frame < 0:
            raise ValueError(f"frame index must be >= 0, got {self.frame}")
        if self.bbox_max.x - self.bbox_min.x < 1.0 or self.bbox_max.y - self.bbox_min.y < 1.0:
            raise ValueError(
                f"bounding box must span at least 1 px per axis, got "
                f"({self.bbox_min.x},{self.bbox_min.y})-({self.bbox_max.x},{self.bbox_max.y})"
            )

    @property
    def center(self) -> PixelPoint:
        return PixelPoint(
            (self.bbox_min.x + self.bbox_max.x) / 2.0,
            (self.bbox_min.y + self.bbox_max.y) / 2.0,
        )

    @property
    def width(self) -> float:
        return self.bbox_max.x - self.bbox_min.x

    @property
    def height(self) -> float:
        return self.bbox_max.y - self.bbox_min.y


@dataclass(frozen=True)
class UavState:
    """UAV kinematic sample: position (x, y, z=altitude), velocity, time."""

    position: tuple[float, float, float]
    velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)
    timestamp: float = 0.0

    @property
    def altitude(self) -> float:
        return self.position[2]


class CommandKind(enum.Enum):
    HOVER = "hover"
    MOVE_X = "move_x"
    MOVE_Y = "move_y"
    MOVE_Z = "move_z"


@dataclass(frozen=True)
class Command:
    """A discrete action: hover, or move along exactly one axis.

    magnitude is signed meters (0 for hover); its sign follows the axis
    conventions in the module docstring.
    """

    kind: CommandKind
    magnitude: float = 0.0

    def __post_init__(self) -> None:
        if self.kind is CommandKind.HOVER:
            if self.magnitude != 0.0:
                raise ValueError("hover commands must have zero magnitude")
        elif self.magnitude == 0.0:
            raise ValueError(f"{self.kind.value} commands must have nonzero magnitude")

    @classmethod
    def hover(cls) -> "Command":
        return cls(CommandKind.HOVER, 0.0)

    @property
    def is_move(self) -> bool:
        return self.kind is not CommandKind.HOVER

    @property
    def sign(self) -> int:
        """+1 / -1 for moves, 0 for hover."""
        if not self.is_move:
            return 0
        return 1 if self.magnitude > 0 else -1


@dataclass(frozen=True)
class PolicyConfig:
    """All policy tunables.

    Defaults: deadband is 5% of a 4K frame width; the altitude band and the
    100 px box target are the regime in which overhead behavior video stays
    analyzable; step limits keep 1 Hz moves within a gentle velocity range.
    """

    deadband_px: float = 192.0
    alt_min_m: float = 10.0
    alt_max_m: float = 30.0
    bbox_target_px: float = 100.0
    bbox_tolerance_px: float = 25.0
    max_step_m: float = 5.0
    min_step_m: float = 0.5
    decision_period_s: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.alt_min_m < self.alt_max_m:
            raise ValueError(
                f"altitude band requires 0 < alt_min_m < alt_max_m, got "
                f"[{self.alt_min_m}, {self.alt_max_m}]"
            )
        if self.deadband_px <= 0.0:
            raise ValueError(f"deadband_px must be positive, got {self.deadband_px}")
        if self.bbox_target_px <= 0.0:
            raise ValueError(f"bbox_target_px must be positive, got {self.bbox_target_px}")
        if self.bbox_tolerance_px < 0.0:
            raise ValueError(f"bbox_tolerance_px must be >= 0, got {self.bbox_tolerance_px}")
        if not 0.0 < self.min_step_m <= self.max_step_m:
            raise ValueError(
                f"step limits require 0 < min_step_m <= max_step_m, got "
                f"[{self.min_step_m}, {self.max_step_m}]"
            )
        if self.decision_period_s <= 0.0:
            raise ValueError(
                f"decision_period_s must be positive, got {self.decision_period_s}"
            )


def herd_centroid(detections: list[Detection]) -> PixelPoint:
    """Arithmetic mean of bounding-box centers.

    Uses math.fsum so the result is exact and therefore independent of
    detection order.

    Raises:
        NoDetectionsError: on an empty list.
    """
    if not detections:
        raise NoDetectionsError("herd_centroid requires at least one detection")
    n = len(detections)
    return PixelPoint(
        math.fsum(d.center.x for d in detections) / n,
        math.fsum(d.center.y for d in detections) / n,
    )


def mean_bbox_size(detections: list[Detection]) -> tuple[float, float]:
    """Mean bounding-box (width, height) in pixels, order invariant.

    Raises:
        NoDetectionsError: on an empty list.
    """
    if not detections:
        raise NoDetectionsError("mean_bbox_size requires at least one detection")
    n = len(detections)
    return (
        math.fsum(d.width for d in detections) / n,
        math.fsum(d.height for d in detections) / n,
    )


def _lateral_command(
    detections: list[Detection],
    state: UavState,
    intrinsics: CameraIntrinsics,
    cfg: PolicyConfig,
) -> Command | None:
    """Recentering move for a centroid outside the deadband, else None."""
    centroid = herd_centroid(detections)
    dx = centroid.x - intrinsics.image_width / 2.0
    dy = centroid.y - intrinsics.image_height / 2.0
    if abs(dx) <= cfg.deadband_px and abs(dy) <= cfg.deadband_px:
        return None

    gsd = ground_sample_distance(intrinsics, state.altitude)
    # Larger pixel offset picks the axis; exact ties resolve to x.
    if abs(dx) >= abs(dy):
        magnitude = min(max(abs(dx) * gsd, cfg.min_step_m), cfg.max_step_m)
        return Command(CommandKind.MOVE_X, math.copysign(magnitude, dx))
    magnitude = min(max(abs(dy) * gsd, cfg.min_step_m), cfg.max_step_m)
    # Centroid below center (pixel +y) means the herd is south: move -y.
    return Command(CommandKind.MOVE_Y, math.copysign(magnitude, -dy))


def decide_baseline(
    detections: list[Detection],
    state: UavState,
    intrinsics: CameraIntrinsics,
    cfg: PolicyConfig,
) -> Command:
    """Lateral-only centroid tracker; never commands an altitude change.

    Hovers when there are no detections or when the centroid sits within the
    deadband on both axes; otherwise moves along the axis with the larger
    pixel offset by the offset scaled to ground meters, clamped to
    [min_step_m, max_step_m].
    """
    if not detections:
        return Command.hover()
    return _lateral_command(detections, state, intrinsics, cfg) or Command.hover()


def decide_improved(
    detections: list[Detection],
    state: UavState,
    intrinsics: CameraIntrinsics,
    cfg: PolicyConfig,
) -> Command:
    """Altitude-aware tracker that prefers hovering once everything is in band.

    Decision order:
      1. Altitude safety: outside [alt_min_m, alt_max_m], climb/descend back
         toward the band (step toward the near edge, clamped to the step
         limits and capped so it cannot overshoot past the far edge).
      2. Lateral recentering, exactly as decide_baseline, when detections are
         present and the centroid is outside the deadband.
      3. Box-size targeting: with size = max(mean width, mean height), when
         size is outside bbox_target_px +/- bbox_tolerance_px, change altitude
         by dz = state.z * (size/target - 1) (the pinhole altitude that would
         produce the target size), clamped to the step limits and capped at
         the band edges; steps that cap below min_step_m become hover.
      4. Hover.

    With no detections only step 1 can act; in-band detection loss hovers.
    """
    z = state.altitude

    if z < cfg.alt_min_m:
        near, far = cfg.alt_min_m - z, cfg.alt_max_m - z
        magnitude = min(max(near, cfg.min_step_m), cfg.max_step_m, far)
        return Command(CommandKind.MOVE_Z, magnitude)
    if z > cfg.alt_max_m:
        near, far = z - cfg.alt_max_m, z - cfg.alt_min_m
        magnitude = min(max(near, cfg.min_step_m), cfg.max_step_m, far)
        return Command(CommandKind.MOVE_Z, -magnitude)

    if not detections:
        return Command.hover()

    lateral = _lateral_command(detections, state, intrinsics, cfg)
    if lateral is not None:
        return lateral

    mean_w, mean_h = mean_bbox_size(detections)
    size = max(mean_w, mean_h)
    if abs(size - cfg.bbox_target_px) > cfg.bbox_tolerance_px:
        dz = z * (size / cfg.bbox_target_px - 1.0)
        dz = min(max(dz, -cfg.max_step_m), cfg.max_step_m)
        # Stay inside the altitude band.
        dz = min(max(dz, cfg.alt_min_m - z), cfg.alt_max_m - z)
        if abs(dz) >= cfg.min_step_m:
            return Command(CommandKind.MOVE_Z, dz)

    return Command.hover()
