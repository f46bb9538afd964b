"""Nadir pinhole-camera model tying altitude, pixels, and ground distances.

Coordinate conventions (used consistently by the controller and simulator):

  Ground frame (right-handed):
    - x: east, y: north, z: up (z = altitude above flat ground at z = 0)
  Image frame:
    - origin top-left, u/x: right (pixels), v/y: down (pixels)
  Camera:
    - rigidly mounted pointing straight down (nadir), UAV heading north,
      no gimbal or yaw modelling
    - top of the frame is therefore ground north, right of the frame is
      ground east:  pixel +x <-> ground +x (east),  pixel +y <-> ground -y

Under this model one pixel covers a square ground patch whose side is the
ground sample distance (GSD); GSD grows linearly with altitude, so bounding
box size in pixels is a direct proxy for UAV-to-animal distance.

Known limitations: no lens distortion, no terrain relief, no gimbal pitch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "CameraIntrinsics",
    "PixelPoint",
    "DEFAULT_INTRINSICS",
    "ground_sample_distance",
    "pixel_offset_to_ground_offset",
    "project_target",
]


@dataclass(frozen=True)
class CameraIntrinsics:
    """Minimal intrinsics for a nadir camera: sensor size and horizontal FOV."""

    image_width: int
    image_height: int
    horizontal_fov: float  # radians

    def __post_init__(self) -> None:
        if self.image_width < 64 or self.image_height < 64:
            raise ValueError(
                f"image dimensions must be >= 64 px, got "
                f"{self.image_width}x{self.image_height}"
            )
        if not 0.0 < self.horizontal_fov < math.pi:
            raise ValueError(
                f"horizontal_fov must be in (0, pi) radians, got {self.horizontal_fov}"
            )

    @property
    def center(self) -> "PixelPoint":
        return PixelPoint(self.image_width / 2.0, self.image_height / 2.0)


@dataclass(frozen=True)
class PixelPoint:
    """A point (or offset) in image coordinates, in pixels."""

    x: float
    y: float


# 4K sensor with ~88 deg horizontal FOV; the class of optics on small camera
# drones commonly used for wildlife video. Overridable everywhere via config.
DEFAULT_INTRINSICS = CameraIntrinsics(
    image_width=3840, image_height=2160, horizontal_fov=1.536
)


def ground_sample_distance(intrinsics: CameraIntrinsics, altitude: float) -> float:
    """Ground meters covered by one pixel at the given altitude.

    gsd = 2 * altitude * tan(hfov / 2) / image_width; strictly increasing in
    altitude for fixed intrinsics.

    Raises:
        ValueError: if altitude is not positive.
    """
    if altitude <= 0.0:
        raise ValueError(f"altitude must be positive, got {altitude}")
    return 2.0 * altitude * math.tan(intrinsics.horizontal_fov / 2.0) / intrinsics.image_width


def pixel_offset_to_ground_offset(
    intrinsics: CameraIntrinsics, altitude: float, offset: PixelPoint
) -> tuple[float, float]:
    """Scale a pixel offset to a ground offset in meters, sign preserved.

    This is a pure per-axis scaling by the GSD; it does not apply the
    image-y/ground-north flip (callers that need a direction, like the
    controller, handle the sign convention themselves).
    """
    gsd = ground_sample_distance(intrinsics, altitude)
    return (offset.x * gsd, offset.y * gsd)


def project_target(
    intrinsics: CameraIntrinsics,
    uav_position: tuple[float, float, float],
    target: tuple[float, float],
    target_size: tuple[float, float],
    frame: int = 0,
):
    """Project a ground target into the image; the simulator's synthetic detector.

    Args:
        uav_position: (x, y, z) in meters, z > 0.
        target: ground (x, y) of the target center, meters (at z = 0).
        target_size: (east-west extent, north-south extent) in meters.
        frame: frame index stamped on the returned detection.

    Returns:
        A Detection whose center is the projected target center and whose box
        is target_size / gsd clipped to the image, or None when the target
        center falls outside the ground footprint or the clipped box would be
        smaller than one pixel (too small to detect).

    Raises:
        ValueError: if the UAV altitude is not positive.
    """
    # Local import: controller depends on camera for GSD, so Detection cannot
    # be imported at module load time without a cycle.
    from .controller import Detection

    ux, uy, uz = uav_position
    gsd = ground_sample_distance(intrinsics, uz)

    cx = intrinsics.image_width / 2.0
    cy = intrinsics.image_height / 2.0
    px = cx + (target[0] - ux) / gsd
    py = cy - (target[1] - uy) / gsd  # image y grows southward

    if not (0.0 <= px <= intrinsics.image_width and 0.0 <= py <= intrinsics.image_height):
        return None

    half_w = (target_size[0] / gsd) / 2.0
    half_h = (target_size[1] / gsd) / 2.0
    x_min = max(0.0, px - half_w)
    y_min = max(0.0, py - half_h)
    x_max = min(float(intrinsics.image_width), px + half_w)
    y_max = min(float(intrinsics.image_height), py + half_h)

    if x_max - x_min < 1.0 or y_max - y_min < 1.0:
        return None

    return Detection(
        frame=frame,
        bbox_min=PixelPoint(x_min, y_min),
        bbox_max=PixelPoint(x_max, y_max),
    )
