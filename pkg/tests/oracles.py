"""Shared test helpers: independent brute-force oracles and input generators.

The oracles here deliberately avoid the library's code paths (pure Python
sort/scan statistics, exhaustive nearest-neighbor search, counted confusion
matrices) so agreement with the implementation is meaningful evidence.
"""

from __future__ import annotations

import math
import random

from herdnav.camera import CameraIntrinsics, DEFAULT_INTRINSICS, PixelPoint, ground_sample_distance
from herdnav.controller import Detection, PolicyConfig, UavState
from herdnav.telemetry import AnnotationRecord, TelemetryRecord, reconcile


def box(
    cx: float,
    cy: float,
    w: float = 100.0,
    h: float = 100.0,
    frame: int = 0,
    behavior: str | None = None,
    track_id: int | None = None,
) -> Detection:
    return Detection(
        frame=frame,
        bbox_min=PixelPoint(cx - w / 2.0, cy - h / 2.0),
        bbox_max=PixelPoint(cx + w / 2.0, cy + h / 2.0),
        behavior=behavior,
        track_id=track_id,
    )


# ---------------------------------------------------------------- statistics

def summary_oracle(values: list[float]) -> dict[str, float]:
    """Brute-force sort/scan statistics, no numpy."""
    ys = sorted(values)
    n = len(ys)
    mean = sum(ys) / n
    var = sum((v - mean) ** 2 for v in ys) / (n - 1) if n > 1 else 0.0

    def quantile(p: float) -> float:
        pos = p * (n - 1)
        lo = math.floor(pos)
        hi = math.ceil(pos)
        return ys[lo] + (ys[hi] - ys[lo]) * (pos - lo)

    return {
        "count": n,
        "mean": mean,
        "std": math.sqrt(var),
        "min": ys[0],
        "p25": quantile(0.25),
        "p50": quantile(0.50),
        "p75": quantile(0.75),
        "max": ys[-1],
    }


def nearest_oracle(times: list[float], target: float) -> int:
    """Exhaustive scan for the closest timestamp; earlier index wins ties."""
    best = 0
    for i in range(1, len(times)):
        if abs(times[i] - target) < abs(times[best] - target):
            best = i
    return best


def confusion_oracle(pairs: list[tuple[bool, bool]]) -> dict[str, int]:
    """Count (predicted_move, expert_move) pairs one by one."""
    counts = {"tp": 0, "fp": 0, "fn": 0, "tn": 0}
    for pred_move, expert_move in pairs:
        if pred_move and expert_move:
            counts["tp"] += 1
        elif pred_move:
            counts["fp"] += 1
        elif expert_move:
            counts["fn"] += 1
        else:
            counts["tn"] += 1
    return counts


# ---------------------------------------------------------------- generators

def random_policy_config(rnd: random.Random) -> PolicyConfig:
    min_step = rnd.uniform(0.1, 0.9)
    max_step = min_step + rnd.uniform(0.5, 7.0)
    alt_min = rnd.uniform(5.0, 15.0)
    alt_max = alt_min + rnd.uniform(2.0 + 2.0 * min_step, 30.0)
    return PolicyConfig(
        deadband_px=rnd.uniform(20.0, 400.0),
        alt_min_m=alt_min,
        alt_max_m=alt_max,
        bbox_target_px=rnd.uniform(50.0, 200.0),
        bbox_tolerance_px=rnd.uniform(0.0, 50.0),
        max_step_m=max_step,
        min_step_m=min_step,
    )


def random_detections(
    rnd: random.Random, intrinsics: CameraIntrinsics, n: int | None = None
) -> list[Detection]:
    if n is None:
        n = rnd.randint(0, 8)
    detections = []
    for _ in range(n):
        w = rnd.uniform(1.0, 600.0)
        h = rnd.uniform(1.0, 600.0)
        cx = rnd.uniform(w / 2.0, intrinsics.image_width - w / 2.0)
        cy = rnd.uniform(h / 2.0, intrinsics.image_height - h / 2.0)
        detections.append(box(cx, cy, w, h))
    return detections


def random_state(rnd: random.Random, z_lo: float = 0.5, z_hi: float = 80.0) -> UavState:
    return UavState(
        position=(rnd.uniform(-50.0, 50.0), rnd.uniform(-50.0, 50.0), rnd.uniform(z_lo, z_hi))
    )


def all_in_band_case(
    rnd: random.Random, intrinsics: CameraIntrinsics, cfg: PolicyConfig
) -> tuple[list[Detection], UavState]:
    """Centroid within the deadband, box sizes within the target band, altitude in band."""
    cx0 = intrinsics.image_width / 2.0
    cy0 = intrinsics.image_height / 2.0
    size_lo = max(1.0, cfg.bbox_target_px - cfg.bbox_tolerance_px)
    size_hi = cfg.bbox_target_px + cfg.bbox_tolerance_px
    detections = []
    for _ in range(rnd.randint(1, 6)):
        dx = rnd.uniform(-cfg.deadband_px, cfg.deadband_px)
        dy = rnd.uniform(-cfg.deadband_px, cfg.deadband_px)
        s = rnd.uniform(size_lo, size_hi)
        detections.append(box(cx0 + dx, cy0 + dy, s, s))
    state = UavState(position=(0.0, 0.0, rnd.uniform(cfg.alt_min_m, cfg.alt_max_m)))
    return detections, state


def directional_case(
    rnd: random.Random,
    intrinsics: CameraIntrinsics,
    cfg: PolicyConfig,
    direction: str,
) -> tuple[list[Detection], UavState]:
    """Single detection whose centroid offset points strictly in one direction."""
    cx0 = intrinsics.image_width / 2.0
    cy0 = intrinsics.image_height / 2.0
    main = rnd.uniform(cfg.deadband_px * 1.01, min(cx0, cy0) - 30.0)
    other = rnd.uniform(-main * 0.99, main * 0.99)
    if direction == "right":
        dx, dy = main, other
    elif direction == "left":
        dx, dy = -main, other
    elif direction == "down":
        dx, dy = other, main
    elif direction == "up":
        dx, dy = other, -main
    else:
        raise ValueError(direction)
    detections = [box(cx0 + dx, cy0 + dy, 20.0, 20.0)]
    state = UavState(position=(0.0, 0.0, rnd.uniform(cfg.alt_min_m, cfg.alt_max_m)))
    return detections, state


# ---------------------------------------------------------------- missions

def descent_mission(
    alt_hi: float = 45.0,
    alt_lo: float = 20.0,
    descent_rate: float = 2.5,
    duration: float = 40.0,
    extent_m: float = 0.9,
    intrinsics: CameraIntrinsics = DEFAULT_INTRINSICS,
):
    """Expert descends alt_hi -> alt_lo, then hovers over a centered pair.

    Returns (telemetry, observations); box sizes track the camera model so a
    detection-driven policy sees geometry consistent with the altitudes.
    """
    descent_end = (alt_hi - alt_lo) / descent_rate
    telemetry = []
    t = 0.0
    while t <= duration:
        descending = t < descent_end
        telemetry.append(
            TelemetryRecord(
                timestamp=t,
                altitude=alt_hi - descent_rate * min(t, descent_end),
                vel_x=0.0,
                vel_y=0.0,
                vel_z=-descent_rate if descending else 0.0,
            )
        )
        t = round(t + 0.5, 6)

    cx0 = intrinsics.image_width / 2.0
    cy0 = intrinsics.image_height / 2.0
    annotations = []
    for frame in range(0, int(duration * 30), 15):  # every 0.5 s at 30 fps
        ts = frame / 30.0
        alt = alt_hi - descent_rate * min(ts, descent_end)
        size = extent_m / ground_sample_distance(intrinsics, alt)
        for track_id, (dx, dy, behavior) in enumerate(
            ((-40.0, -40.0, "Graze"), (40.0, 40.0, "Walk"))
        ):
            annotations.append(
                AnnotationRecord(
                    frame=frame,
                    timestamp=ts,
                    track_id=track_id,
                    behavior=behavior,
                    bbox_min=PixelPoint(cx0 + dx - size / 2.0, cy0 + dy - size / 2.0),
                    bbox_max=PixelPoint(cx0 + dx + size / 2.0, cy0 + dy + size / 2.0),
                )
            )
    observations = reconcile(telemetry, annotations, max_gap=0.5)
    return telemetry, observations


def hover_mission(
    altitude: float = 20.0,
    duration: float = 10.0,
    extent_m: float = 0.9,
    intrinsics: CameraIntrinsics = DEFAULT_INTRINSICS,
    drop_window: int | None = None,
):
    """Station-keeping over a centered pair whose boxes sit in the target band.

    drop_window removes every frame inside [w, w+1) to create an annotation gap.
    """
    telemetry = []
    t = 0.0
    while t <= duration:
        telemetry.append(
            TelemetryRecord(timestamp=t, altitude=altitude, vel_x=0.0, vel_y=0.0, vel_z=0.0)
        )
        t = round(t + 0.5, 6)

    cx0 = intrinsics.image_width / 2.0
    cy0 = intrinsics.image_height / 2.0
    size = extent_m / ground_sample_distance(intrinsics, altitude)
    annotations = []
    for frame in range(0, int(duration * 30), 15):
        ts = frame / 30.0
        if drop_window is not None and drop_window <= ts < drop_window + 1.0:
            continue
        for track_id, (dx, dy) in enumerate(((-30.0, 0.0), (30.0, 0.0))):
            annotations.append(
                AnnotationRecord(
                    frame=frame,
                    timestamp=ts,
                    track_id=track_id,
                    behavior="Graze",
                    bbox_min=PixelPoint(cx0 + dx - size / 2.0, cy0 + dy - size / 2.0),
                    bbox_max=PixelPoint(cx0 + dx + size / 2.0, cy0 + dy + size / 2.0),
                )
            )
    observations = reconcile(telemetry, annotations, max_gap=0.5)
    return telemetry, observations


def offset_mission(
    altitude: float = 20.0,
    duration: float = 16.0,
    offset_after: float = 8.0,
    offset_px: float = 400.0,
    extent_m: float = 0.9,
    intrinsics: CameraIntrinsics = DEFAULT_INTRINSICS,
):
    """Hovering pilot over a group that walks east out of the deadband mid-mission.

    Both policies must issue lateral moves for the second half, which keeps
    self-labelled scoring meaningful for the baseline (at least one positive).
    """
    telemetry = []
    t = 0.0
    while t <= duration:
        telemetry.append(
            TelemetryRecord(timestamp=t, altitude=altitude, vel_x=0.0, vel_y=0.0, vel_z=0.0)
        )
        t = round(t + 0.5, 6)

    cx0 = intrinsics.image_width / 2.0
    cy0 = intrinsics.image_height / 2.0
    size = extent_m / ground_sample_distance(intrinsics, altitude)
    annotations = []
    for frame in range(0, int(duration * 30), 15):
        ts = frame / 30.0
        dx = offset_px if ts >= offset_after else 0.0
        for track_id, spread in enumerate((-30.0, 30.0)):
            annotations.append(
                AnnotationRecord(
                    frame=frame,
                    timestamp=ts,
                    track_id=track_id,
                    behavior="Graze",
                    bbox_min=PixelPoint(
                        cx0 + dx + spread - size / 2.0, cy0 - size / 2.0
                    ),
                    bbox_max=PixelPoint(
                        cx0 + dx + spread + size / 2.0, cy0 + size / 2.0
                    ),
                )
            )
    observations = reconcile(telemetry, annotations, max_gap=0.5)
    return telemetry, observations


def random_mission(rnd: random.Random):
    """Random telemetry timeline plus annotation timestamps for join testing."""
    n_tel = rnd.randint(3, 60)
    times: list[float] = []
    t = rnd.uniform(0.0, 5.0)
    for _ in range(n_tel):
        t += rnd.uniform(0.05, 2.0)
        times.append(round(t, 4))
    telemetry = [
        TelemetryRecord(
            timestamp=ts,
            altitude=rnd.uniform(0.0, 80.0),
            vel_x=rnd.uniform(-5.0, 5.0),
            vel_y=rnd.uniform(-5.0, 5.0),
            vel_z=rnd.uniform(-3.0, 3.0),
        )
        for ts in times
    ]
    annotations = []
    for frame in range(rnd.randint(1, 40)):
        ts = round(rnd.uniform(times[0] - 2.0, times[-1] + 2.0), 4)
        annotations.append(
            AnnotationRecord(
                frame=frame,
                timestamp=ts,
                track_id=0,
                behavior="Graze",
                bbox_min=PixelPoint(10.0, 10.0),
                bbox_max=PixelPoint(60.0, 60.0),
            )
        )
    return telemetry, annotations
