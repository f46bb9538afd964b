#!/usr/bin/env python3
"""Regenerate the bundled sample missions in sample_data/.

Two hand-designed missions exercise the full pipeline:

  m01  "descent": the pilot descends from 45 m into the preferred band and
       then station-keeps at 20 m over a centered two-animal group whose box
       sizes track the camera model. The altitude-aware policy reproduces
       the descent; the lateral-only baseline cannot, so evaluate shows a
       clear accuracy gap between the two.
  m02  "hover": station-keeping at 15 m over one animal whose annotations
       alternate Graze / Occluded, giving an exact 50% frame usability rate.

Run from the repository root:  python3 scripts/make_sample_data.py
"""

from __future__ import annotations

from pathlib import Path

from herdnav.camera import DEFAULT_INTRINSICS, ground_sample_distance

OUT = Path(__file__).resolve().parent.parent / "sample_data"

CX = DEFAULT_INTRINSICS.image_width / 2.0
CY = DEFAULT_INTRINSICS.image_height / 2.0
ANIMAL_EXTENT_M = 0.9
FPS = 30
FRAME_STRIDE = 10  # annotate every 10th frame (3 per second)


def m01_altitude(t: float) -> float:
    """Descend 45 -> 20 m during the first 10 s, then hold."""
    return 45.0 - 2.5 * min(t, 10.0)


def write_m01() -> None:
    tel_lines = ["timestamp,altitude,vel_x,vel_y,vel_z"]
    t = 0.0
    while t <= 40.0:
        vz = -2.5 if t < 10.0 else 0.0
        tel_lines.append(f"{t},{m01_altitude(t)},0.0,0.0,{vz}")
        t = round(t + 0.5, 6)
    (OUT / "m01_telemetry.csv").write_text("\n".join(tel_lines) + "\n")

    ann_lines = ["frame,track_id,behavior,x_min,y_min,x_max,y_max"]
    offsets = ((-40.0, -40.0, "Graze"), (40.0, 40.0, "Walk"))
    for frame in range(0, 40 * FPS, FRAME_STRIDE):
        alt = m01_altitude(frame / FPS)
        size = ANIMAL_EXTENT_M / ground_sample_distance(DEFAULT_INTRINSICS, alt)
        for track_id, (dx, dy, behavior) in enumerate(offsets):
            x_min = CX + dx - size / 2.0
            y_min = CY + dy - size / 2.0
            ann_lines.append(
                f"{frame},{track_id},{behavior},"
                f"{x_min:.3f},{y_min:.3f},{x_min + size:.3f},{y_min + size:.3f}"
            )
    (OUT / "m01_annotations.csv").write_text("\n".join(ann_lines) + "\n")


def write_m02() -> None:
    tel_lines = ["timestamp,altitude,vel_x,vel_y,vel_z"]
    t = 0.0
    while t <= 20.0:
        tel_lines.append(f"{t},15.0,0.1,0.05,0.0")
        t = round(t + 0.5, 6)
    (OUT / "m02_telemetry.csv").write_text("\n".join(tel_lines) + "\n")

    size = ANIMAL_EXTENT_M / ground_sample_distance(DEFAULT_INTRINSICS, 15.0)
    ann_lines = ["frame,track_id,behavior,x_min,y_min,x_max,y_max"]
    for i, frame in enumerate(range(0, 20 * FPS, FRAME_STRIDE)):
        behavior = "Graze" if i % 2 == 0 else "Occluded"
        x_min = CX - size / 2.0
        y_min = CY - size / 2.0
        ann_lines.append(
            f"{frame},0,{behavior},"
            f"{x_min:.3f},{y_min:.3f},{x_min + size:.3f},{y_min + size:.3f}"
        )
    (OUT / "m02_annotations.csv").write_text("\n".join(ann_lines) + "\n")


def write_manifest() -> None:
    (OUT / "manifest.txt").write_text(
        "# bundled sample missions\n"
        "mission.m01.telemetry = m01_telemetry.csv\n"
        "mission.m01.annotations = m01_annotations.csv\n"
        "mission.m01.video_start = 0.0\n"
        "mission.m02.telemetry = m02_telemetry.csv\n"
        "mission.m02.annotations = m02_annotations.csv\n"
        "mission.m02.video_start = 0.0\n"
    )


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    write_m01()
    write_m02()
    write_manifest()
    print(f"wrote sample missions to {OUT}")


if __name__ == "__main__":
    main()
