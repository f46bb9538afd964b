"""Flight-log ingestion, annotation reconciliation, and descriptive statistics.

A mission pairs two delimited text files:

  telemetry   - timestamped UAV state samples (altitude, 3-axis velocity).
                Export schemas vary by vendor, so parsing goes through a
                ColumnMapping that names the columns; a combined
                "vx;vy;vz" speed-vector column is supported directly.
  annotations - per-frame animal rows (frame, track id, behavior label,
                bounding box). Frame timestamps derive from the video start
                time at a constant frame rate when no timestamp column exists.

reconcile() joins every annotated frame to its nearest-in-time telemetry
sample, flagging frames whose gap exceeds max_gap instead of dropping them,
so downstream accounting always covers the full input. A frame is usable when
at least one of its detections carries a behavior outside the unusable set
(occluded / out of frame / out of focus); usability_report() can instead
count individual annotation rows via mode="row".

Telemetry typically starts before and ends after the video (power-on to
power-off), so rows outside the annotated window survive parsing but never
join a frame and therefore never enter frame statistics.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .camera import PixelPoint
from .controller import Detection
from .errors import DataError, SchemaError

__all__ = [
    "UNUSABLE_BEHAVIORS",
    "VIDEO_FPS",
    "TelemetryRecord",
    "AnnotationRecord",
    "FrameObservation",
    "SummaryStats",
    "ColumnMapping",
    "UsabilityReport",
    "parse_telemetry",
    "parse_annotations",
    "reconcile",
    "usability_report",
    "summarize",
    "behavior_altitude_histogram",
]

# Behavior labels that mark an annotation as unusable for behavior inference.
UNUSABLE_BEHAVIORS = frozenset({"Occluded", "Out of Frame", "Out of Focus"})

VIDEO_FPS = 30.0


@dataclass(frozen=True)
class TelemetryRecord:
    """One UAV state sample, timestamped in seconds since the mission epoch."""

    timestamp: float
    altitude: float
    vel_x: float
    vel_y: float
    vel_z: float
    frame: int | None = None

    @property
    def speed(self) -> float:
        """3-D speed magnitude in m/s."""
        return math.sqrt(self.vel_x**2 + self.vel_y**2 + self.vel_z**2)


@dataclass(frozen=True)
class AnnotationRecord:
    """One animal's annotation row for one video frame."""

    frame: int
    timestamp: float
    track_id: int
    behavior: str
    bbox_min: PixelPoint
    bbox_max: PixelPoint

    def __post_init__(self) -> None:
        if self.bbox_max.x <= self.bbox_min.x or self.bbox_max.y <= self.bbox_min.y:
            raise ValueError(
                f"frame {self.frame} track {self.track_id}: bbox min must be < max per axis"
            )

    def to_detection(self) -> Detection:
        return Detection(
            frame=self.frame,
            bbox_min=self.bbox_min,
            bbox_max=self.bbox_max,
            behavior=self.behavior,
            track_id=self.track_id,
        )


@dataclass(frozen=True)
class FrameObservation:
    """One annotated frame joined to its nearest telemetry sample.

    telemetry is None (and telemetry_missing True) when no sample lies within
    the join gap; such frames stay in usability counts but carry no UAV state.
    """

    frame: int
    timestamp: float
    detections: tuple[Detection, ...]
    telemetry: TelemetryRecord | None
    usable: bool
    telemetry_missing: bool = False


@dataclass(frozen=True)
class SummaryStats:
    """Descriptive statistics of one series (sample std, linear-interp quartiles)."""

    count: int
    mean: float
    std: float
    min: float
    p25: float
    p50: float
    p75: float
    max: float

    def as_items(self) -> list[tuple[str, float | int]]:
        """Stable (name, value) ordering for report serialization."""
        return [
            ("count", self.count),
            ("mean", self.mean),
            ("std", self.std),
            ("min", self.min),
            ("p25", self.p25),
            ("p50", self.p50),
            ("p75", self.p75),
            ("max", self.max),
        ]


@dataclass(frozen=True)
class ColumnMapping:
    """Names the telemetry columns holding each required field.

    Velocity comes either from three scalar columns (vel_x/vel_y/vel_z) or
    from one speed_vector column containing three values joined by
    vector_delimiter; exactly one of the two forms must be configured.
    """

    timestamp: str = "timestamp"
    altitude: str = "altitude"
    vel_x: str | None = "vel_x"
    vel_y: str | None = "vel_y"
    vel_z: str | None = "vel_z"
    speed_vector: str | None = None
    frame: str | None = None
    delimiter: str = ","
    vector_delimiter: str = ";"

    def __post_init__(self) -> None:
        scalar = (self.vel_x, self.vel_y, self.vel_z)
        if self.speed_vector is not None:
            if any(c is not None for c in scalar):
                raise ValueError(
                    "configure either speed_vector or vel_x/vel_y/vel_z, not both"
                )
        elif any(c is None for c in scalar):
            raise ValueError("velocity mapping incomplete: need vel_x, vel_y and vel_z")


def _open_text(source: str | Path | IO[str] | bytes) -> IO[str]:
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline="")
    return source


def _require_columns(header: list[str], needed: Iterable[str], what: str) -> dict[str, int]:
    index = {name: i for i, name in enumerate(header)}
    missing = [name for name in needed if name not in index]
    if missing:
        raise SchemaError(f"{what}: missing column(s) {', '.join(sorted(missing))}")
    return index


def parse_telemetry(
    source: str | Path | IO[str] | bytes,
    mapping: ColumnMapping | None = None,
) -> list[TelemetryRecord]:
    """Parse a delimited telemetry file into timestamp-ordered records.

    Rows with unparseable required cells and rows that break strictly
    increasing timestamp order are collected and raised together, naming the
    offending 1-based line numbers.

    Raises:
        SchemaError: a mapped column is absent from the header.
        DataError: malformed cells, ordering violations, or an empty file.
    """
    mapping = mapping or ColumnMapping()
    fh = _open_text(source)
    reader = csv.reader(fh, delimiter=mapping.delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("telemetry: empty input, expected a header row") from None
    header = [h.strip() for h in header]

    needed = [mapping.timestamp, mapping.altitude]
    if mapping.speed_vector is not None:
        needed.append(mapping.speed_vector)
    else:
        needed.extend([mapping.vel_x, mapping.vel_y, mapping.vel_z])
    if mapping.frame is not None:
        needed.append(mapping.frame)
    index = _require_columns(header, needed, "telemetry")

    records: list[TelemetryRecord] = []
    bad_lines: list[str] = []
    order_lines: list[int] = []
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            timestamp = float(row[index[mapping.timestamp]])
            altitude = float(row[index[mapping.altitude]])
            if mapping.speed_vector is not None:
                parts = row[index[mapping.speed_vector]].split(mapping.vector_delimiter)
                if len(parts) != 3:
                    raise ValueError(f"speed vector needs 3 components, got {len(parts)}")
                vx, vy, vz = (float(p) for p in parts)
            else:
                vx = float(row[index[mapping.vel_x]])
                vy = float(row[index[mapping.vel_y]])
                vz = float(row[index[mapping.vel_z]])
            frame = None
            if mapping.frame is not None:
                cell = row[index[mapping.frame]].strip()
                frame = int(cell) if cell else None
            if altitude < 0.0:
                raise ValueError(f"altitude must be >= 0, got {altitude}")
        except (ValueError, IndexError) as exc:
            bad_lines.append(f"line {line_no}: {exc}")
            continue
        if records and timestamp <= records[-1].timestamp:
            order_lines.append(line_no)
            continue
        records.append(
            TelemetryRecord(
                timestamp=timestamp, altitude=altitude,
                vel_x=vx, vel_y=vy, vel_z=vz, frame=frame,
            )
        )

    if bad_lines:
        raise DataError("telemetry: unparseable row(s): " + "; ".join(bad_lines))
    if order_lines:
        raise DataError(
            "telemetry: timestamps not strictly increasing at line(s) "
            + ", ".join(str(n) for n in order_lines)
        )
    return records


def parse_annotations(
    source: str | Path | IO[str] | bytes,
    video_start: float = 0.0,
    fps: float = VIDEO_FPS,
    delimiter: str = ",",
) -> list[AnnotationRecord]:
    """Parse a delimited annotation file into frame-ordered records.

    Expected columns: frame, track_id, behavior, x_min, y_min, x_max, y_max,
    plus an optional timestamp column. Without one, a frame's timestamp is
    video_start + frame / fps.

    Raises:
        SchemaError: required columns absent.
        DataError: malformed cells, duplicate (frame, track_id) rows, or an
            empty file.
    """
    fh = _open_text(source)
    reader = csv.reader(fh, delimiter=delimiter)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DataError("annotations: empty input, expected a header row") from None

    required = ["frame", "track_id", "behavior", "x_min", "y_min", "x_max", "y_max"]
    index = _require_columns(header, required, "annotations")
    ts_col = header.index("timestamp") if "timestamp" in header else None

    records: list[AnnotationRecord] = []
    bad_lines: list[str] = []
    seen: set[tuple[int, int]] = set()
    duplicates: list[str] = []
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            frame = int(row[index["frame"]])
            track_id = int(row[index["track_id"]])
            behavior = row[index["behavior"]].strip()
            bbox_min = PixelPoint(float(row[index["x_min"]]), float(row[index["y_min"]]))
            bbox_max = PixelPoint(float(row[index["x_max"]]), float(row[index["y_max"]]))
            if ts_col is not None and row[ts_col].strip():
                timestamp = float(row[ts_col])
            else:
                timestamp = video_start + frame / fps
            record = AnnotationRecord(
                frame=frame, timestamp=timestamp, track_id=track_id,
                behavior=behavior, bbox_min=bbox_min, bbox_max=bbox_max,
            )
        except (ValueError, IndexError) as exc:
            bad_lines.append(f"line {line_no}: {exc}")
            continue
        key = (frame, track_id)
        if key in seen:
            duplicates.append(f"line {line_no}: duplicate frame={frame} track_id={track_id}")
            continue
        seen.add(key)
        records.append(record)

    if bad_lines:
        raise DataError("annotations: unparseable row(s): " + "; ".join(bad_lines))
    if duplicates:
        raise DataError("annotations: " + "; ".join(duplicates))
    records.sort(key=lambda r: (r.frame, r.track_id))
    return records


def reconcile(
    telemetry: list[TelemetryRecord],
    annotations: list[AnnotationRecord],
    max_gap: float = 0.5,
) -> list[FrameObservation]:
    """Join each annotated frame to its nearest-in-time telemetry sample.

    One FrameObservation per distinct frame, ordered by frame. Frames whose
    nearest sample is further than max_gap away are flagged telemetry_missing
    rather than dropped, so len(output) always equals the number of distinct
    annotated frames. Equidistant samples resolve to the earlier one.

    Raises:
        DataError: empty telemetry.
    """
    if not telemetry:
        raise DataError("reconcile: telemetry is empty")

    times = [t.timestamp for t in telemetry]
    by_frame: dict[int, list[AnnotationRecord]] = {}
    for record in annotations:
        by_frame.setdefault(record.frame, []).append(record)

    observations: list[FrameObservation] = []
    for frame in sorted(by_frame):
        rows = by_frame[frame]
        timestamp = rows[0].timestamp
        i = bisect.bisect_left(times, timestamp)
        candidates = [j for j in (i - 1, i) if 0 <= j < len(times)]
        best = min(candidates, key=lambda j: (abs(times[j] - timestamp), j))
        gap = abs(times[best] - timestamp)
        joined = telemetry[best] if gap <= max_gap else None
        detections = tuple(r.to_detection() for r in rows)
        observations.append(
            FrameObservation(
                frame=frame,
                timestamp=timestamp,
                detections=detections,
                telemetry=joined,
                usable=any(d.behavior not in UNUSABLE_BEHAVIORS for d in detections),
                telemetry_missing=joined is None,
            )
        )
    return observations


@dataclass(frozen=True)
class UsabilityReport:
    """Usable-versus-total accounting; rate is None for empty input."""

    usable_frames: int
    total_frames: int
    usable_minutes: float
    total_minutes: float
    rate: float | None
    mode: str = "frame"

    def as_items(self) -> list[tuple[str, object]]:
        return [
            ("mode", self.mode),
            ("usable_frames", self.usable_frames),
            ("total_frames", self.total_frames),
            ("usable_minutes", self.usable_minutes),
            ("total_minutes", self.total_minutes),
            ("rate", self.rate),
        ]


def usability_report(
    observations: list[FrameObservation],
    mode: str = "frame",
    fps: float = VIDEO_FPS,
) -> UsabilityReport:
    """Usable/total frame counts, minutes at the video frame rate, and rate.

    mode="frame" (default) counts a frame usable when at least one of its
    detections is usable; mode="row" counts individual annotation rows
    instead (minutes still derive from frame counts).
    """
    if mode not in ("frame", "row"):
        raise ValueError(f"usability mode must be 'frame' or 'row', got {mode!r}")

    total_frames = len(observations)
    usable_frames = sum(1 for o in observations if o.usable)
    if mode == "frame":
        usable_count, total_count = usable_frames, total_frames
    else:
        total_count = sum(len(o.detections) for o in observations)
        usable_count = sum(
            1
            for o in observations
            for d in o.detections
            if d.behavior not in UNUSABLE_BEHAVIORS
        )
    return UsabilityReport(
        usable_frames=usable_count,
        total_frames=total_count,
        usable_minutes=usable_frames / (fps * 60.0),
        total_minutes=total_frames / (fps * 60.0),
        rate=(usable_count / total_count) if total_count else None,
        mode=mode,
    )


def summarize(series: list[float]) -> SummaryStats:
    """Descriptive statistics of a non-empty series.

    std is the sample standard deviation (n-1 denominator; 0.0 for a single
    value) and quartiles use linear interpolation between closest ranks. The
    series is sorted internally first, so results are exactly permutation
    invariant.

    Raises:
        DataError: empty series.
    """
    if len(series) == 0:
        raise DataError("summarize: series is empty")
    xs = np.sort(np.asarray(series, dtype=float))
    std = float(np.std(xs, ddof=1)) if xs.size > 1 else 0.0
    p25, p50, p75 = (float(q) for q in np.percentile(xs, [25.0, 50.0, 75.0]))
    return SummaryStats(
        count=int(xs.size),
        mean=float(np.mean(xs)),
        std=std,
        min=float(xs[0]),
        p25=p25,
        p50=p50,
        p75=p75,
        max=float(xs[-1]),
    )


def behavior_altitude_histogram(
    observations: list[FrameObservation],
) -> list[tuple[str, list[float]]]:
    """Altitude samples grouped per behavior, most frequent behavior first.

    Every usable detection in a telemetry-joined frame contributes its
    frame's altitude under its behavior label. Output order is total count
    descending with alphabetical tie-break, making the report bytes a total
    function of the input.
    """
    buckets: dict[str, list[float]] = {}
    for obs in observations:
        if obs.telemetry is None:
            continue
        for det in obs.detections:
            if det.behavior is None or det.behavior in UNUSABLE_BEHAVIORS:
                continue
            buckets.setdefault(det.behavior, []).append(obs.telemetry.altitude)
    ordered = sorted(buckets.items(), key=lambda kv: (-len(kv[1]), kv[0]))
    return [(behavior, altitudes) for behavior, altitudes in ordered]
