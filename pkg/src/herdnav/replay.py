"""Score a policy's commands against expert-pilot actions recovered from telemetry.

The recorded mission is cut into fixed decision windows (default 1 s, the
policy cadence). For each window:

  label_expert_actions  averages the recorded velocity components; below the
                        hover threshold on every axis the pilot is labelled
                        Hover, otherwise the dominant axis and its sign become
                        a signed single-axis move label.
  replay                feeds the window's reconciled frame (detections + the
                        joined UAV state) to a policy and records the command
                        it would have issued. Replay is open loop: commands
                        never alter the recorded trajectory.
  score                 exact agreement = same kind and sign (magnitudes are
                        continuous and therefore ignored), plus a move-vs-
                        hover confusion matrix where "move" is the positive
                        class.

Windows with no usable frame still score against the expert label (hover is
emitted and the window flagged) so agreement is not inflated by dropping hard
windows; the flagged count is part of the report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .camera import CameraIntrinsics
from .controller import Command, CommandKind, PolicyConfig, UavState, decide_baseline, decide_improved
from .errors import DataError
from .telemetry import FrameObservation, TelemetryRecord

__all__ = [
    "DEFAULT_HOVER_SPEED",
    "ActionLabel",
    "ReplayStep",
    "EvalReport",
    "POLICIES",
    "label_expert_actions",
    "replay",
    "score",
]

# All mean window velocities below this (m/s) read as deliberate hovering;
# usable-footage velocity medians sit at zero with the 75th percentile near
# 0.6 m/s, so this cleanly splits station-keeping from travel.
DEFAULT_HOVER_SPEED = 0.25

POLICIES: dict[str, Callable[..., Command]] = {
    "baseline": decide_baseline,
    "improved": decide_improved,
}


@dataclass(frozen=True)
class ActionLabel:
    """The expert's action for one window: hover, or a signed single-axis move."""

    window_start: float
    kind: CommandKind
    sign: int  # +1 / -1 for moves, 0 for hover

    def __post_init__(self) -> None:
        if (self.kind is CommandKind.HOVER) != (self.sign == 0):
            raise ValueError("hover labels carry sign 0; move labels carry +1/-1")


@dataclass(frozen=True)
class ReplayStep:
    """One window of an open-loop replay."""

    window_start: float
    command: Command
    flagged: bool  # no frame (or no joined telemetry) fell inside the window


@dataclass(frozen=True)
class EvalReport:
    """Window-level agreement between predicted commands and expert labels."""

    total_windows: int
    exact_matches: int
    accuracy: float
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    windows_flagged: int = 0

    def as_items(self) -> list[tuple[str, object]]:
        return [
            ("total_windows", self.total_windows),
            ("exact_matches", self.exact_matches),
            ("accuracy", self.accuracy),
            ("tp", self.tp),
            ("fp", self.fp),
            ("fn", self.fn),
            ("tn", self.tn),
            ("precision", self.precision),
            ("recall", self.recall),
            ("f1", self.f1),
            ("windows_flagged", self.windows_flagged),
        ]


def window_grid(start: float, end: float, period: float) -> int:
    """Number of period-length windows covering [start, end]."""
    if period <= 0.0:
        raise ValueError(f"period must be positive, got {period}")
    if end < start:
        raise ValueError(f"window span end {end} precedes start {start}")
    return int(math.floor((end - start) / period)) + 1


def label_expert_actions(
    telemetry: list[TelemetryRecord],
    period: float = 1.0,
    v_hover: float = DEFAULT_HOVER_SPEED,
    start: float | None = None,
    count: int | None = None,
) -> list[ActionLabel]:
    """Discretize the recorded flight into per-window action labels.

    Windows are [start + k*period, start + (k+1)*period); start defaults to
    the first sample's timestamp and count to the grid covering the whole
    log. Velocity components are averaged over the samples in each window;
    all-below-threshold means Hover, otherwise the axis with the largest
    mean magnitude wins (ties break x, then y, then z) with the mean's sign.
    Windows containing no samples are labelled Hover.

    Raises:
        DataError: empty telemetry.
    """
    if not telemetry:
        raise DataError("label_expert_actions: telemetry is empty")
    if start is None:
        start = telemetry[0].timestamp
    if count is None:
        count = window_grid(start, telemetry[-1].timestamp, period)

    labels: list[ActionLabel] = []
    idx = 0
    n = len(telemetry)
    for k in range(count):
        w_start = start + k * period
        w_end = w_start + period
        while idx < n and telemetry[idx].timestamp < w_start:
            idx += 1
        j = idx
        sums = [0.0, 0.0, 0.0]
        samples = 0
        while j < n and telemetry[j].timestamp < w_end:
            sums[0] += telemetry[j].vel_x
            sums[1] += telemetry[j].vel_y
            sums[2] += telemetry[j].vel_z
            samples += 1
            j += 1
        if samples == 0:
            labels.append(ActionLabel(w_start, CommandKind.HOVER, 0))
            continue
        means = [s / samples for s in sums]
        if all(abs(m) < v_hover for m in means):
            labels.append(ActionLabel(w_start, CommandKind.HOVER, 0))
            continue
        axis = max(range(3), key=lambda i: (abs(means[i]), -i))
        kind = (CommandKind.MOVE_X, CommandKind.MOVE_Y, CommandKind.MOVE_Z)[axis]
        labels.append(ActionLabel(w_start, kind, 1 if means[axis] > 0 else -1))
    return labels


def replay(
    observations: list[FrameObservation],
    policy: str,
    cfg: PolicyConfig,
    intrinsics: CameraIntrinsics,
    start: float | None = None,
    count: int | None = None,
) -> list[ReplayStep]:
    """Run a policy over recorded frames, one command per decision window.

    Each window uses the observation nearest its start among those inside the
    window; a window with no joined observation emits Hover and is flagged.
    The UAV state comes from the observation's joined telemetry (altitude and
    velocity; horizontal position is irrelevant to the deciders).

    Raises:
        DataError: empty observations, or an unknown policy name.
    """
    if policy not in POLICIES:
        raise DataError(f"unknown policy {policy!r}; expected one of {sorted(POLICIES)}")
    if not observations:
        raise DataError("replay: observations are empty")
    decide = POLICIES[policy]
    period = cfg.decision_period_s
    if start is None:
        start = observations[0].timestamp
    if count is None:
        count = window_grid(start, observations[-1].timestamp, period)

    steps: list[ReplayStep] = []
    idx = 0
    n = len(observations)
    for k in range(count):
        w_start = start + k * period
        w_end = w_start + period
        while idx < n and observations[idx].timestamp < w_start:
            idx += 1
        candidates = []
        j = idx
        while j < n and observations[j].timestamp < w_end:
            if observations[j].telemetry is not None:
                candidates.append(observations[j])
            j += 1
        if not candidates:
            steps.append(ReplayStep(w_start, Command.hover(), flagged=True))
            continue
        obs = min(candidates, key=lambda o: o.timestamp - w_start)
        tel = obs.telemetry
        state = UavState(
            position=(0.0, 0.0, tel.altitude),
            velocity=(tel.vel_x, tel.vel_y, tel.vel_z),
            timestamp=tel.timestamp,
        )
        command = decide(list(obs.detections), state, intrinsics, cfg)
        steps.append(ReplayStep(w_start, command, flagged=False))
    return steps


def score(
    predicted: list[Command],
    expert: list[ActionLabel],
    windows_flagged: int = 0,
) -> EvalReport:
    """Compare aligned predicted commands with expert labels.

    Exact match requires the same command kind and the same sign; magnitudes
    are ignored. The confusion matrix binarizes to move (positive) versus
    hover (negative). precision/recall/f1 are 0.0 when their denominators
    vanish.

    Raises:
        DataError: length mismatch.
    """
    if len(predicted) != len(expert):
        raise DataError(
            f"score: got {len(predicted)} predictions for {len(expert)} labels"
        )
    exact = tp = fp = fn = tn = 0
    for command, label in zip(predicted, expert):
        if command.kind is label.kind and command.sign == label.sign:
            exact += 1
        if command.is_move and label.kind is not CommandKind.HOVER:
            tp += 1
        elif command.is_move:
            fp += 1
        elif label.kind is not CommandKind.HOVER:
            fn += 1
        else:
            tn += 1
    total = len(predicted)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvalReport(
        total_windows=total,
        exact_matches=exact,
        accuracy=exact / total if total else 0.0,
        tp=tp, fp=fp, fn=fn, tn=tn,
        precision=precision, recall=recall, f1=f1,
        windows_flagged=windows_flagged,
    )
