"""Matplotlib renderings of the analysis outputs, written next to the reports.

All renderers take plot-ready data (the same series/rows the delimited
outputs carry) and save a PNG; nothing here feeds back into analysis. The
Agg backend keeps rendering headless, and PNG metadata is stripped so equal
inputs produce identical files across runs of the same environment.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = [
    "save_distribution_figure",
    "save_behavior_altitude_figure",
    "save_trajectory_figure",
    "save_agreement_figure",
]

_SAVE_KWARGS = {"dpi": 110, "metadata": {"Software": None}}


def _finish(fig, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def save_distribution_figure(series: dict[str, list[float]], path: str | Path) -> None:
    """One histogram panel per named series (altitude, speed, box sizes...)."""
    names = [name for name, values in series.items() if values]
    n = max(1, len(names))
    fig, axes = plt.subplots(1, n, figsize=(3.2 * n, 3.0), squeeze=False)
    for ax, name in zip(axes[0], names):
        ax.hist(series[name], bins=30, color="#4878a8", edgecolor="white")
        ax.set_title(name)
        ax.set_ylabel("frames")
    if not names:
        axes[0][0].set_axis_off()
        axes[0][0].text(0.5, 0.5, "no data", ha="center", va="center")
    fig.tight_layout()
    _finish(fig, path)


def save_behavior_altitude_figure(
    histogram: list[tuple[str, list[float]]], path: str | Path
) -> None:
    """Box plot of altitude per behavior, most frequent behavior leftmost."""
    fig, ax = plt.subplots(figsize=(max(4.0, 1.1 * len(histogram)), 3.4))
    if histogram:
        labels = [behavior for behavior, _ in histogram]
        ax.boxplot([alts for _, alts in histogram], tick_labels=labels)
        ax.set_ylabel("altitude (m)")
        ax.tick_params(axis="x", rotation=45)
    else:
        ax.set_axis_off()
        ax.text(0.5, 0.5, "no usable detections", ha="center", va="center")
    fig.tight_layout()
    _finish(fig, path)


def save_trajectory_figure(
    times: list[float],
    uav_xyz: list[tuple[float, float, float]],
    alt_band: tuple[float, float],
    path: str | Path,
) -> None:
    """Ground track and altitude profile of one simulated mission."""
    fig, (ax_xy, ax_z) = plt.subplots(1, 2, figsize=(8.0, 3.2))
    xs = [p[0] for p in uav_xyz]
    ys = [p[1] for p in uav_xyz]
    zs = [p[2] for p in uav_xyz]
    ax_xy.plot(xs, ys, color="#4878a8", linewidth=1.0)
    ax_xy.plot(xs[0], ys[0], "go", label="start")
    ax_xy.plot(xs[-1], ys[-1], "rs", label="end")
    ax_xy.set_xlabel("x (m)")
    ax_xy.set_ylabel("y (m)")
    ax_xy.set_title("ground track")
    ax_xy.legend(loc="best", fontsize=8)
    ax_z.plot(times, zs, color="#4878a8", linewidth=1.0)
    ax_z.axhspan(alt_band[0], alt_band[1], color="#87c087", alpha=0.3, label="preferred band")
    ax_z.set_xlabel("t (s)")
    ax_z.set_ylabel("altitude (m)")
    ax_z.set_title("altitude profile")
    ax_z.legend(loc="best", fontsize=8)
    fig.tight_layout()
    _finish(fig, path)


def save_agreement_figure(
    window_starts: list[float],
    predicted_moves: list[bool],
    expert_moves: list[bool],
    matches: list[bool],
    path: str | Path,
) -> None:
    """Move/hover timelines for predicted vs expert, with mismatches marked."""
    fig, ax = plt.subplots(figsize=(8.0, 2.6))
    pred_level = [1 if m else 0 for m in predicted_moves]
    expert_level = [1 if m else 0 for m in expert_moves]
    ax.step(window_starts, expert_level, where="post", label="expert", color="#333333")
    ax.step(window_starts, pred_level, where="post", label="policy", color="#4878a8")
    mismatch_t = [t for t, ok in zip(window_starts, matches) if not ok]
    if mismatch_t:
        ax.plot(mismatch_t, [1.06] * len(mismatch_t), "rv", markersize=4, label="mismatch")
    ax.set_yticks([0, 1], labels=["hover", "move"])
    ax.set_ylim(-0.15, 1.2)
    ax.set_xlabel("window start (s)")
    ax.legend(loc="upper right", fontsize=8, ncols=3)
    fig.tight_layout()
    _finish(fig, path)
