"""Command-line interface: analyze, evaluate, and simulate subcommands.

All subcommands write deterministic outputs: reports and delimited logs are
byte-identical across identical invocations (pass --stamp to embed a
wall-clock timestamp), and figures render from the same data the delimited
files carry. Exit codes: 0 success, 1 usage/config error, 2 data error;
failures print machine-parseable `error kind=... where=... msg=...` lines on
stderr, and a data failure in one mission does not stop the others.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from . import figures
from .config import (
    RunManifest,
    build_column_mapping,
    build_intrinsics,
    build_policy_config,
    build_sim_config,
    parse_kv_file,
    parse_manifest,
    parse_seed_spec,
    split_section,
)
from .errors import ConfigError, DataError, HerdNavError
from .replay import (
    DEFAULT_HOVER_SPEED,
    EvalReport,
    label_expert_actions,
    replay,
    score,
    window_grid,
)
from .report import write_csv, write_report
from .sim import run as run_sim
from .telemetry import (
    UNUSABLE_BEHAVIORS,
    behavior_altitude_histogram,
    parse_annotations,
    parse_telemetry,
    reconcile,
    summarize,
    usability_report,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

_SERIES_NAMES = ("altitude_m", "speed_mps", "bbox_width_px", "bbox_height_px")


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures routed through ConfigError (exit code 1)."""

    def error(self, message: str):  # noqa: D102 - argparse hook
        raise ConfigError(message)


def _error_line(kind: str, where: str, message: str) -> None:
    message = " ".join(str(message).split())
    print(f"error kind={kind} where={where} msg={message}", file=sys.stderr)


def _verbose(args, text: str) -> None:
    if args.verbose:
        print(text, file=sys.stderr)


def _stamp_items(args) -> list[tuple[str, object]]:
    if not args.stamp:
        return []
    return [("generated_at", datetime.now(timezone.utc).isoformat(timespec="seconds"))]


_KNOWN_SECTIONS = ("policy.", "camera.", "sim.", "mapping.", "annotations.")


def _load_settings(args, manifest: RunManifest | None) -> dict[str, str]:
    """Merge settings sources: manifest values, then explicit config files."""
    settings: dict[str, str] = {}
    if manifest is not None:
        settings.update(manifest.overrides)
    if getattr(args, "config", None):
        settings.update(parse_kv_file(args.config))
    if args.policy_config:
        settings.update(parse_kv_file(args.policy_config))
    if args.camera:
        settings.update(parse_kv_file(args.camera))
    for key in settings:
        if not key.startswith(_KNOWN_SECTIONS):
            raise ConfigError(
                f"unknown setting {key}; sections are "
                + ", ".join(s.rstrip(".") + ".*" for s in _KNOWN_SECTIONS)
            )
    return settings


def _out_dir(args) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from None
    return out


def _load_mission(mission, mapping, ann_delimiter: str, fps: float, max_gap: float):
    telemetry = parse_telemetry(mission.telemetry_path, mapping)
    annotations = parse_annotations(
        mission.annotation_path,
        video_start=mission.video_start,
        fps=fps,
        delimiter=ann_delimiter,
    )
    observations = reconcile(telemetry, annotations, max_gap=max_gap)
    return telemetry, observations


def _mission_series(observations) -> dict[str, list[float]]:
    """Plot/summary series over usable, telemetry-joined frames."""
    series: dict[str, list[float]] = {name: [] for name in _SERIES_NAMES}
    for obs in observations:
        if not obs.usable or obs.telemetry is None:
            continue
        series["altitude_m"].append(obs.telemetry.altitude)
        series["speed_mps"].append(obs.telemetry.speed)
        for det in obs.detections:
            if det.behavior in UNUSABLE_BEHAVIORS:
                continue
            series["bbox_width_px"].append(det.width)
            series["bbox_height_px"].append(det.height)
    return series


def _series_items(series: dict[str, list[float]]) -> list[tuple[str, object]]:
    items: list[tuple[str, object]] = []
    for name in _SERIES_NAMES:
        values = series[name]
        if not values:
            items.append((f"series.{name}.count", 0))
            continue
        stats = summarize(values)
        items.extend((f"series.{name}.{key}", value) for key, value in stats.as_items())
    return items


def _analysis_items(observations, mode: str) -> list[tuple[str, object]]:
    joined = sum(1 for o in observations if not o.telemetry_missing)
    usability = usability_report(observations, mode=mode)
    items: list[tuple[str, object]] = [
        ("frames.total", len(observations)),
        ("frames.telemetry_joined", joined),
        ("frames.telemetry_missing", len(observations) - joined),
    ]
    items.extend((f"usability.{k}", v) for k, v in usability.as_items())
    items.extend(_series_items(_mission_series(observations)))
    histogram = behavior_altitude_histogram(observations)
    items.append(("behaviors.count", len(histogram)))
    items.append(("behaviors.order", ",".join(b for b, _ in histogram)))
    return items


def _write_analysis_outputs(out: Path, label: str, observations, mode: str, args) -> None:
    items = [("report", "analyze"), ("subject", label)]
    items.extend(_analysis_items(observations, mode))
    items.extend(_stamp_items(args))
    write_report(out / f"{label}_report.txt", items)

    histogram = behavior_altitude_histogram(observations)
    write_csv(
        out / f"{label}_behavior_altitude.csv",
        ["behavior", "altitude_m"],
        [(behavior, alt) for behavior, alts in histogram for alt in alts],
    )
    if not args.no_figures:
        figures.save_distribution_figure(
            _mission_series(observations), out / f"{label}_distributions.png"
        )
        figures.save_behavior_altitude_figure(
            histogram, out / f"{label}_behavior_altitude.png"
        )


def cmd_analyze(args) -> int:
    manifest = parse_manifest(args.manifest)
    settings = _load_settings(args, manifest)
    mapping = build_column_mapping(split_section(settings, "mapping"))
    ann_settings = split_section(settings, "annotations")
    ann_delimiter = ann_settings.get("delimiter", ",")
    fps = float(ann_settings.get("fps", "30"))
    out = _out_dir(args)

    all_observations = []
    failed = 0
    for mission in manifest.missions:
        _verbose(args, f"analyze: mission {mission.name}")
        try:
            _, observations = _load_mission(
                mission, mapping, ann_delimiter, fps, args.max_gap
            )
        except HerdNavError as exc:
            _error_line("data", f"mission:{mission.name}", str(exc))
            failed += 1
            continue
        _write_analysis_outputs(out, mission.name, observations, args.usability_mode, args)
        all_observations.extend(observations)

    if all_observations or not failed:
        _write_analysis_outputs(out, "aggregate", all_observations, args.usability_mode, args)
    return EXIT_DATA if failed else EXIT_OK


def _eval_report_items(label: str, policy: str, report: EvalReport, args):
    items: list[tuple[str, object]] = [
        ("report", "evaluate"),
        ("subject", label),
        ("policy", policy),
    ]
    items.extend(report.as_items())
    items.extend(_stamp_items(args))
    return items


def _aggregate_eval(reports: list[EvalReport]) -> EvalReport:
    total = sum(r.total_windows for r in reports)
    exact = sum(r.exact_matches for r in reports)
    tp = sum(r.tp for r in reports)
    fp = sum(r.fp for r in reports)
    fn = sum(r.fn for r in reports)
    tn = sum(r.tn for r in reports)
    flagged = sum(r.windows_flagged for r in reports)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvalReport(
        total_windows=total,
        exact_matches=exact,
        accuracy=exact / total if total else 0.0,
        tp=tp, fp=fp, fn=fn, tn=tn,
        precision=precision, recall=recall, f1=f1,
        windows_flagged=flagged,
    )


def cmd_evaluate(args) -> int:
    manifest = parse_manifest(args.manifest)
    settings = _load_settings(args, manifest)
    mapping = build_column_mapping(split_section(settings, "mapping"))
    ann_settings = split_section(settings, "annotations")
    ann_delimiter = ann_settings.get("delimiter", ",")
    fps = float(ann_settings.get("fps", "30"))
    policy_cfg = build_policy_config(split_section(settings, "policy"))
    intrinsics = build_intrinsics(split_section(settings, "camera"))
    out = _out_dir(args)
    period = policy_cfg.decision_period_s

    mission_reports: list[EvalReport] = []
    failed = 0
    for mission in manifest.missions:
        _verbose(args, f"evaluate: mission {mission.name} policy {args.policy}")
        try:
            telemetry, observations = _load_mission(
                mission, mapping, ann_delimiter, fps, args.max_gap
            )
            if not observations:
                raise DataError("no annotated frames to evaluate")
            start = observations[0].timestamp
            count = window_grid(start, observations[-1].timestamp, period)
            labels = label_expert_actions(
                telemetry, period, v_hover=args.v_hover, start=start, count=count
            )
            steps = replay(
                observations, args.policy, policy_cfg, intrinsics,
                start=start, count=count,
            )
        except HerdNavError as exc:
            _error_line("data", f"mission:{mission.name}", str(exc))
            failed += 1
            continue

        commands = [step.command for step in steps]
        flagged = sum(1 for step in steps if step.flagged)
        report = score(commands, labels, windows_flagged=flagged)
        mission_reports.append(report)
        write_report(
            out / f"{mission.name}_eval.txt",
            _eval_report_items(mission.name, args.policy, report, args),
        )
        matches = [
            c.kind is l.kind and c.sign == l.sign for c, l in zip(commands, labels)
        ]
        write_csv(
            out / f"{mission.name}_commands.csv",
            [
                "window_start", "predicted_kind", "predicted_sign",
                "predicted_magnitude", "expert_kind", "expert_sign",
                "exact_match", "flagged",
            ],
            [
                (
                    step.window_start,
                    step.command.kind.value,
                    step.command.sign,
                    step.command.magnitude,
                    label.kind.value,
                    label.sign,
                    match,
                    step.flagged,
                )
                for step, label, match in zip(steps, labels, matches)
            ],
        )
        if not args.no_figures:
            figures.save_agreement_figure(
                [step.window_start for step in steps],
                [step.command.is_move for step in steps],
                [label.kind.value != "hover" for label in labels],
                matches,
                out / f"{mission.name}_agreement.png",
            )

    if mission_reports:
        aggregate = _aggregate_eval(mission_reports)
        write_report(
            out / "aggregate_eval.txt",
            _eval_report_items("aggregate", args.policy, aggregate, args),
        )
    return EXIT_DATA if failed else EXIT_OK


def cmd_simulate(args) -> int:
    settings = _load_settings(args, manifest=None)
    sim_cfg = build_sim_config(split_section(settings, "sim"))
    policy_cfg = build_policy_config(split_section(settings, "policy"))
    intrinsics = build_intrinsics(split_section(settings, "camera"))
    seeds = parse_seed_spec(args.seeds)
    out = _out_dir(args)

    results = []
    for seed in seeds:
        _verbose(args, f"simulate: seed {seed} policy {args.policy}")
        result = run_sim(replace(sim_cfg, seed=seed), policy_cfg, args.policy, intrinsics)
        results.append((seed, result))

        items: list[tuple[str, object]] = [
            ("report", "simulate"),
            ("policy", args.policy),
            ("seed", seed),
        ]
        items.extend(result.metrics.as_items())
        in_band = sum(
            1 for rec in result.windows
            if policy_cfg.alt_min_m <= rec.altitude <= policy_cfg.alt_max_m
        )
        items.append(("windows_alt_in_band", in_band))
        items.extend(_stamp_items(args))
        write_report(out / f"seed_{seed}_metrics.txt", items)

        n_animals = sim_cfg.herd_size
        header = ["t", "uav_x", "uav_y", "uav_z", "command", "magnitude"]
        for i in range(n_animals):
            header.extend([f"animal{i}_x", f"animal{i}_y"])
        write_csv(
            out / f"seed_{seed}_trajectory.csv",
            header,
            (
                (
                    row.t, row.uav[0], row.uav[1], row.uav[2],
                    row.command.kind.value, row.command.magnitude,
                    *(v for pair in zip(row.animals_x, row.animals_y) for v in pair),
                )
                for row in result.trajectory
            ),
        )
        if not args.no_figures:
            figures.save_trajectory_figure(
                [row.t for row in result.trajectory],
                [row.uav for row in result.trajectory],
                (policy_cfg.alt_min_m, policy_cfg.alt_max_m),
                out / f"seed_{seed}_trajectory.png",
            )

    yields = [result.metrics.yield_proxy for _, result in results]
    items = [
        ("report", "simulate.aggregate"),
        ("policy", args.policy),
        ("seed_count", len(seeds)),
        ("seeds", ",".join(str(s) for s in seeds)),
        ("yield_proxy.mean", sum(yields) / len(yields)),
        ("yield_proxy.min", min(yields)),
        ("yield_proxy.max", max(yields)),
        (
            "horizontal_distance_m.mean",
            sum(r.metrics.horizontal_distance_m for _, r in results) / len(results),
        ),
        (
            "vertical_distance_m.mean",
            sum(r.metrics.vertical_distance_m for _, r in results) / len(results),
        ),
    ]
    items.extend(
        (f"seed.{seed}.yield_proxy", result.metrics.yield_proxy) for seed, result in results
    )
    items.extend(_stamp_items(args))
    write_report(out / "aggregate_metrics.txt", items)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(
        prog="herdnav",
        description="Wildlife-tracking UAV navigation: telemetry analytics, "
        "policy replay evaluation, and closed-loop simulation.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--camera", help="camera intrinsics key-value file (camera.*)")
    common.add_argument(
        "--policy-config", help="policy settings key-value file (policy.*)"
    )
    common.add_argument("--out", required=True, help="output directory")
    common.add_argument("--verbose", action="store_true", help="progress lines on stderr")
    common.add_argument(
        "--stamp", action="store_true",
        help="embed a wall-clock timestamp in reports (off by default to keep "
        "outputs byte-stable)",
    )
    common.add_argument(
        "--no-figures", action="store_true", help="skip PNG figure rendering"
    )

    sub = parser.add_subparsers(dest="command", required=True)

    mission_common = argparse.ArgumentParser(add_help=False)
    mission_common.add_argument("--manifest", required=True, help="mission manifest file")
    mission_common.add_argument(
        "--max-gap", type=float, default=0.5,
        help="max |dt| in seconds for the telemetry join (default 0.5)",
    )

    p_analyze = sub.add_parser(
        "analyze", parents=[common, mission_common],
        help="usability and flight-statistics reports per mission",
    )
    p_analyze.add_argument(
        "--usability-mode", choices=["frame", "row"], default="frame",
        help="count usable frames (default) or usable annotation rows",
    )
    p_analyze.set_defaults(func=cmd_analyze)

    p_eval = sub.add_parser(
        "evaluate", parents=[common, mission_common],
        help="score a policy's replayed commands against the recorded pilot",
    )
    p_eval.add_argument(
        "--policy", choices=["baseline", "improved"], required=True
    )
    p_eval.add_argument(
        "--v-hover", type=float, default=DEFAULT_HOVER_SPEED,
        help=f"mean-velocity hover threshold in m/s (default {DEFAULT_HOVER_SPEED})",
    )
    p_eval.set_defaults(func=cmd_evaluate)

    p_sim = sub.add_parser(
        "simulate", parents=[common],
        help="closed-loop synthetic missions with per-seed metrics",
    )
    p_sim.add_argument("--config", help="scenario key-value file (sim.*, policy.*, camera.*)")
    p_sim.add_argument("--policy", choices=["baseline", "improved"], required=True)
    p_sim.add_argument(
        "--seeds", default="0", help="seed list: '3', '1,2,5' or '1..20' (default 0)"
    )
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        _error_line("usage", "cli", str(exc))
        return EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as exc:
        _error_line("config", args.command, str(exc))
        return EXIT_USAGE
    except DataError as exc:
        _error_line("data", args.command, str(exc))
        return EXIT_DATA
    except OSError as exc:
        _error_line("config", args.command, f"i/o failure: {exc}")
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
