"""Flat key-value configuration files, mission manifests, and seed ranges.

Config format, shared by config files and manifests: one `key = value` pair
per line, `#` comments and blank lines ignored, keys namespaced by section
prefix (policy.*, camera.*, sim.*, mapping.*, annotations.*, mission.*).
Precedence everywhere is CLI flags > file values > built-in defaults.

A manifest lists the missions of a run plus optional setting overrides:

    mission.m01.telemetry   = data/m01_telemetry.csv
    mission.m01.annotations = data/m01_annotations.csv
    mission.m01.video_start = 14.0
    policy.deadband_px      = 150
    mapping.speed_vector    = speed
    annotations.delimiter   = ,

Relative mission paths resolve against the manifest's directory, and every
referenced path must exist at load time.
"""

from __future__ import annotations

import types
import typing
from dataclasses import dataclass, fields
from pathlib import Path

from .camera import CameraIntrinsics, DEFAULT_INTRINSICS
from .controller import PolicyConfig
from .errors import ConfigError
from .sim import SimConfig
from .telemetry import ColumnMapping

__all__ = [
    "MissionEntry",
    "RunManifest",
    "parse_kv_file",
    "split_section",
    "build_policy_config",
    "build_intrinsics",
    "build_sim_config",
    "build_column_mapping",
    "parse_manifest",
    "parse_seed_spec",
]


def parse_kv_file(path: str | Path) -> dict[str, str]:
    """Read a flat key-value file; later duplicate keys override earlier ones."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, str] = {}
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{line_no}: empty key")
        values[key] = value
    return values


def split_section(values: dict[str, str], section: str) -> dict[str, str]:
    """Extract `section.key` entries as a plain key -> value dict."""
    prefix = section + "."
    return {k[len(prefix):]: v for k, v in values.items() if k.startswith(prefix)}


def _coerce(name: str, text: str, target_type: type, section: str):
    try:
        if target_type is float:
            return float(text)
        if target_type is int:
            return int(text)
        if target_type is bool:
            lowered = text.lower()
            if lowered in ("true", "1", "yes", "on"):
                return True
            if lowered in ("false", "0", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        return text
    except ValueError as exc:
        raise ConfigError(f"{section}.{name}: {exc}") from None


_TUPLE_FIELDS = {
    "animal_extent": 2,
    "initial_uav": 3,
    "initial_herd_center": 2,
}


def _scalar_type(annotation) -> type:
    """Coercion target for one field: unwrap Optional, default to str."""
    origin = typing.get_origin(annotation)
    if origin in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(annotation) if a is not type(None)]
        if len(args) == 1:
            return _scalar_type(args[0])
        return str
    if annotation in (int, float, bool, str):
        return annotation
    return str


def _build_dataclass(cls, overrides: dict[str, str], section: str, defaults=None):
    """Instantiate a config dataclass from defaults plus string overrides."""
    hints = typing.get_type_hints(cls)
    valid = {f.name for f in fields(cls)}
    kwargs = {}
    if defaults is not None:
        kwargs.update({f.name: getattr(defaults, f.name) for f in fields(cls)})
    for name, text in overrides.items():
        if name not in valid:
            raise ConfigError(f"unknown setting {section}.{name}")
        if name in _TUPLE_FIELDS:
            parts = [p for p in text.replace(",", " ").split() if p]
            if len(parts) != _TUPLE_FIELDS[name]:
                raise ConfigError(
                    f"{section}.{name}: expected {_TUPLE_FIELDS[name]} numbers, got {text!r}"
                )
            kwargs[name] = tuple(_coerce(name, p, float, section) for p in parts)
            continue
        kwargs[name] = _coerce(name, text, _scalar_type(hints[name]), section)
    try:
        return cls(**kwargs)
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"{section}: {exc}") from None


def build_policy_config(overrides: dict[str, str]) -> PolicyConfig:
    return _build_dataclass(PolicyConfig, overrides, "policy")


def build_sim_config(overrides: dict[str, str]) -> SimConfig:
    return _build_dataclass(SimConfig, overrides, "sim")


def build_intrinsics(overrides: dict[str, str]) -> CameraIntrinsics:
    return _build_dataclass(CameraIntrinsics, overrides, "camera", defaults=DEFAULT_INTRINSICS)


def build_column_mapping(overrides: dict[str, str]) -> ColumnMapping:
    defaults = ColumnMapping()
    kwargs = {f.name: getattr(defaults, f.name) for f in fields(ColumnMapping)}
    for name, text in overrides.items():
        if name not in kwargs:
            raise ConfigError(f"unknown setting mapping.{name}")
        # "none" explicitly clears an optional column.
        kwargs[name] = None if text.lower() == "none" else text
    if kwargs.get("speed_vector") is not None:
        # A combined vector column replaces the scalar defaults unless the
        # override explicitly kept them.
        for name in ("vel_x", "vel_y", "vel_z"):
            if name not in overrides:
                kwargs[name] = None
    try:
        return ColumnMapping(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"mapping: {exc}") from None


@dataclass(frozen=True)
class MissionEntry:
    """One mission's input files plus the video start time on the telemetry clock."""

    name: str
    telemetry_path: Path
    annotation_path: Path
    video_start: float = 0.0


@dataclass(frozen=True)
class RunManifest:
    """Missions to process plus setting overrides carried by the manifest."""

    missions: tuple[MissionEntry, ...]
    overrides: dict[str, str]


def parse_manifest(path: str | Path) -> RunManifest:
    """Load and validate a mission manifest.

    Raises:
        ConfigError: missing file, malformed entries, missing mission fields,
            nonexistent referenced paths, or no missions at all.
    """
    path = Path(path)
    values = parse_kv_file(path)
    base_dir = path.parent

    missions_raw: dict[str, dict[str, str]] = {}
    overrides: dict[str, str] = {}
    for key, value in values.items():
        if key.startswith("mission."):
            parts = key.split(".")
            if len(parts) != 3:
                raise ConfigError(f"{path}: mission keys look like mission.<name>.<field>, got {key}")
            _, name, field_name = parts
            missions_raw.setdefault(name, {})[field_name] = value
        else:
            overrides[key] = value

    if not missions_raw:
        raise ConfigError(f"{path}: manifest defines no missions")

    missions: list[MissionEntry] = []
    for name in sorted(missions_raw):
        entry = missions_raw[name]
        for required in ("telemetry", "annotations"):
            if required not in entry:
                raise ConfigError(f"{path}: mission.{name}.{required} is required")
        telemetry_path = (base_dir / entry["telemetry"]).resolve()
        annotation_path = (base_dir / entry["annotations"]).resolve()
        for p in (telemetry_path, annotation_path):
            if not p.is_file():
                raise ConfigError(f"{path}: mission.{name}: no such file: {p}")
        video_start = 0.0
        if "video_start" in entry:
            try:
                video_start = float(entry["video_start"])
            except ValueError:
                raise ConfigError(
                    f"{path}: mission.{name}.video_start must be a number, "
                    f"got {entry['video_start']!r}"
                ) from None
        unknown = set(entry) - {"telemetry", "annotations", "video_start"}
        if unknown:
            raise ConfigError(
                f"{path}: mission.{name}: unknown field(s) {', '.join(sorted(unknown))}"
            )
        missions.append(
            MissionEntry(
                name=name,
                telemetry_path=telemetry_path,
                annotation_path=annotation_path,
                video_start=video_start,
            )
        )
    return RunManifest(missions=tuple(missions), overrides=overrides)


def parse_seed_spec(spec: str) -> list[int]:
    """Parse a seed list: '7', '1,2,5', or an inclusive range '1..20'."""
    spec = spec.strip()
    seeds: list[int] = []
    try:
        for chunk in spec.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            if ".." in chunk:
                lo_text, hi_text = chunk.split("..", 1)
                lo, hi = int(lo_text), int(hi_text)
                if hi < lo:
                    raise ConfigError(f"seed range {chunk!r} is descending")
                seeds.extend(range(lo, hi + 1))
            else:
                seeds.append(int(chunk))
    except ValueError:
        raise ConfigError(f"invalid seed spec {spec!r}; use '3', '1,2,5' or '1..20'") from None
    if not seeds:
        raise ConfigError(f"seed spec {spec!r} names no seeds")
    return seeds
