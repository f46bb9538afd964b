"""Byte-stable output writers for reports and delimited data.

Report files are flat `key = value` lines in the exact order given by the
caller; values serialize deterministically (floats via repr, which is exact
and round-trippable; None as "undefined"). Equal inputs therefore always
produce byte-identical files. Wall-clock stamps only appear when a caller
passes one explicitly (the CLI's --stamp flag).
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

__all__ = ["format_value", "write_report", "write_csv"]


def format_value(value: object) -> str:
    if value is None:
        return "undefined"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_report(path: str | Path, items: Iterable[tuple[str, object]]) -> None:
    """Write ordered key-value pairs, one `key = value` line each."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{key} = {format_value(value)}" for key, value in items]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_csv(
    path: str | Path, header: Sequence[str], rows: Iterable[Sequence[object]]
) -> None:
    """Write a comma-delimited file with the same value formatting as reports."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
