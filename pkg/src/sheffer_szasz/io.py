"""Deterministic CSV/JSON emission and a lossless CSV reader."""

from __future__ import annotations

import json
import math
from typing import Any, Mapping, Sequence


def format_value(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)  # shortest round-trip form
    if hasattr(v, "item"):  # numpy scalar
        return format_value(v.item())
    s = str(v)
    if any(c in s for c in ',"\n\r'):
        raise ValueError(f"CSV cell may not contain separators or quotes: {s!r}")
    return s


def _jsonable(v: Any) -> Any:
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def to_csv(header: Sequence[str], rows: Sequence[Sequence[Any]], metadata: Mapping[str, Any] | None = None) -> str:
    """Comma-separated, LF endings; metadata goes first as ``# key=value`` comment lines."""
    lines = []
    for k, v in (metadata or {}).items():
        text = v if isinstance(v, str) else format_value(v)
        if "\n" in text or "\r" in text or "=" in k:
            raise ValueError(f"bad metadata entry {k!r}")
        lines.append(f"# {k}={text}")
    lines.append(",".join(header))
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def to_json(header: Sequence[str], rows: Sequence[Sequence[Any]], metadata: Mapping[str, Any] | None = None) -> str:
    doc = {
        "metadata": _jsonable(dict(metadata or {})),
        "rows": [{h: _jsonable(v) for h, v in zip(header, row)} for row in rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def render(fmt: str, header, rows, metadata=None) -> str:
    if fmt == "csv":
        return to_csv(header, rows, metadata)
    if fmt == "json":
        return to_json(header, rows, metadata)
    raise ValueError(f"unknown format {fmt!r}")


def parse_cell(text: str) -> Any:
    """Type a cell only when re-formatting reproduces it exactly (e.g. "0.1600" stays text)."""
    if text == "":
        return None
    for cast in (int, float):
        try:
            v = cast(text)
        except ValueError:
            continue
        if format_value(v) == text:
            return v
    if text in ("true", "false"):
        return text == "true"
    return text


def read_csv(text: str) -> tuple[dict[str, Any], list[str], list[list[Any]]]:
    metadata: dict[str, Any] = {}
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    i = 0
    while i < len(lines) and lines[i].startswith("# "):
        k, _, v = lines[i][2:].partition("=")
        metadata[k] = parse_cell(v)
        i += 1
    if i >= len(lines):
        raise ValueError("CSV has no header row")
    header = lines[i].split(",")
    rows = [[parse_cell(c) for c in line.split(",")] for line in lines[i + 1 :]]
    return metadata, header, rows
