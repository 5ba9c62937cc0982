"""Report rendering: canonical machine JSON and aligned text tables.

Machine reports are byte-stable: keys sorted, two-space indent, a single
trailing newline, and no timestamps or other run-varying content, so the
same inputs always produce identical bytes. Non-finite floats are
encoded as the strings "inf", "-inf", and "nan" because JSON has no
representation for them.
"""

from __future__ import annotations

import json

import numpy as np

PACKAGE_VERSION = "0.1.0"


def jsonable(value):
    """Convert nested report values to canonical JSON-safe types."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if value != value:
            return "nan"
        if value == float("inf"):
            return "inf"
        if value == float("-inf"):
            return "-inf"
        return value
    if value is None or isinstance(value, str):
        return value
    raise TypeError(f"cannot serialize {type(value).__name__} into a report")


def canonical_json(doc) -> str:
    return (
        json.dumps(jsonable(doc), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)
        + "\n"
    )


def manifest(command: str, parameters: dict, seed) -> dict:
    """Reproducibility block embedded in every machine report."""
    return {
        "command": command,
        "parameters": jsonable(parameters),
        "seed": jsonable(seed),
        "version": PACKAGE_VERSION,
    }


def machine_report(command: str, parameters: dict, seed, body: dict) -> str:
    doc = dict(body)
    doc["manifest"] = manifest(command, parameters, seed)
    return canonical_json(doc)


def format_value(value) -> str:
    """Human-facing cell formatting for text tables."""
    if value is None:
        return "-"
    if isinstance(value, (bool, np.bool_)):
        return "yes" if value else "no"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if value != value:
            return "nan"
        if value in (float("inf"), float("-inf")):
            return "inf" if value > 0 else "-inf"
        if value == int(value) and abs(value) < 1e15:
            return str(int(value))
        return f"{value:.6g}"
    return str(value)


def render_table(headers, rows) -> str:
    """Render rows as an aligned text table with a dashed header rule."""
    headers = [str(h) for h in headers]
    text_rows = [[format_value(cell) for cell in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in text_rows:
        if len(row) != len(headers):
            raise ValueError("row width does not match the header")
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for row in text_rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"
