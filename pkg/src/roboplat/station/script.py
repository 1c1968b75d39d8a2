"""Command script files: one JSON object per line.

Each entry is a UI-schema command plus a relative time in seconds:

    {"t": 0.0, "type": "digital", "line": 1, "value": 1}
    {"t": 0.0, "type": "digital", "line": 0, "value": 1}
    {"t": 1.0, "type": "digital", "line": 1, "value": 0}
    {"t": 2.0, "type": "digital", "line": 0, "value": 0}

Replay starts when the control client passes verification.
"""

from __future__ import annotations

import json
from pathlib import Path


def load_script(path) -> list[dict]:
    entries: list[dict] = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obj = json.loads(line)
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: bad JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise ValueError(f"{path}:{lineno}: expected an object")
        entries.append(obj)
    entries.sort(key=lambda e: float(e.get("t", 0.0)))
    return entries
