from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Iterator

from .errors import InstanceFormatError


def iter_jsonl(path: Path) -> Iterator[dict[str, Any]]:
    """Records of a JSONL batch file; blank lines are skipped."""
    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InstanceFormatError(exc.msg, location=f"{path}:{lineno}:{exc.colno}") from exc
            if not isinstance(record, dict):
                raise InstanceFormatError("record must be an object", location=f"{path}:{lineno}")
            yield record


def write_jsonl(path: Path, records: Iterable[dict[str, Any]]) -> int:
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True) + "\n")
            count += 1
    return count


def write_json(path: Path, document: dict[str, Any]) -> Path:
    """Write one JSON document with stable key order.

    Floats go through `repr`, which is the shortest exact round-trip form.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
