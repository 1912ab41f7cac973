from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InstanceFormatError
from .jsonl import write_json


@dataclass(frozen=True)
class InstanceFile:
    """Parsed instance document with 1-based images.

    Fixed points and pointwise collisions are left for the checker to report.
    """

    n: int
    f: tuple[int, ...]
    g: tuple[int, ...] | None = None
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def is_pair(self) -> bool:
        return self.g is not None

    def to_json(self) -> dict[str, Any]:
        document: dict[str, Any] = {"n": self.n, "f": list(self.f)}
        if self.g is not None:
            document["g"] = list(self.g)
        if self.metadata:
            document["metadata"] = dict(self.metadata)
        return document


@dataclass(frozen=True)
class PointsFile:
    n: int
    k: int
    points: np.ndarray
    seed: str = ""


@dataclass(frozen=True)
class MatrixFile:
    n: int
    d: np.ndarray


def _read_document(path: Path) -> dict[str, Any]:
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise InstanceFormatError(f"not UTF-8 text: {exc}", location=str(path)) from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            exc.msg, location=f"{path}:{exc.lineno}:{exc.colno}"
        ) from exc
    if not isinstance(document, dict):
        raise InstanceFormatError("top-level value must be an object", location=str(path))
    return document


def _require_int(value: Any, location: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceFormatError(f"expected an integer, got {value!r}", location=location)
    return value


def _require_real(value: Any, location: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceFormatError(f"expected a number, got {value!r}", location=location)
    if not math.isfinite(value):
        raise InstanceFormatError(f"non-finite number {value!r}", location=location)
    return float(value)


def _require_count(document: dict[str, Any], minimum: int) -> int:
    if "n" not in document:
        raise InstanceFormatError("missing field", location="n")
    n = _require_int(document["n"], "n")
    if n < minimum:
        raise InstanceFormatError(f"n must be at least {minimum}, got {n}", location="n")
    return n


def _parse_images(document: dict[str, Any], key: str, n: int) -> tuple[int, ...]:
    raw = document.get(key)
    if not isinstance(raw, list):
        raise InstanceFormatError("expected a list of images", location=key)
    if len(raw) != n:
        raise InstanceFormatError(f"expected {n} images, got {len(raw)}", location=key)
    images = []
    for position, value in enumerate(raw, start=1):
        location = f"{key}[{position}]"
        image = _require_int(value, location)
        if not 1 <= image <= n:
            raise InstanceFormatError(f"image {image} outside 1..{n}", location=location)
        images.append(image)
    return tuple(images)


def parse_instance(document: dict[str, Any]) -> InstanceFile:
    n = _require_count(document, 2)
    f = _parse_images(document, "f", n)
    g = _parse_images(document, "g", n) if document.get("g") is not None else None
    if g is not None and n < 3:
        raise InstanceFormatError("pair instances need n >= 3", location="n")

    raw_meta = document.get("metadata") or {}
    if not isinstance(raw_meta, dict):
        raise InstanceFormatError("expected an object", location="metadata")
    metadata = {str(key): str(value) for key, value in raw_meta.items()}
    return InstanceFile(n=n, f=f, g=g, metadata=metadata)


def load_instance(path: Path) -> InstanceFile:
    document = _read_document(path)
    try:
        return parse_instance(document)
    except InstanceFormatError as exc:
        raise InstanceFormatError(str(exc), location=str(path)) from exc


def save_instance(path: Path, instance: InstanceFile) -> Path:
    return write_json(path, instance.to_json())


def _parse_rows(raw: Any, key: str, rows: int, cols: int) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != rows:
        raise InstanceFormatError(f"expected {rows} rows", location=key)
    out = np.empty((rows, cols), dtype=float)
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != cols:
            raise InstanceFormatError(f"expected {cols} values", location=f"{key}[{i + 1}]")
        for j, value in enumerate(row):
            out[i, j] = _require_real(value, f"{key}[{i + 1}][{j + 1}]")
    return out


def load_points(path: Path) -> PointsFile:
    document = _read_document(path)
    try:
        n = _require_count(document, 2)
        k = _require_int(document.get("k"), "k")
        if k < 1:
            raise InstanceFormatError(f"k must be positive, got {k}", location="k")
        points = _parse_rows(document.get("points"), "points", n, k)
    except InstanceFormatError as exc:
        raise InstanceFormatError(str(exc), location=str(path)) from exc
    return PointsFile(n=n, k=k, points=points, seed=str(document.get("seed", "")))


def save_points(path: Path, points: np.ndarray, seed: str, extra: dict[str, Any] | None = None) -> Path:
    n, k = points.shape
    document: dict[str, Any] = {
        "n": int(n),
        "k": int(k),
        "points": [[float(x) for x in row] for row in points],
        "seed": seed,
    }
    if extra:
        document.update(extra)
    return write_json(path, document)


def load_matrix(path: Path) -> MatrixFile:
    document = _read_document(path)
    try:
        n = _require_count(document, 2)
        d = _parse_rows(document.get("d"), "d", n, n)
    except InstanceFormatError as exc:
        raise InstanceFormatError(str(exc), location=str(path)) from exc
    return MatrixFile(n=n, d=d)


def save_matrix(path: Path, d: np.ndarray, extra: dict[str, Any] | None = None) -> Path:
    document: dict[str, Any] = {
        "n": int(d.shape[0]),
        "d": [[float(x) for x in row] for row in d],
    }
    if extra:
        document.update(extra)
    return write_json(path, document)
