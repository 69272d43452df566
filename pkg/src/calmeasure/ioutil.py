"""File formats: ``score,label`` CSV, JSON reports, atomic writes."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import CalibrationError, IoFailure, ParseError

__all__ = [
    "fmt_float",
    "atomic_write_text",
    "read_scores_csv",
    "write_scores_csv",
    "to_jsonable",
    "dumps_report",
]


def fmt_float(x: float) -> str:
    """17 significant digits, enough to round-trip any finite double."""
    return format(float(x), ".17g")


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see partial output."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def read_scores_csv(path: str | os.PathLike, *, allow_any_score: bool = False):
    """Parse a ``score,label`` CSV into (scores, raw labels).

    Labels may use {0,1} or {-1,1}. Scores must lie in [0, 1] unless
    ``allow_any_score`` (used for raw margins awaiting rescaling). Any bad
    row raises :class:`ParseError` naming its line.
    """
    from .core import canonicalize_labels

    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["score", "label"]:
        raise ParseError("header must be 'score,label'", 1)
    scores, labels = [], []
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", line)
        try:
            s = float(row[0])
            y = float(row[1])
        except ValueError:
            raise ParseError(f"non-numeric field in {row!r}", line) from None
        if not math.isfinite(s) or (not allow_any_score and not 0.0 <= s <= 1.0):
            raise ParseError(f"score {row[0]!r} outside [0, 1]", line)
        if y not in (-1.0, 0.0, 1.0):
            raise ParseError(f"label {row[1]!r} not in {{-1, 0, 1}}", line)
        scores.append(s)
        labels.append(int(y))
    try:
        labels = canonicalize_labels(labels)
    except CalibrationError as exc:
        raise ParseError(str(exc)) from exc
    return np.array(scores, dtype=float), np.array(labels, dtype=np.int64)


def write_scores_csv(path: str | os.PathLike | None, scores: Iterable[float], labels: Iterable[int]) -> str:
    lines = ["score,label"]
    lines += [f"{fmt_float(s)},{int(y)}" for s, y in zip(scores, labels)]
    text = "\n".join(lines) + "\n"
    if path is not None:
        atomic_write_text(path, text)
    return text


def to_jsonable(obj):
    """Recursively convert dataclass reports / numpy values into JSON types."""
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if v == -math.inf:
            return "-inf"
        if v == math.inf:
            return "inf"
        if math.isnan(v):
            return "nan"
        return v
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps_report(report) -> str:
    return json.dumps(to_jsonable(report), indent=2, sort_keys=False) + "\n"
