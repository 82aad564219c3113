"""CSV matrix files and JSON output helpers.

Matrices are stored one pattern (or attention row) per line, comma
separated, with ``.`` as decimal point. Values are written with 17
significant digits so every float64 survives a write/read cycle unchanged.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import IO, List, Union

import numpy as np

from .errors import DomainError

PathLike = Union[str, Path]


class InputError(DomainError):
    """Malformed or missing input file."""


def read_matrix(path: PathLike, header: bool = False) -> np.ndarray:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such file")
    rows: List[List[float]] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        if header:
            next(reader, None)
        for lineno, fields in enumerate(reader, start=2 if header else 1):
            if not fields or all(not f.strip() for f in fields):
                continue
            try:
                values = [float(f) for f in fields]
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from None
            if not all(math.isfinite(v) for v in values):
                raise InputError(f"{path}:{lineno}: non-finite value")
            if rows and len(values) != len(rows[0]):
                raise InputError(f"{path}:{lineno}: expected {len(rows[0])} columns, got {len(values)}")
            rows.append(values)
    if not rows:
        raise InputError(f"{path}: empty matrix")
    return np.array(rows, dtype=np.float64)


def format_float(v: float) -> str:
    return format(float(v), ".17g")


def write_matrix(path_or_file: Union[PathLike, IO[str]], A) -> None:
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    lines = "".join(",".join(format_float(v) for v in row) + "\n" for row in A)
    if hasattr(path_or_file, "write"):
        path_or_file.write(lines)
    else:
        Path(path_or_file).write_text(lines, encoding="utf-8")


def to_jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        # JSON has no infinities; keep them readable
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj))
