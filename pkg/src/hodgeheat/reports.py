"""Verification records and their JSON/CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

SERIES_COLUMNS = ("t", "lhs", "rhs", "slack")


class timed:
    """Context manager; calling the instance gives the elapsed seconds (frozen on exit)."""

    def __enter__(self):
        self._start = time.perf_counter()
        self._stop = None
        return self

    def __exit__(self, *exc):
        self._stop = time.perf_counter()
        return False

    def __call__(self) -> float:
        end = self._stop if self._stop is not None else time.perf_counter()
        return end - self._start


def jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays, tuples and non-finite floats to plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": jsonable(float(obj.real)), "im": jsonable(float(obj.imag))}
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


@dataclass
class BoundReport:
    """One verified inequality lhs <= rhs over a family of samples.

    ``max_violation`` is max(lhs - rhs); the check passes iff it is at most
    ``tolerance``.  ``series`` rows are (t, lhs, rhs, slack) with
    slack = rhs - lhs, typically the worst sample at each time.
    """

    check: str
    params: dict
    samples: int
    max_violation: float
    tolerance: float
    worst_sample: Any = None
    series: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        v = self.max_violation
        if v is None:
            return True
        return bool(not math.isnan(v) and v <= self.tolerance)

    @property
    def min_slack(self) -> float:
        return -self.max_violation

    def to_dict(self, include_runtime: bool = False) -> dict:
        out = {
            "check": self.check,
            "params": self.params,
            "samples": self.samples,
            "max_violation": self.max_violation,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "worst_sample": self.worst_sample,
            "extra": self.extra,
            "notes": self.notes,
        }
        if include_runtime:
            out["runtime"] = self.runtime
        return jsonable(out)

    def to_json(self, include_runtime: bool = False) -> str:
        return dumps(self.to_dict(include_runtime))

    def series_csv(self) -> str:
        return rows_to_csv(SERIES_COLUMNS, self.series)

    def summary_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.check}: max violation {self.max_violation:.3e} "
                f"(tol {self.tolerance:.1e}, {self.samples} samples)")


class ViolationTracker:
    """Running maximum of lhs - rhs with the sample that attains it."""

    def __init__(self):
        self.worst = -math.inf
        self.sample = None
        self.count = 0

    def update(self, lhs: np.ndarray, rhs: np.ndarray, describe) -> float:
        """Fold in arrays of samples; ``describe(i)`` builds the record for flat index i."""
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        gap = lhs - rhs
        self.count += gap.size
        if gap.size == 0:
            return -math.inf
        i = int(np.nanargmax(gap))
        g = float(gap.flat[i])
        if g > self.worst:
            self.worst = g
            self.sample = describe(i) | {"lhs": float(lhs.flat[i]), "rhs": float(rhs.flat[i])}
        return g


def series_row(t: float, lhs: np.ndarray, rhs: np.ndarray) -> tuple:
    """(t, lhs, rhs, slack) for the pair with the smallest slack."""
    gap = np.asarray(lhs, dtype=float) - np.asarray(rhs, dtype=float)
    i = int(np.argmax(gap))
    l, r = float(np.asarray(lhs).flat[i]), float(np.asarray(rhs).flat[i])
    return (float(t), l, r, r - l)


def rows_to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text)
