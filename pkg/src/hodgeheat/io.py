"""Complex files (JSON) and CSV exports."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .complex import (ComplexError, WeightedComplex, build_complex, complex_from_simplices,
                      simplex_key)
from .reports import rows_to_csv

AUGMENT_VALUES = {"auto": "auto", True: "on", False: "off", "on": "on", "off": "off"}


def _int_list(value, where: str) -> list[int]:
    if not isinstance(value, list):
        raise ComplexError("expected a list of vertex ids", where)
    out = []
    for j, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise ComplexError(f"vertex id must be a non-negative integer, got {v!r}", f"{where}[{j}]")
        out.append(v)
    if len(set(out)) != len(out):
        raise ComplexError(f"duplicate vertex in simplex {out}", where)
    return out


def complex_from_dict(data: Any, augmented_override: str | None = None) -> WeightedComplex:
    """Validate and build a complex from the parsed JSON document.

    Keys: ``combinatorial`` (bool), ``augmented`` ("auto" | true | false),
    ``top_simplices`` (list of vertex lists), ``weights`` (comma keys to
    positive reals; "" is the empty simplex).  An explicit ``simplices``
    list may replace ``top_simplices``; it must then be face-closed.
    """
    if not isinstance(data, dict):
        raise ComplexError("complex file must hold a JSON object", "$")
    known = {"combinatorial", "augmented", "top_simplices", "simplices", "weights", "empty_weight"}
    extra = sorted(set(data) - known)
    if extra:
        raise ComplexError(f"unknown key {extra[0]!r}", f"$.{extra[0]}")
    aug_raw = data.get("augmented", False) if augmented_override is None else augmented_override
    if aug_raw not in AUGMENT_VALUES:
        raise ComplexError(f"augmented must be \"auto\", true or false, got {aug_raw!r}", "$.augmented")
    augmented = AUGMENT_VALUES[aug_raw]
    combinatorial = data.get("combinatorial", "weights" not in data)
    if not isinstance(combinatorial, bool):
        raise ComplexError("combinatorial must be a boolean", "$.combinatorial")
    if combinatorial:
        weights: Any = "combinatorial"
    else:
        if "weights" not in data:
            raise ComplexError("weights are required when combinatorial is false", "$.weights")
        raw = data["weights"]
        if not isinstance(raw, dict):
            raise ComplexError("weights must be an object", "$.weights")
        weights = {}
        for key, val in raw.items():
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ComplexError(f"weight must be a number, got {val!r}", f"$.weights[{key!r}]")
            try:
                weights[key] = float(val)
                if key:
                    [int(t) for t in key.split(",")]
            except ValueError:
                raise ComplexError(f"bad simplex key {key!r}", f"$.weights[{key!r}]") from None
    empty_weight = data.get("empty_weight", 1.0)
    if "simplices" in data:
        simp = data["simplices"]
        if not isinstance(simp, list):
            raise ComplexError("simplices must be a list", "$.simplices")
        lists = [_int_list(s, f"$.simplices[{i}]") for i, s in enumerate(simp)]
        return complex_from_simplices(lists, weights, augmented, empty_weight)
    if "top_simplices" not in data:
        raise ComplexError("missing top_simplices", "$.top_simplices")
    tops = data["top_simplices"]
    if not isinstance(tops, list) or not tops:
        raise ComplexError("top_simplices must be a nonempty list", "$.top_simplices")
    lists = [_int_list(s, f"$.top_simplices[{i}]") for i, s in enumerate(tops)]
    for i, s in enumerate(lists):
        if not s:
            raise ComplexError("empty top simplex", f"$.top_simplices[{i}]")
    return build_complex(lists, weights, augmented, empty_weight)


def load_complex(source: str | Path, augmented_override: str | None = None) -> WeightedComplex:
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ComplexError(f"cannot read file: {exc.strerror}", str(path)) from None
    return loads_complex(text, str(path), augmented_override)


def loads_complex(text: str, name: str = "<stdin>", augmented_override: str | None = None) -> WeightedComplex:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ComplexError(f"invalid JSON: {exc.msg}", f"{name}:{exc.lineno}:{exc.colno}") from None
    return complex_from_dict(data, augmented_override)


def complex_to_dict(cx: WeightedComplex) -> dict:
    """Inverse of :func:`complex_from_dict`: all maximal simplices plus full weights."""
    maximal = [list(s) for s in cx.simplices if s and not cx.coface_lists[s]]
    combinatorial = bool(np.all(cx.weights == 1.0))
    out = {"combinatorial": combinatorial, "augmented": cx.augmented, "top_simplices": maximal}
    if not combinatorial:
        out["weights"] = {simplex_key(s): float(w) for s, w in zip(cx.simplices, cx.weights) if s}
        if cx.augmented:
            out["empty_weight"] = cx.weight(())
    return out


def dumps_complex(cx: WeightedComplex) -> str:
    return json.dumps(complex_to_dict(cx), sort_keys=True) + "\n"


def matrix_to_csv(matrix: np.ndarray, keys: tuple) -> str:
    """Coordinate triplets (row_key, col_key, value) of the nonzero entries."""
    rows = []
    for i, j in zip(*np.nonzero(matrix)):
        v = matrix[i, j]
        rows.append((_key(keys[i]), _key(keys[j]), v if not np.iscomplexobj(matrix) else complex(v)))
    return rows_to_csv(("row_key", "col_key", "value"), rows)


def metric_to_csv(metric) -> str:
    rows = [(_key(a), _key(b), d) for a, b, d in metric.to_rows()]
    return rows_to_csv(("key_a", "key_b", "distance"), rows)


def _key(k) -> str:
    return simplex_key(k) if isinstance(k, tuple) else str(k)
