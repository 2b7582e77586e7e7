"""JSON model files: exact rationals as ``"p/q"`` strings, sorted keys only."""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .frobenius import EulerData, FrobeniusModel
from .series import CorrelatorFamily, GradedBasis, Metric, rational_str


class ModelFileError(ValueError):
    """Malformed model file; the message names the offending path."""


def schema() -> dict:
    text = resources.files("frobtensor").joinpath("schemas/model.schema.json").read_text()
    return json.loads(text)


def _q(s: str) -> Fraction:
    return Fraction(s)


def model_from_json(doc: dict) -> FrobeniusModel:
    try:
        jsonschema.validate(doc, schema())
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ModelFileError(f"{where}: {e.message}") from None
    r = doc["dimension"]
    parity = tuple(doc.get("parity", [0] * r))
    labels = tuple(doc.get("labels", [str(a) for a in range(r)]))
    if len(parity) != r or len(labels) != r:
        raise ModelFileError("parity/labels: length differs from dimension")
    rows = doc["metric"]
    if len(rows) != r or any(len(row) != r for row in rows):
        raise ModelFileError("metric: expected a dimension x dimension matrix")
    N = doc["truncation"]
    tensors: dict[int, dict] = {}
    for key, entries in doc["correlators"].items():
        n = int(key)
        if not 3 <= n <= N:
            raise ModelFileError(f"correlators/{key}: arity outside [3, truncation]")
        for pos, item in enumerate(entries):
            idx = tuple(item["index"])
            if len(idx) != n:
                raise ModelFileError(f"correlators/{key}/{pos}/index: expected {n} entries")
            if any(a >= r for a in idx):
                raise ModelFileError(f"correlators/{key}/{pos}/index: index out of range")
            if list(idx) != sorted(idx):
                raise ModelFileError(f"correlators/{key}/{pos}/index: keys must be sorted")
            if idx in tensors.get(n, {}):
                raise ModelFileError(f"correlators/{key}/{pos}/index: duplicate key")
            tensors.setdefault(n, {})[idx] = _q(item["value"])
    try:
        basis = GradedBasis(parity, labels)
        metric = Metric([[_q(x) for x in row] for row in rows], parity)
        family = CorrelatorFamily(basis, N, tensors)
        euler = None
        if "euler" in doc:
            e = doc["euler"]
            euler = EulerData(tuple(tuple(_q(x) for x in row) for row in e["d"]),
                              tuple(_q(x) for x in e["r"]), _q(e["D"]), _q(e["d0"]))
        return FrobeniusModel(basis, metric, family, euler, doc.get("identity"))
    except (ValueError, ZeroDivisionError) as e:
        raise ModelFileError(str(e)) from None


def model_to_json(model: FrobeniusModel) -> dict:
    doc: dict[str, Any] = {
        "dimension": model.dimension,
        "parity": list(model.basis.parity),
        "labels": list(model.basis.labels),
        "metric": [[rational_str(x) for x in row] for row in model.metric.g],
        "truncation": model.truncation,
        "correlators": {
            str(n): [{"index": list(k), "value": rational_str(v)} for k, v in sorted(model.correlators.items(n))]
            for n in model.correlators.arities()
        },
    }
    if model.euler is not None:
        e = model.euler
        doc["euler"] = {"d": [[rational_str(x) for x in row] for row in e.d], "r": [rational_str(x) for x in e.r],
                        "D": rational_str(e.D), "d0": rational_str(e.d0)}
    if model.identity is not None:
        doc["identity"] = model.identity
    return doc


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def read_model(path: str | Path) -> FrobeniusModel:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ModelFileError(f"{path}: line {e.lineno}: {e.msg}") from None
    except OSError as e:
        raise ModelFileError(str(e)) from None
    return model_from_json(doc)


def write_model(model: FrobeniusModel, path: str | Path) -> None:
    Path(path).write_text(dumps(model_to_json(model)))
