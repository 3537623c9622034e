"""JSON persistence for pairs and reports.

A pair document looks like::

    {"schema_version": 1,
     "left":  [{"n": 2, "data": [[1.0, 0.0], [1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}],
     "right": [{"n": 2, "data": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}],
     "metadata": {"name": "jordan2"}}

``data`` is row-major with one ``[re, im]`` pair per entry.  Output is
produced by a small emitter instead of ``json.dumps`` so that floats always
carry 17 significant digits and keys keep a fixed order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .decompose import DecompositionResult
from .defect import DefectReport
from .errors import InputError, ParseError, SchemaError
from .instances import SuiteReport
from .tuples import OperatorTuple, TuplePair

__all__ = [
    "SCHEMA_VERSION",
    "PairDocument",
    "parse_document",
    "serialize_document",
    "parse_pair",
    "serialize_pair",
    "serialize_matrix",
    "serialize_report",
    "dumps",
]

SCHEMA_VERSION = 1
_PAIR_KEYS = {"schema_version", "left", "right", "metadata"}


@dataclass(frozen=True)
class PairDocument:
    pair: TuplePair
    metadata: Optional[dict] = None
    schema_version: int = SCHEMA_VERSION


# ---------------------------------------------------------------- emitter

def _float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise InputError(f"cannot serialize non-finite value {x}")
    if x == 0:
        x = 0.0  # drop the sign of negative zero
    s = format(x, ".17g")
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def dumps(value: Any, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON text.  Dicts keep insertion order; short scalar lists stay on one line."""
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return f"[{_float(value.real)}, {_float(value.imag)}]"
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in value):
            return "[" + ", ".join(dumps(v) for v in value) + "]"
        items = [inner + dumps(v, indent, _level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise InputError(f"cannot serialize {type(value).__name__}")


def _matrix_doc(a: np.ndarray) -> dict:
    return {"n": a.shape[0], "data": [[float(z.real), float(z.imag)] for z in a.ravel()]}


def serialize_matrix(a) -> str:
    return dumps(_matrix_doc(np.asarray(a, dtype=np.complex128))) + "\n"


def serialize_pair(p: TuplePair, metadata: Optional[dict] = None) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "left": [_matrix_doc(a) for a in p.left],
        "right": [_matrix_doc(b) for b in p.right],
    }
    if metadata is not None:
        doc["metadata"] = {str(k): str(v) for k, v in metadata.items()}
    return dumps(doc) + "\n"


# ---------------------------------------------------------------- parser

def _reject_constant(name):
    raise ParseError(f"non-finite literal {name} is not allowed")


def _number(x, path) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(f"expected a number, got {type(x).__name__}", path)
    x = float(x)
    if not math.isfinite(x):
        raise SchemaError("entry is not finite", path)
    return x


def _parse_matrix(doc, path) -> np.ndarray:
    if not isinstance(doc, dict):
        raise SchemaError("a matrix must be an object", path)
    extra = set(doc) - {"n", "data"}
    if extra:
        raise SchemaError(f"unexpected keys {sorted(extra)}", path)
    n = doc.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SchemaError("n must be a positive integer", f"{path}.n")
    data = doc.get("data")
    if not isinstance(data, list) or len(data) != n * n:
        got = len(data) if isinstance(data, list) else type(data).__name__
        raise SchemaError(f"data must hold n*n = {n * n} entries, got {got}", f"{path}.data")
    out = np.empty(n * n, dtype=np.complex128)
    for k, z in enumerate(data):
        zpath = f"{path}.data[{k}]"
        if not isinstance(z, list) or len(z) != 2:
            raise SchemaError("an entry must be a [re, im] pair", zpath)
        out[k] = complex(_number(z[0], zpath), _number(z[1], zpath))
    return out.reshape(n, n)


def _parse_side(doc, key) -> list:
    side = doc.get(key)
    if not isinstance(side, list) or not side:
        raise SchemaError("must be a nonempty list of matrices", key)
    return [_parse_matrix(m, f"{key}[{i}]") for i, m in enumerate(side)]


def parse_pair(text) -> TuplePair:
    """Parse and validate a pair document (``str`` or UTF-8 ``bytes``)."""
    return parse_document(text).pair


def serialize_document(doc: PairDocument) -> str:
    return serialize_pair(doc.pair, doc.metadata)


def parse_document(text) -> PairDocument:
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}") from exc
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("document must be an object")
    extra = set(doc) - _PAIR_KEYS
    if extra:
        raise SchemaError(f"unexpected keys {sorted(extra)}")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION or isinstance(version, bool):
        raise SchemaError(f"unsupported schema_version {version!r}", "schema_version")
    meta = doc.get("metadata")
    if meta is not None and (not isinstance(meta, dict) or not all(isinstance(v, str) for v in meta.values())):
        raise SchemaError("metadata must map strings to strings", "metadata")
    left = _parse_side(doc, "left")
    right = _parse_side(doc, "right")
    if len(right) != len(left):
        raise SchemaError(f"left has {len(left)} entries, right has {len(right)}", "right")
    n = left[0].shape[0]
    for key, side in (("left", left), ("right", right)):
        for i, m in enumerate(side):
            if m.shape[0] != n:
                raise SchemaError(f"dimension {m.shape[0]} differs from {n}", f"{key}[{i}].n")
    return PairDocument(TuplePair(OperatorTuple(left), OperatorTuple(right)), meta)


# ---------------------------------------------------------------- reports

def _report_doc(r) -> dict:
    if isinstance(r, DefectReport):
        return {
            "type": "defect_report",
            "kind": r.kind.value,
            "probes": [[k, float(v)] for k, v in r.probes],
            "strict_order": r.strict_order,
            "max_order_searched": r.max_order_searched,
        }
    if isinstance(r, DecompositionResult):
        return {
            "type": "decomposition",
            "c": complex(r.c),
            "m1": r.m1,
            "m2": r.m2,
            "tensor_order": r.tensor_order,
            "residual1": r.residual1,
            "residual2": r.residual2,
            "strict1": r.strict1,
            "strict2": r.strict2,
        }
    if isinstance(r, SuiteReport):
        return {
            "type": "suite_report",
            "suite_name": r.suite_name,
            "trials": r.trials,
            "passes": r.passes,
            "failures": [{"seed": s, "description": d, "residual": res} for s, d, res in r.failures],
        }
    raise InputError(f"no report format for {type(r).__name__}")


def serialize_report(r, include_elapsed: bool = False) -> str:
    """Deterministic JSON for a report.

    Suite wall-clock time is left out unless ``include_elapsed`` is set, so
    repeated runs produce identical bytes.
    """
    doc = _report_doc(r)
    if include_elapsed and isinstance(r, SuiteReport):
        doc["elapsed"] = r.elapsed
    return dumps(doc) + "\n"
