"""JSON and CSV serialization.

Matrix schema: ``{"dim": [r, c], "re": [[...]], "im": [[...]]}``, row-major.
POVM schema: ``{"elements": [{"label": "E0", "matrix": <matrix>}, ...]}``.
Extra top-level keys (for example ``"meta"``) are ignored on read.
"""

from __future__ import annotations

import csv
import io as _io
import json
import sys
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .config import ToleranceConfig
from .errors import DimensionError, FidoptError
from .states import DensityOperator, Povm


class SchemaError(FidoptError):
    invariant = "json-schema"


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"dim": list(M.shape), "re": M.real.tolist(), "im": M.imag.tolist()}


def matrix_from_json(obj: Any) -> np.ndarray:
    if not isinstance(obj, dict) or not {"dim", "re", "im"} <= obj.keys():
        raise SchemaError("matrix JSON needs keys 'dim', 're', 'im'")
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"matrix entries are not numeric: {exc}") from None
    dim = tuple(obj["dim"])
    if re.shape != dim or im.shape != dim or len(dim) != 2:
        raise DimensionError(f"declared dim {list(dim)} does not match entries "
                             f"{list(re.shape)} / {list(im.shape)}")
    return re + 1j * im


def state_from_json(obj: Any, tol: ToleranceConfig | None = None) -> DensityOperator:
    return DensityOperator(matrix_from_json(obj), tol)


def povm_to_json(E: Povm) -> dict:
    return {"elements": [{"label": lab, "matrix": matrix_to_json(X)} for lab, X in E]}


def povm_from_json(obj: Any, tol: ToleranceConfig | None = None) -> Povm:
    if not isinstance(obj, dict) or not isinstance(obj.get("elements"), list):
        raise SchemaError("POVM JSON needs an 'elements' list")
    labels, mats = [], []
    for i, item in enumerate(obj["elements"]):
        if not isinstance(item, dict) or "matrix" not in item:
            raise SchemaError(f"POVM element {i} needs a 'matrix'")
        labels.append(str(item.get("label", f"E{i}")))
        mats.append(matrix_from_json(item["matrix"]))
    return Povm.from_elements(mats, labels, tol)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def to_jsonable(x: Any) -> Any:
    """Replace infinities by ``"inf"`` and numpy scalars by Python ones."""
    if isinstance(x, dict):
        return {k: to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if np.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def read_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None


def write_text(text: str, path: str | Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_json(obj: Any, path: str | Path | None) -> None:
    write_text(dumps(to_jsonable(obj)), path)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()
