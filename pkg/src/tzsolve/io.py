"""JSON serialization.  Complex numbers are written as [re, im] pairs.

Matrix files hold ``{"n": n, "col": [...], "row": [...]}`` (first column and
first row of T); right-hand-side files hold ``{"b": [...]}``.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .toeplitz import ToeplitzOperator, make_toeplitz


class FormatError(ValueError):
    """A file parsed as JSON but does not follow the schema."""


def encode_complex(v) -> list:
    v = np.asarray(v, dtype=complex).ravel()
    return [[float(z.real), float(z.imag)] for z in v]


def decode_complex(pairs) -> np.ndarray:
    try:
        a = np.asarray(pairs, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError("expected a list of [re, im] pairs") from exc
    if a.ndim != 2 or a.shape[1] != 2:
        raise FormatError("expected a list of [re, im] pairs")
    return a[:, 0] + 1j * a[:, 1]


def toeplitz_to_json(T: ToeplitzOperator) -> dict:
    return {"n": T.n, "col": encode_complex(T.col), "row": encode_complex(T.row)}


def toeplitz_from_json(obj) -> ToeplitzOperator:
    if not isinstance(obj, dict) or "col" not in obj or "row" not in obj:
        raise FormatError("matrix JSON needs 'col' and 'row'")
    T = make_toeplitz(decode_complex(obj["col"]), decode_complex(obj["row"]))
    if "n" in obj and int(obj["n"]) != T.n:
        raise FormatError(f"declared n={obj['n']} does not match data length {T.n}")
    return T


def rhs_from_json(obj) -> np.ndarray:
    if isinstance(obj, dict):
        if "b" not in obj:
            raise FormatError("right-hand-side JSON needs 'b'")
        obj = obj["b"]
    return decode_complex(obj)


def read_json(path) -> object:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_json(path, obj) -> None:
    text = json.dumps(obj, indent=None, separators=(",", ":")) + "\n"
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))
