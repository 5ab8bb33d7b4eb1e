"""Matrix / vector-set files and JSON list arguments.

A matrix file is a JSON object ``{"rows": r, "cols": c, "entries": [[re, im], ...]}``
with ``r * c`` entries in row-major order. As a vector set, each row is one
vector.
"""

import json
import os

import numpy as np

from .errors import InputError


def matrix_to_json(A):
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim == 1:
        A = A[None, :]
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in A.ravel()],
    }


def matrix_from_json(obj, source="<input>"):
    if not isinstance(obj, dict):
        raise InputError(f"{source}: top level must be an object with rows, cols, entries")
    for key in ("rows", "cols", "entries"):
        if key not in obj:
            raise InputError(f"{source}: missing field '{key}'")
    rows, cols = obj["rows"], obj["cols"]
    for key, value in (("rows", rows), ("cols", cols)):
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise InputError(f"{source}: field '{key}' must be a positive integer")
    entries = obj["entries"]
    if not isinstance(entries, list):
        raise InputError(f"{source}: field 'entries' must be a list of [re, im] pairs")
    if len(entries) != rows * cols:
        raise InputError(f"{source}: field 'entries' has {len(entries)} items, expected rows*cols = {rows * cols}")
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, e in enumerate(entries):
        if (
            not isinstance(e, list)
            or len(e) != 2
            or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in e)
        ):
            raise InputError(f"{source}: field 'entries'[{i}] must be a [re, im] pair of numbers")
        out[i] = complex(e[0], e[1])
    if not np.all(np.isfinite(out)):
        raise InputError(f"{source}: field 'entries' contains non-finite values")
    return out.reshape(rows, cols)


def read_matrix(path):
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    return matrix_from_json(obj, str(path))


def write_matrix(path, A):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(matrix_to_json(A), fh)
        fh.write("\n")


def parse_json_list(text, what):
    """A JSON array given inline or as the path of a file containing one."""
    if text is None:
        return None
    source = what
    raw = text
    if os.path.exists(text):
        source = f"{text} ({what})"
        try:
            with open(text, encoding="utf-8") as fh:
                raw = fh.read()
        except OSError as exc:
            raise InputError(f"{text}: cannot read file ({exc.strerror})") from exc
    try:
        value = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: not a JSON array ({exc.msg})") from exc
    if not isinstance(value, list) or not value:
        raise InputError(f"{source}: expected a non-empty JSON array")
    return value


def parse_coefficients(text):
    value = parse_json_list(text, "coefficients")
    if value is None:
        return None
    out = []
    for i, item in enumerate(value):
        if isinstance(item, list) and len(item) == 2:
            out.append(complex(item[0], item[1]))
        elif isinstance(item, (int, float)) and not isinstance(item, bool):
            out.append(complex(item))
        else:
            raise InputError(f"coefficients[{i}]: expected a number or a [re, im] pair")
    return np.array(out)


def parse_frequencies(text):
    value = parse_json_list(text, "frequencies")
    if value is None:
        return None
    for i, item in enumerate(value):
        if not isinstance(item, int) or isinstance(item, bool):
            raise InputError(f"frequencies[{i}]: expected an integer")
    return np.array(value, dtype=np.int64)
