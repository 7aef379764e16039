"""CSV and configuration helpers shared by the command line and the solvers.

Tables are written with a header row, 17 significant digits and UNIX
newlines so repeated runs give byte-identical files.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ConfigError


def _fmt(v):
    return f"{float(v):.17g}"


def write_table(path, header, columns):
    """Write equal-length columns under ``header``."""
    columns = [np.ravel(np.asarray(c, dtype=float)) for c in columns]
    if len(header) != len(columns):
        raise ConfigError("header and column count differ")
    n = len(columns[0])
    if any(len(c) != n for c in columns):
        raise ConfigError("columns differ in length")
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([_fmt(v) for v in row])
    return path


def write_complex_csv(path, t, values):
    """Complex samples as columns ``t, re, im``."""
    values = np.asarray(values, dtype=complex)
    return write_table(path, ["t", "re", "im"], [t, values.real, values.imag])


def read_table(path):
    """Columns of a headed numeric CSV as a dict of arrays."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ConfigError(f"{path} is empty")
    header, body = rows[0], rows[1:]
    try:
        data = np.array([[float(v) for v in r] for r in body if r], dtype=float)
    except ValueError as exc:
        raise ConfigError(f"{path}: non-numeric entry ({exc})") from exc
    data = data.reshape(-1, len(header))
    return {h.strip(): data[:, i] for i, h in enumerate(header)}


def read_complex_csv(path):
    cols = read_table(path)
    missing = {"t", "re", "im"} - set(cols)
    if missing:
        raise ConfigError(f"{path} lacks columns {sorted(missing)}")
    return cols["t"], cols["re"] + 1j * cols["im"]


def write_json(path, obj):
    path = Path(path)
    with open(path, "w", newline="\n") as fh:
        fh.write(json.dumps(obj, indent=2, sort_keys=True, default=_json_default))
        fh.write("\n")
    return path


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"cannot serialise {type(o).__name__}")


def _scalar(text):
    text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text.strip("'\"")


def read_config(path):
    """Read a JSON object or ``key = value`` lines (``#`` comments, ``[section]`` ignored)."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        return data
    data = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        data[key.strip().replace("-", "_")] = _scalar(value)
    return data
