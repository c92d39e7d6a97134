"""Plain-text file formats for matrices, observations and signals.

Matrix files hold ``m N`` on the first line followed by ``m`` rows of ``N``
space-separated decimals. Observations are JSON objects
``{"b": [...], "noise_level": eps, "clamped": bool}``; signals are JSON arrays
or a one-line CSV ``x_1,...,x_N``. Floats are written with ``repr`` so a round
trip is exact.
"""

import json
from pathlib import Path

import numpy as np

from .errors import InputError
from .measurements import MeasurementMatrix, Observation, as_matrix
from .signals import as_signal


def write_matrix(path, A):
    A = as_matrix(A)
    lines = [f"{A.shape[0]} {A.shape[1]}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in A]
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix(path):
    text = Path(path).read_text().split("\n")
    rows = [ln.split() for ln in text if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise InputError(f"{path}: first line must be 'm N'")
    try:
        m, n = int(rows[0][0]), int(rows[0][1])
        data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
    except ValueError as exc:
        raise InputError(f"{path}: malformed number ({exc})") from exc
    if data.shape != (m, n):
        raise InputError(f"{path}: header says {m}x{n} but found {data.shape}")
    return MeasurementMatrix(data)


def write_observation(path, obs):
    Path(path).write_text(json.dumps(obs.to_json()) + "\n")


def read_observation(path):
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(d, dict) or "b" not in d:
        raise InputError(f"{path}: observation needs a 'b' field")
    return Observation.from_json(d)


def write_signal(path, x):
    x = as_signal(x)
    path = Path(path)
    if path.suffix == ".csv":
        path.write_text(",".join(repr(float(v)) for v in x) + "\n")
    else:
        path.write_text(json.dumps([float(v) for v in x]) + "\n")


def read_signal(path):
    path = Path(path)
    text = path.read_text().strip()
    try:
        if path.suffix == ".csv":
            vals = [float(v) for v in text.split(",")]
        else:
            vals = json.loads(text)
    except (ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: malformed signal ({exc})") from exc
    return as_signal(vals)
