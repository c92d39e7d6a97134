"""Gaussian measurement ensembles and the phaseless measurement operator.

A measurement matrix is a dense ``(m, N)`` float array; :class:`MeasurementMatrix`
wraps one together with its sampling seed. Functions accept either form.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InputError
from .signals import as_signal


@dataclass(frozen=True)
class MeasurementMatrix:
    entries: np.ndarray
    seed: int = None

    def __post_init__(self):
        object.__setattr__(self, "entries", as_matrix(self.entries))

    @property
    def m(self):
        return self.entries.shape[0]

    @property
    def N(self):
        return self.entries.shape[1]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def as_matrix(A):
    if isinstance(A, MeasurementMatrix):
        return A.entries
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise InputError(f"measurement matrix must be a nonempty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError("measurement matrix contains non-finite entries")
    return A


@dataclass(frozen=True)
class Observation:
    """Phaseless measurements ``b`` with the exact l2 norm of the added noise."""

    b: np.ndarray
    noise_level: float = 0.0
    clamped: bool = True
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if not np.all(np.isfinite(b)):
            raise InputError("observation contains non-finite entries")
        if self.noise_level < 0:
            raise InputError("noise_level must be nonnegative")
        if self.clamped and np.any(b < 0):
            raise InputError("clamped observation has negative entries")
        object.__setattr__(self, "b", b)

    def to_json(self):
        return {"b": self.b.tolist(), "noise_level": float(self.noise_level),
                "clamped": bool(self.clamped)}

    @classmethod
    def from_json(cls, d):
        return cls(np.asarray(d["b"], dtype=float), float(d.get("noise_level", 0.0)),
                   bool(d.get("clamped", False)))


def sample_gaussian(m, N, seed):
    """i.i.d. N(0, 1/m) entries, so that E||Ax||^2 = ||x||^2."""
    if int(m) != m or int(N) != N or m < 1 or N < 1:
        raise InputError(f"m and N must be positive integers, got m={m}, N={N}")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((int(m), int(N))) / np.sqrt(m)
    return MeasurementMatrix(A, seed)


def phaseless_measure(A, x):
    A = as_matrix(A)
    x = as_signal(x)
    if A.shape[1] != x.size:
        raise InputError(f"matrix has {A.shape[1]} columns but signal has length {x.size}")
    return Observation(np.abs(A @ x), 0.0, True)


def add_noise(obs, model="gaussian", magnitude=0.0, seed=None, e=None):
    """Add noise of exact l2 norm ``magnitude`` (or the caller's vector ``e``).

    ``model`` is one of ``gaussian`` (direction drawn from a standard normal),
    ``uniform`` (direction from U[-1, 1]^m) or ``adversarial`` (uses ``e`` as given
    and records its norm). The resulting observation is never clamped.
    """
    m = obs.b.size
    if model == "adversarial":
        if e is None:
            raise InputError("adversarial model needs an explicit noise vector e")
        e = np.asarray(e, dtype=float).reshape(-1)
        if e.size != m:
            raise InputError(f"noise vector has length {e.size}, expected {m}")
        level = float(np.linalg.norm(e))
    else:
        if magnitude < 0:
            raise InputError(f"noise magnitude must be nonnegative, got {magnitude}")
        if magnitude == 0:
            return replace(obs, clamped=False)
        rng = np.random.default_rng(seed)
        if model == "gaussian":
            d = rng.standard_normal(m)
        elif model == "uniform":
            d = rng.uniform(-1.0, 1.0, m)
        else:
            raise InputError(f"unknown noise model {model!r}")
        e = d * (magnitude / np.linalg.norm(d))
        level = float(magnitude)
    # stacked noise: the triangle inequality keeps the recorded level an upper bound
    return Observation(obs.b + e, obs.noise_level + level, False)


def row_submatrix(A, I):
    """Rows of ``A`` indexed by ``I`` (0-based), in ascending index order."""
    A = as_matrix(A)
    idx = np.unique(np.asarray(list(I), dtype=int))
    if idx.size == 0:
        raise InputError("row index set must be nonempty")
    if idx[0] < 0 or idx[-1] >= A.shape[0]:
        raise InputError(f"row indices out of range for a matrix with {A.shape[0]} rows")
    return MeasurementMatrix(A[idx])


def signs(v):
    """Sign with sign(0) := +1."""
    return np.where(np.asarray(v) >= 0, 1.0, -1.0)


def sign_partition(A, x, y):
    """Split rows into T (matching signs of <a_j,x> and <a_j,y>) and its complement."""
    A = as_matrix(A)
    x = as_signal(x, A.shape[1])
    y = as_signal(y, A.shape[1])
    same = signs(A @ x) == signs(A @ y)
    return tuple(np.flatnonzero(same).tolist()), tuple(np.flatnonzero(~same).tolist())
