"""Real signal vectors, norms, best k-term approximation and the sign-modded metric.

Signals are plain 1-D float ``numpy`` arrays; :func:`as_signal` is the single
validation gate. Index sets are 0-based throughout the package.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError

SIGN_TOL = 1e-9


def as_signal(x, n=None):
    """Validate ``x`` as a finite real vector (optionally of length ``n``)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InputError(f"signal must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InputError("signal must have at least one entry")
    if n is not None and arr.size != n:
        raise InputError(f"signal has length {arr.size}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise InputError("signal contains non-finite entries")
    return arr


def lp_norm(x, p=2.0):
    """p-norm of ``x`` for p in (0, inf]; ``p=0`` counts the nonzeros."""
    x = as_signal(x)
    if p == 0:
        return float(np.count_nonzero(x))
    if not p > 0:
        raise InputError(f"p must be positive or 0 (l0 count), got {p}")
    a = np.abs(x)
    if np.isinf(p):
        return float(a.max())
    if p == 1:
        return float(a.sum())
    if p == 2:
        return float(np.linalg.norm(a))
    amax = a.max()
    if amax == 0:
        return 0.0
    # scale to avoid overflow for large p
    return float(amax * np.sum((a / amax) ** p) ** (1.0 / p))


@dataclass(frozen=True)
class SparseApprox:
    """Best k-term approximation error and the entries that achieve it."""

    value: float
    support: tuple
    residual: np.ndarray


def top_k_support(x, k):
    """Indices of the k largest magnitudes, ties broken toward the lower index."""
    a = np.abs(np.asarray(x, dtype=float))
    # lexsort sorts by the last key first: magnitude descending, then index
    order = np.lexsort((np.arange(a.size), -a))
    return np.sort(order[:k])


def best_k_term(x, k, q=1.0):
    """sigma_k(x)_q: distance in l_q from ``x`` to the set of k-sparse vectors.

    Keeping the k largest-magnitude entries is optimal for every q >= 1.
    """
    x = as_signal(x)
    n = x.size
    if not isinstance(k, (int, np.integer)) or k < 0 or k > n:
        raise InputError(f"k must be an integer in [0, {n}], got {k}")
    if not q >= 1:
        raise InputError(f"sigma_k is only defined here for q >= 1, got {q}")
    support = top_k_support(x, int(k))
    residual = x.copy()
    residual[support] = 0.0
    return SparseApprox(lp_norm(residual, q), tuple(int(i) for i in support), residual)


def sigma_k(x, k, q=1.0):
    """Shorthand for ``best_k_term(x, k, q).value``."""
    return best_k_term(x, k, q).value


def sim_distance(x, y, p=2.0):
    """min(||x - y||_p, ||x + y||_p): distance between x and y modulo a global sign."""
    x = as_signal(x)
    y = as_signal(y)
    if x.size != y.size:
        raise InputError(f"length mismatch: {x.size} vs {y.size}")
    return min(lp_norm(x - y, p), lp_norm(x + y, p))


def canonical_sign(x, tol=SIGN_TOL):
    """Return ``x`` or ``-x`` so that the first entry above ``tol`` in magnitude is positive."""
    x = as_signal(x)
    big = np.flatnonzero(np.abs(x) > tol)
    if big.size and x[big[0]] < 0:
        return -x
    return x.copy()


def in_sigma_k(x, k, tol=0.0):
    """True when ``x`` has at most k entries above ``tol`` in magnitude."""
    return int(np.count_nonzero(np.abs(as_signal(x)) > tol)) <= k
