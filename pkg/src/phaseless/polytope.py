"""Sparse representation of the polytope T(alpha, s) and the tail power-sum bound.

A vector ``v`` with ``||v||_inf <= alpha`` and ``||v||_1 <= s * alpha`` is a convex
combination of s-sparse vectors ``u`` with ``supp(u) ⊆ supp(v)``,
``||u||_1 = ||v||_1`` and ``||u||_inf <= alpha``. :func:`sparse_decompose` builds
such a combination explicitly.

Construction. With ``w = |v|`` restricted to its support and ``L = ||v||_1``, the set
``Q = {0 <= u <= alpha, sum(u) = L}`` is a polytope whose vertices have at most one
fractional coordinate and therefore at most ``ceil(L / alpha) <= s`` nonzeros. A
Carathéodory walk peels vertices off ``w``: pick a vertex ``u`` on the smallest
face of ``Q`` containing ``w`` (coordinates of ``w`` at 0 or ``alpha`` stay fixed),
step as far as possible from ``u`` through ``w`` and recurse on the exit point,
which lies on a strictly smaller face. At most ``n + 1`` atoms arise for ``n``
nonzeros. Signs of ``v`` are restored at the end.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError, PreconditionError
from .signals import as_signal

SLACK = 1e-12


def polytope_membership(v, alpha, s, slack=SLACK):
    """True iff ``||v||_inf <= alpha`` and ``||v||_1 <= s * alpha`` (each up to ``slack``)."""
    v = as_signal(v)
    if not alpha > 0 or s < 1:
        raise InputError(f"need alpha > 0 and s >= 1, got alpha={alpha}, s={s}")
    a = np.abs(v)
    return bool(a.max() <= alpha + slack and a.sum() <= s * alpha + slack * (1.0 + s * alpha))


@dataclass
class PolytopeDecomposition:
    atoms: list
    weights: list
    alpha: float
    s: int

    def reconstruct(self):
        return sum(w * u for w, u in zip(self.weights, self.atoms))

    def check(self, v, tol=1e-9):
        """Return a list of violated invariants (empty when the decomposition is valid)."""
        v = as_signal(v)
        bad = []
        w = np.asarray(self.weights)
        if np.any(w < 0):
            bad.append("negative weight")
        if abs(w.sum() - 1.0) > 1e-12:
            bad.append(f"weights sum to {w.sum()!r}")
        supp = np.abs(v) > 0
        l1 = np.abs(v).sum()
        for i, u in enumerate(self.atoms):
            if np.any((u != 0) & ~supp):
                bad.append(f"atom {i} leaves the support of v")
            if np.count_nonzero(u) > self.s:
                bad.append(f"atom {i} has {np.count_nonzero(u)} > s nonzeros")
            if abs(np.abs(u).sum() - l1) > tol:
                bad.append(f"atom {i} has l1 norm {np.abs(u).sum()!r}, expected {l1!r}")
            if np.abs(u).max(initial=0.0) > self.alpha + SLACK:
                bad.append(f"atom {i} exceeds alpha")
        if np.abs(self.reconstruct() - v).max() > tol:
            bad.append("reconstruction error above tolerance")
        return bad


def _face_vertex(w, alpha, L, fixed_lo, fixed_hi, tol):
    """A vertex of Q on the face {u_i = 0 for fixed_lo, u_i = alpha for fixed_hi}.

    Free coordinates are filled greedily in descending order of ``w``.
    """
    u = np.zeros_like(w)
    u[fixed_hi] = alpha
    remaining = L - alpha * np.count_nonzero(fixed_hi)
    free = np.flatnonzero(~(fixed_lo | fixed_hi))
    for i in free[np.lexsort((free, -w[free]))]:
        if remaining <= tol:
            break
        take = min(alpha, remaining)
        u[i] = take
        remaining -= take
    return u


def sparse_decompose(v, alpha, s, max_atoms=None):
    """Write ``v`` as a convex combination of s-sparse atoms per :class:`PolytopeDecomposition`."""
    v = as_signal(v)
    if not polytope_membership(v, alpha, s):
        raise InputError("v is not in T(alpha, s): need ||v||_inf <= alpha and ||v||_1 <= s*alpha")
    s = int(s)
    support = np.flatnonzero(v)
    if support.size <= s:
        return PolytopeDecomposition([v.copy()], [1.0], float(alpha), s)
    sign = np.sign(v[support])
    w = np.minimum(np.abs(v[support]), alpha)
    L = float(np.abs(v).sum())
    n = support.size
    tol = 1e-13 * max(alpha, L)
    max_atoms = n + 1 if max_atoms is None else max_atoms
    atoms, weights = [], []
    mass = 1.0
    for _ in range(max_atoms):
        lo = w <= tol
        hi = w >= alpha - tol
        u = _face_vertex(w, alpha, L, lo, hi, tol)
        if np.abs(u - w).max() <= 1e-12 * max(alpha, 1.0) or len(atoms) == max_atoms - 1:
            atoms.append(u)
            weights.append(mass)
            break
        # largest lam with w' = (w - lam*u)/(1 - lam) still in the box
        with np.errstate(divide="ignore", invalid="ignore"):
            r_lo = np.where(u > tol, w / np.where(u > tol, u, 1.0), np.inf)
            r_hi = np.where(u < alpha - tol, (alpha - w) / np.where(u < alpha - tol, alpha - u, 1.0),
                            np.inf)
        lam = float(min(r_lo.min(), r_hi.min(), 1.0))
        if lam >= 1.0 - 1e-9:  # w is u up to round-off; dividing by 1 - lam would amplify it
            atoms.append(u)
            weights.append(mass)
            break
        atoms.append(u)
        weights.append(mass * lam)
        mass *= 1.0 - lam
        w = (w - lam * u) / (1.0 - lam)
        w = np.clip(w, 0.0, alpha)
        # snap coordinates that hit a bound so the face strictly shrinks
        w[w <= tol] = 0.0
        w[w >= alpha - tol] = alpha
    out = []
    for u in atoms:
        full = np.zeros_like(v)
        full[support] = sign * u
        out.append(full)
    wts = np.asarray(weights)
    wts = wts / wts.sum()
    return PolytopeDecomposition(out, wts.tolist(), float(alpha), s)


@dataclass(frozen=True)
class TailBound:
    lhs: float
    rhs: float
    holds: bool


def tail_power_bound(a, r, lam, alpha, slack=1e-12):
    """Compare sum_{j>r} a_j^alpha with r * ((sum_{i<=r} a_i^alpha / r)^(1/alpha) + lam/r)^alpha.

    The hypothesis ``sum_{i<=r} a_i + lam >= sum_{i>r} a_i`` on a nonincreasing
    nonnegative sequence is validated; ``r`` counts leading entries (1-based count).
    """
    a = as_signal(a)
    if np.any(a < 0) or np.any(np.diff(a) > 0):
        raise PreconditionError("a must be nonnegative and nonincreasing")
    if int(r) != r or not 1 <= r <= a.size:
        raise PreconditionError(f"r must be an integer in [1, {a.size}], got {r}")
    if lam < 0 or alpha < 1:
        raise PreconditionError(f"need lam >= 0 and alpha >= 1, got lam={lam}, alpha={alpha}")
    r = int(r)
    head, tail = a[:r], a[r:]
    if head.sum() + lam < tail.sum() - slack * (1.0 + tail.sum()):
        raise PreconditionError("sum of the first r terms plus lam is below the tail sum")
    lhs = float(np.sum(tail ** alpha))
    rhs = float(r * ((np.sum(head ** alpha) / r) ** (1.0 / alpha) + lam / r) ** alpha)
    return TailBound(lhs, rhs, bool(lhs <= rhs * (1.0 + slack) + slack))
