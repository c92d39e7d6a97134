"""Dense two-phase revised simplex with Bland's pivoting rule.

Small problems only. Basic solutions are recomputed from the original data at
every iteration, so round-off does not accumulate through a tableau, and Bland's
rule makes the returned vertex a deterministic function of the input.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import qr

from ..errors import InputError, SolverError

FEAS_TOL = 1e-9
GAP_TOL = 1e-9
_PIVOT_TOL = 1e-11
_COST_TOL = 1e-11


@dataclass
class LpSolution:
    point: np.ndarray
    objective: float
    status: str  # "optimal" | "infeasible" | "unbounded"
    primal_residual: float = 0.0
    duality_gap: float = 0.0
    dual: np.ndarray = None
    iterations: int = 0
    info: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.status == "optimal"


def _revised_simplex(A, b, c, basis, max_iter):
    """Minimize c.z over {Az = b, z >= 0} from a feasible starting basis.

    Returns (status, basis, iterations). ``basis`` is modified in place.
    """
    m, n = A.shape
    it = 0
    while True:
        B = A[:, basis]
        try:
            xb = np.linalg.solve(B, b)
            y = np.linalg.solve(B.T, c[basis])
        except np.linalg.LinAlgError as exc:
            raise SolverError("singular basis", {"basis": list(basis), "iteration": it}) from exc
        reduced = c - A.T @ y
        scale = 1.0 + np.abs(c).max(initial=0.0)
        in_basis = np.zeros(n, dtype=bool)
        in_basis[basis] = True
        candidates = np.flatnonzero((reduced < -_COST_TOL * scale) & ~in_basis)
        if candidates.size == 0:
            return "optimal", it
        q = int(candidates[0])  # Bland: lowest index enters
        u = np.linalg.solve(B, A[:, q])
        pos = np.flatnonzero(u > _PIVOT_TOL)
        if pos.size == 0:
            return "unbounded", it
        ratios = np.maximum(xb[pos], 0.0) / u[pos]
        best = ratios.min()
        ties = pos[ratios <= best + 1e-12 * (1.0 + best)]
        # Bland: among tied rows, the basic variable with the lowest index leaves
        r = int(ties[np.argmin(np.asarray(basis)[ties])])
        basis[r] = q
        it += 1
        if it > max_iter:
            raise SolverError("iteration limit reached", {"iterations": it})


def solve_standard(A, b, c, feas_tol=FEAS_TOL, gap_tol=GAP_TOL, max_iter=10_000):
    """min c.z s.t. Az = b, z >= 0 (all variables nonnegative)."""
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float).reshape(-1)
    c = np.array(c, dtype=float).reshape(-1)
    m, n = A.shape
    if b.size != m or c.size != n:
        raise InputError(f"inconsistent LP dimensions: A {A.shape}, b {b.size}, c {c.size}")
    if m == 0:
        if np.any(c < -_COST_TOL):
            return LpSolution(None, -np.inf, "unbounded")
        return LpSolution(np.zeros(n), 0.0, "optimal", dual=np.zeros(0))

    m_orig = m
    A, b, keep, infeasible = _independent_rows(A, b, feas_tol)
    if infeasible:
        return LpSolution(None, np.inf, "infeasible", info={"reason": "inconsistent equations"})
    m = A.shape[0]
    if m == 0:
        if np.any(c < -_COST_TOL):
            return LpSolution(None, -np.inf, "unbounded")
        return LpSolution(np.zeros(n), 0.0, "optimal", dual=np.zeros(m_orig))

    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0
    bscale = 1.0 + np.abs(b).max()

    # phase 1: artificial identity block
    A1 = np.hstack([A, np.eye(m)])
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))
    _, it1 = _revised_simplex(A1, b, c1, basis, max_iter)
    xb = np.linalg.solve(A1[:, basis], b)
    infeas = float(sum(v for j, v in zip(basis, xb) if j >= n))
    if infeas > feas_tol * bscale:
        return LpSolution(None, np.inf, "infeasible", iterations=it1,
                          info={"phase1_infeasibility": infeas})

    # pivot zero-level artificials out; rows have full rank so a structural column exists
    for r in range(m):
        if basis[r] < n:
            continue
        row = np.linalg.solve(A1[:, basis].T, np.eye(m)[r])
        coeff = row @ A
        coeff[[j for j in basis if j < n]] = 0.0
        cand = np.flatnonzero(np.abs(coeff) > 1e-7 * max(np.abs(coeff).max(), 1e-300))
        if np.abs(coeff).max() < 1e-12:
            raise SolverError("numerically dependent equality rows", {"row": r})
        basis[r] = int(cand[0])
    A2, b2 = A, b
    status, it2 = _revised_simplex(A2, b2, c, basis, max_iter)
    if status == "unbounded":
        return LpSolution(None, -np.inf, "unbounded", iterations=it1 + it2)

    B = A2[:, basis]
    z = np.zeros(n)
    z[basis] = np.linalg.solve(B, b2)
    z[np.abs(z) < 1e-14 * bscale] = 0.0
    y2 = np.linalg.solve(B.T, c[basis])
    y2 = np.where(flip, -y2, y2)
    y = np.zeros(m_orig)
    y[keep] = y2
    obj = float(c @ z)
    resid = float(np.abs(A2 @ z - b2).max(initial=0.0))
    gap = abs(obj - float(np.where(flip, -b2, b2) @ y2))
    return LpSolution(z, obj, "optimal", resid, gap, dual=y, iterations=it1 + it2)


def _independent_rows(A, b, tol):
    """Drop linearly dependent rows; flag an inconsistent system."""
    if A.shape[0] == 0:
        return A, b, np.arange(0), False
    _, R, piv = qr(A.T, pivoting=True, mode="economic")
    d = np.abs(np.diag(R))
    rank = int(np.sum(d > 1e-10 * max(d.max(initial=0.0), 1.0)))
    keep = np.sort(piv[:rank])
    if rank < A.shape[0]:
        z = np.linalg.lstsq(A[keep], b[keep], rcond=None)[0] if rank else np.zeros(A.shape[1])
        if np.abs(A @ z - b).max() > tol * (1.0 + np.abs(b).max()) * 10:
            return A, b, keep, True
    return A[keep].copy(), b[keep].copy(), keep, False


def solve_lp(c, E_eq, f_eq, nonneg_mask=None, feas_tol=FEAS_TOL, gap_tol=GAP_TOL, max_iter=10_000):
    """Minimize ``c @ z`` subject to ``E_eq @ z == f_eq`` and ``z[i] >= 0`` where masked.

    Unmasked (free) variables are split into differences of nonnegative parts.
    The returned :class:`LpSolution` carries the primal residual (max-abs) and the
    gap between primal and dual objectives; ``status`` is one of ``optimal``,
    ``infeasible`` or ``unbounded``.
    """
    c = np.asarray(c, dtype=float).reshape(-1)
    n = c.size
    E = np.asarray(E_eq, dtype=float)
    if E.size == 0:
        E = np.zeros((0, n))
    E = E.reshape(-1, n) if E.ndim == 1 else E
    f = np.asarray(f_eq, dtype=float).reshape(-1)
    if E.shape[1] != n or E.shape[0] != f.size:
        raise InputError(f"inconsistent LP dimensions: c {n}, E {E.shape}, f {f.size}")
    if not (np.all(np.isfinite(E)) and np.all(np.isfinite(f)) and np.all(np.isfinite(c))):
        raise InputError("LP data must be finite")
    mask = np.ones(n, dtype=bool) if nonneg_mask is None else np.asarray(nonneg_mask, dtype=bool)
    if mask.size != n:
        raise InputError("nonneg_mask length must match the number of variables")
    free = np.flatnonzero(~mask)
    As = np.hstack([E, -E[:, free]])
    cs = np.concatenate([c, -c[free]])
    sol = solve_standard(As, f, cs, feas_tol, gap_tol, max_iter)
    if sol.ok:
        zs = sol.point
        z = zs[:n].copy()
        z[free] -= zs[n:]
        sol.point = z
        sol.objective = float(c @ z)
        sol.primal_residual = float(np.abs(E @ z - f).max(initial=0.0))
        if sol.primal_residual > feas_tol * (1.0 + np.abs(f).max(initial=0.0)) or \
                sol.duality_gap > gap_tol * (1.0 + abs(sol.objective)):
            raise SolverError("simplex finished outside tolerance",
                              {"primal_residual": sol.primal_residual, "duality_gap": sol.duality_gap})
    return sol
