"""l1-minimization engines built on the simplex and on projected gradient.

``min_l1_residual_ball`` follows the Pareto-curve approach of SPGL1: the
trade-off ``phi(tau) = min{||Mx - d||_2 : ||x||_1 <= tau}`` is convex and
nonincreasing, and the answer is the smallest ``tau`` with ``phi(tau) <= eps``.
Each ``tau`` is classified as feasible by an explicit point (residual <= eps) or
infeasible by a dual lower bound, so the bracket is never corrupted by inexact
inner solves.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import InfeasibleError, InputError, SolverError
from .simplex import LpSolution, solve_lp

OBJ_TOL = 1e-6
FEAS_TOL = 1e-9


def _as_system(M, d):
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M.reshape(1, -1)
    d = np.asarray(d, dtype=float).reshape(-1)
    if M.ndim != 2 or M.shape[1] < 1:
        raise InputError("M must be a matrix with at least one column")
    if M.shape[0] != d.size:
        raise InputError(f"M has {M.shape[0]} rows but d has length {d.size}")
    return M, d


def min_l1_affine(M, d, **lp_kw):
    """min ||x||_1 s.t. Mx = d, via the split x = u - v with u, v >= 0."""
    M, d = _as_system(M, d)
    n = M.shape[1]
    sol = solve_lp(np.ones(2 * n), np.hstack([M, -M]), d, **lp_kw)
    if sol.ok:
        sol.point = sol.point[:n] - sol.point[n:]
        sol.objective = float(np.abs(sol.point).sum())
    return sol


def min_l1_offsupport_affine(M, d, T, **lp_kw):
    """min ||x_{T^c}||_1 s.t. Mx = d; entries indexed by ``T`` are free and unpenalized."""
    M, d = _as_system(M, d)
    n = M.shape[1]
    T = np.unique(np.asarray(list(T), dtype=int))
    if T.size and (T[0] < 0 or T[-1] >= n):
        raise InputError(f"support indices out of range for {n} columns")
    Tc = np.setdiff1d(np.arange(n), T)
    # variables: [x_T (free), u (>=0), v (>=0)] with x_{T^c} = u - v
    E = np.hstack([M[:, T], M[:, Tc], -M[:, Tc]])
    c = np.concatenate([np.zeros(T.size), np.ones(2 * Tc.size)])
    mask = np.concatenate([np.zeros(T.size, bool), np.ones(2 * Tc.size, bool)])
    sol = solve_lp(c, E, d, nonneg_mask=mask, **lp_kw)
    if sol.ok:
        x = np.zeros(n)
        x[T] = sol.point[:T.size]
        x[Tc] = sol.point[T.size:T.size + Tc.size] - sol.point[T.size + Tc.size:]
        sol.point = x
        sol.objective = float(np.abs(x[Tc]).sum())
    return sol


def project_l1_ball(v, tau):
    """Euclidean projection of ``v`` onto {w : ||w||_1 <= tau}."""
    v = np.asarray(v, dtype=float)
    if tau < 0:
        raise InputError(f"tau must be nonnegative, got {tau}")
    a = np.abs(v)
    if a.sum() <= tau:
        return v.copy()
    if tau == 0:
        return np.zeros_like(v)
    u = np.sort(a)[::-1]
    css = np.cumsum(u)
    j = np.arange(1, u.size + 1)
    active = np.flatnonzero(u - (css - tau) / j > 0)
    # the largest entry is always active; round-off can hide it when tau is tiny
    rho = active[-1] if active.size else 0
    theta = (css[rho] - tau) / (rho + 1.0)
    return np.sign(v) * np.maximum(a - theta, 0.0)


@dataclass
class L1BallResult:
    x: np.ndarray
    objective: float
    residual: float
    status: str = "optimal"
    floor: float = 0.0
    pareto_trace: list = field(default_factory=list)
    iterations: int = 0


def _ls_floor(M, d):
    x_ls = np.linalg.lstsq(M, d, rcond=None)[0]
    return x_ls, float(np.linalg.norm(M @ x_ls - d))


def _pareto_point(M, d, tau, x0, L, eps, max_iter, gap_rtol=1e-11):
    """Accelerated projected gradient for phi(tau), stopped once ``tau`` is classified.

    Returns (x, residual_norm, lower_bound_on_residual).
    """
    x = project_l1_ball(x0, tau)
    y = x.copy()
    tk = 1.0
    r = d - M @ x
    f = 0.5 * r @ r
    lower = 0.0
    for _ in range(max_iter):
        g = -M.T @ (d - M @ y)
        x_new = project_l1_ball(y - g / L, tau)
        r_new = d - M @ x_new
        f_new = 0.5 * r_new @ r_new
        if f_new > f and tk > 1.0:  # adaptive restart keeps the iteration monotone
            tk = 1.0
            y = x.copy()
            continue
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * tk * tk))
        y = x_new + ((tk - 1.0) / t_next) * (x_new - x)
        x, r, f, tk = x_new, r_new, f_new, t_next
        res = np.sqrt(2.0 * f)
        if res <= eps:
            return x, res, lower
        # dual bound: phi(tau)^2/2 >= max_a a*d.r - a^2 |r|^2/2 - a*tau*|M^T r|_inf
        rr = r @ r
        if rr > 0:
            lin = d @ r - tau * np.abs(M.T @ r).max()
            if lin > 0:
                lower = max(lower, np.sqrt(lin * lin / rr))
        if lower > eps:
            return x, res, lower
        if res - lower <= gap_rtol * (1.0 + res):
            return x, res, lower
    return x, np.sqrt(2.0 * f), lower


def min_l1_residual_ball(M, d, eps, feas_tol=FEAS_TOL, obj_tol=OBJ_TOL,
                         max_outer=200, max_inner=50_000):
    """min ||x||_1 s.t. ||Mx - d||_2 <= eps by root finding on the Pareto curve.

    Raises :class:`InfeasibleError` (with the least-squares floor) if ``eps`` is
    below the smallest achievable residual. ``eps == 0`` is handed to the LP.
    """
    M, d = _as_system(M, d)
    if eps < 0:
        raise InputError(f"eps must be nonnegative, got {eps}")
    n = M.shape[1]
    dn = float(np.linalg.norm(d))
    if dn <= eps:
        return L1BallResult(np.zeros(n), 0.0, dn)
    if not np.any(M):
        raise InfeasibleError(f"M = 0 and ||d||_2 = {dn:.3g} > eps", floor=dn)
    x_ls, floor = _ls_floor(M, d)
    if eps == 0 or eps <= floor * (1 + 1e-9) + 1e-12:
        if floor > eps + feas_tol * (1.0 + dn):
            raise InfeasibleError(
                f"eps = {eps:.3g} is below the least-squares floor {floor:.3g}", floor=floor)
        sol = min_l1_affine(M, M @ x_ls if eps > 0 else d)
        if not sol.ok:
            raise InfeasibleError("affine system is inconsistent", floor=floor)
        res = float(np.linalg.norm(M @ sol.point - d))
        return L1BallResult(sol.point, sol.objective, res, floor=floor)

    L = float(np.linalg.norm(M, 2)) ** 2
    lo, hi = 0.0, float(np.abs(x_ls).sum())
    x_hi, res_hi = x_ls, floor
    x_lo, res_lo = np.zeros(n), dn
    trace = [(lo, dn, dn), (hi, floor, floor)]
    width_tol = 1e-10 * (1.0 + hi)
    it = 0
    for it in range(1, max_outer + 1):
        if hi - lo <= width_tol or eps - res_hi <= 1e-9:
            break
        r = d - M @ x_lo
        slope = -np.abs(M.T @ r).max() / res_lo
        step = (res_lo - eps) / -slope if slope < 0 else np.inf
        # Newton from the infeasible side never overshoots a convex curve, so once
        # its steps stall, probe just past it to obtain a feasible point
        if step < 1e-7 * (1.0 + lo):
            step = 2.0 * step + 1e-11 * (1.0 + lo)
        tau = lo + step
        if not lo < tau < hi:
            tau = 0.5 * (lo + hi)
        start = x_hi if abs(hi - tau) < abs(tau - lo) else x_lo
        x, res, lower = _pareto_point(M, d, tau, start, L, eps, max_inner)
        trace.append((tau, lower, res))
        if res <= eps:
            hi, x_hi, res_hi = tau, x, res
        elif lower > eps:
            lo, x_lo, res_lo = tau, x, res
        elif res <= eps + feas_tol:
            hi, x_hi, res_hi = tau, x, res
            break
        else:
            # unresolved to round-off: phi(tau) ~= eps; treat tau as the infeasible side
            lo, x_lo, res_lo = tau, x, res
    else:
        raise SolverError("Pareto root finding did not converge",
                          {"lo": lo, "hi": hi, "residual": res_hi})
    if hi - lo > max(obj_tol, width_tol) and eps - res_hi > 1e-9:
        raise SolverError("Pareto bracket wider than obj_tol", {"lo": lo, "hi": hi})
    total = it
    # each sample brackets phi(tau) in [lower, upper]; a nonincreasing curve needs
    # every later lower bound to sit below every earlier upper bound
    taus = sorted(trace)
    run_min_upper = np.inf
    for _, low, up in taus:
        if low > run_min_upper + 1e-9 * (1.0 + run_min_upper):
            raise SolverError("Pareto curve samples are not monotone", {"trace": taus})
        run_min_upper = min(run_min_upper, up)
    return L1BallResult(x_hi, float(np.abs(x_hi).sum()), float(res_hi), floor=floor,
                        pareto_trace=taus, iterations=total)


__all__ = [
    "LpSolution", "L1BallResult", "min_l1_affine", "min_l1_offsupport_affine",
    "project_l1_ball", "min_l1_residual_ball", "solve_lp",
]
