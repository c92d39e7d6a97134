"""l1 phaseless decoders.

Every exact decoder reduces ``|Ax| = b`` (or ``||Ax| - b|| <= eps``) to linear
subproblems by fixing a sign pattern ``s`` and replacing ``|Ax|`` with ``s * (Ax)``.
Patterns are enumerated with ``s[0] = +1`` because ``x`` and ``-x`` are
indistinguishable. Among patterns whose optimal values agree to
``TIE_TOL * (1 + best)``, the lexicographically smallest one wins, with ``+1``
ordered before ``-1``; this makes outputs independent of evaluation order.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space, orth

from . import bounds
from .errors import CapacityError, InfeasibleError, InputError, UnsupportedParameterError
from .measurements import Observation, as_matrix
from .optim.l1 import min_l1_affine, min_l1_offsupport_affine, min_l1_residual_ball
from .signals import as_signal, best_k_term, canonical_sign, lp_norm, sim_distance

MAX_M = 20
SIGMA_K_CAP = 10_000_000
TIE_TOL = 1e-9
SCREEN_TOL = 1e-7
FEAS_TOL = 1e-7
_CHUNK = 1 << 14
RELAX = 2.0


@dataclass(frozen=True)
class SignPattern:
    signs: tuple

    def __post_init__(self):
        s = tuple(int(v) for v in self.signs)
        if not s or any(v not in (-1, 1) for v in s):
            raise InputError("sign pattern entries must be exactly +1 or -1")
        object.__setattr__(self, "signs", s)

    @property
    def canonical(self):
        return self.signs[0] == 1

    def as_array(self):
        return np.array(self.signs, dtype=float)

    def __str__(self):
        return "".join("+" if v > 0 else "-" for v in self.signs)


@dataclass
class DecodeResult:
    x_hat: np.ndarray
    objective: float
    pattern: SignPattern
    feasibility_residual: float
    patterns_explored: int
    exact: bool
    method: str = ""
    converged: bool = True
    info: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "x_hat": [float(v) for v in self.x_hat],
            "objective": float(self.objective),
            "pattern": list(self.pattern.signs) if self.pattern else None,
            "feasibility_residual": float(self.feasibility_residual),
            "patterns_explored": int(self.patterns_explored),
            "exact": bool(self.exact),
            "method": self.method,
            "converged": bool(self.converged),
            "info": {k: v for k, v in self.info.items() if _jsonable(v)},
        }


def _jsonable(v):
    return isinstance(v, (str, int, float, bool, type(None), list, tuple, dict))


def pattern_from_index(i, m):
    """The i-th canonical pattern in lexicographic order (+1 before -1)."""
    bits = [(i >> (m - 2 - j)) & 1 for j in range(m - 1)]
    return np.array([1.0] + [-1.0 if b else 1.0 for b in bits])


def _pattern_block(start, stop, m):
    idx = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(m - 2, -1, -1, dtype=np.int64)
    bits = (idx[:, None] >> shifts[None, :]) & 1
    return np.hstack([np.ones((idx.size, 1)), 1.0 - 2.0 * bits])


def _check_inputs(A, obs, max_m):
    A = as_matrix(A)
    if not isinstance(obs, Observation):
        obs = Observation(np.asarray(obs, dtype=float), 0.0, False)
    b = obs.b
    if b.size != A.shape[0]:
        raise InputError(f"observation has length {b.size} but the matrix has {A.shape[0]} rows")
    if A.shape[0] > max_m:
        raise CapacityError(f"m = {A.shape[0]} exceeds the enumeration cap {max_m} "
                            f"(2^{A.shape[0] - 1} sign patterns); use decode_alternating")
    return A, obs


def _pattern_floors(A, b):
    """Least-squares residual ||P_perp (s*b)|| for every canonical pattern, in index order."""
    m = A.shape[0]
    Z = null_space(A.T)  # orthonormal basis of range(A)^perp
    n_pat = 1 << (m - 1)
    if Z.shape[1] == 0:
        return np.zeros(n_pat)
    W = Z.T * b  # Z^T diag(b)
    out = np.empty(n_pat)
    for start in range(0, n_pat, _CHUNK):
        stop = min(n_pat, start + _CHUNK)
        S = _pattern_block(start, stop, m)
        out[start:stop] = np.linalg.norm(S @ W.T, axis=1)
    return out


def _pick(cands):
    """Deterministic argmin over (objective, pattern index, ...) with a relative tie band."""
    best = min(c[0] for c in cands)
    band = best + TIE_TOL * (1.0 + abs(best))
    return min((c for c in cands if c[0] <= band), key=lambda c: c[1:3])


def _finish(x, A, b, pattern, explored, method, eps=0.0, info=None, objective=None):
    x = canonical_sign(np.where(np.abs(x) < 1e-15, 0.0, x))
    resid = float(np.linalg.norm(np.abs(A @ x) - b))
    obj = lp_norm(x, 1) if objective is None else objective
    return DecodeResult(x, float(obj), SignPattern(pattern), resid, explored, True, method,
                        True, dict(info or {}, eps=float(eps)))


def decode_noiseless_l1(A, obs, max_m=MAX_M, screen=True):
    """Global minimizer of ||x||_1 over {x : |Ax| = b} by sign-pattern enumeration."""
    A, obs = _check_inputs(A, obs, max_m)
    if obs.noise_level > 0:
        raise InputError("decode_noiseless_l1 needs a noiseless observation; use decode_noisy_l1")
    b = obs.b
    if np.any(b < 0):
        raise InfeasibleError("noiseless observation has negative entries", floor=float(-b.min()))
    m, N = A.shape
    if not np.any(b):
        return _finish(np.zeros(N), A, b, np.ones(m), 0, "noiseless")
    n_pat = 1 << (m - 1)
    floors = _pattern_floors(A, b) if screen else np.zeros(n_pat)
    tol = SCREEN_TOL * (1.0 + np.linalg.norm(b))
    survivors = np.flatnonzero(floors <= tol)
    cands = []
    for i in survivors:
        s = pattern_from_index(int(i), m)
        sol = min_l1_affine(A, s * b)
        if sol.ok:
            cands.append((sol.objective, int(i), sol.point))
    if not cands:
        raise InfeasibleError("no sign pattern is consistent with b", floor=float(floors.min()))
    obj, i, x = _pick(cands)
    return _finish(x, A, b, pattern_from_index(i, m), n_pat, "noiseless",
                   info={"feasible_patterns": len(cands), "screened_out": int(n_pat - survivors.size)})


def _dual_lower_bound(A, d, eps):
    """Weak-duality bound on min{||x||_1 : ||Ax - d|| <= eps} using y = P_range(d)."""
    Q = orth(A)
    y = Q @ (Q.T @ d)
    ny = np.linalg.norm(y)
    denom = np.abs(A.T @ y).max() if ny > 0 else 0.0
    if denom <= 0:
        return 0.0
    return max(0.0, (ny * ny - eps * ny) / denom)


def decode_noisy_l1(A, obs, eps, max_m=MAX_M):
    """Global minimizer of ||x||_1 over {x : || |Ax| - b+ ||_2 <= eps}, with b+ = max(b, 0)."""
    A, obs = _check_inputs(A, obs, max_m)
    if eps < 0:
        raise InputError(f"eps must be nonnegative, got {eps}")
    m, N = A.shape
    bp = np.maximum(obs.b, 0.0)
    info = {"clamp_shift": float(np.linalg.norm(bp - obs.b))}
    if eps == 0:
        res = decode_noiseless_l1(A, Observation(bp, 0.0, True), max_m)
        res.method = "noisy"
        res.info.update(info)
        return res
    if np.linalg.norm(bp) <= eps:
        return _finish(np.zeros(N), A, bp, np.ones(m), 0, "noisy", eps, info)
    n_pat = 1 << (m - 1)
    floors = _pattern_floors(A, bp)
    order = np.flatnonzero(floors <= eps)
    if order.size == 0:
        raise InfeasibleError(
            f"eps = {eps:.3g} is below the smallest per-pattern residual {floors.min():.3g}",
            floor=float(floors.min()))
    # visit low-floor patterns first so the incumbent tightens quickly; the final
    # choice depends only on (objective, index), never on visiting order
    order = order[np.argsort(floors[order], kind="stable")]
    cands, pruned, best = [], 0, math.inf
    for i in order:
        s = pattern_from_index(int(i), m)
        M = A * s[:, None]
        if _dual_lower_bound(M, bp, eps) > best + TIE_TOL * (1.0 + best) + 1e-6:
            pruned += 1
            continue
        try:
            r = min_l1_residual_ball(M, bp, eps)
        except InfeasibleError:
            continue
        cands.append((r.objective, int(i), r.x))
        best = min(best, r.objective)
    if not cands:
        raise InfeasibleError("no sign pattern admits a feasible point", floor=float(floors.min()))
    obj, i, x = _pick(cands)
    info.update(feasible_patterns=int(order.size), pruned=pruned)
    return _finish(x, A, bp, pattern_from_index(i, m), n_pat, "noisy", eps, info)


def decode_sigma_k(A, obs, k, q=1.0, max_m=MAX_M, cap=SIGMA_K_CAP):
    """Minimize sigma_k(x)_1 over {x : |Ax| = b} by joint (pattern, support) enumeration."""
    if q != 1:
        raise UnsupportedParameterError(
            f"exact sigma_k decoding is an LP only for q = 1, got q = {q}")
    A, obs = _check_inputs(A, obs, max_m)
    if obs.noise_level > 0:
        raise InputError("decode_sigma_k needs a noiseless observation")
    m, N = A.shape
    if int(k) != k or not 0 <= k <= N:
        raise InputError(f"k must be an integer in [0, {N}], got {k}")
    k = int(k)
    n_pat = 1 << (m - 1)
    n_sup = math.comb(N, k)
    if n_pat * n_sup > cap:
        raise CapacityError(f"C({N},{k}) * 2^{m - 1} = {n_pat * n_sup} subproblems exceeds {cap}")
    b = obs.b
    if not np.any(b):
        return _finish(np.zeros(N), A, b, np.ones(m), 0, "sigma-k", objective=0.0)
    from itertools import combinations
    supports = list(combinations(range(N), k))
    floors = _pattern_floors(A, b)
    survivors = np.flatnonzero(floors <= SCREEN_TOL * (1.0 + np.linalg.norm(b)))
    cands = []
    for i in survivors:
        s = pattern_from_index(int(i), m)
        for j, T in enumerate(supports):
            sol = min_l1_offsupport_affine(A, s * b, T)
            if sol.ok:
                cands.append((sol.objective, int(i), j, sol.point))
    if not cands:
        raise InfeasibleError("no sign pattern is consistent with b", floor=float(floors.min()))
    obj, i, j, x = _pick(cands)
    res = _finish(x, A, b, pattern_from_index(i, m), n_pat * n_sup, "sigma-k",
                  objective=best_k_term(canonical_sign(x), k, 1).value,
                  info={"support": list(supports[j])})
    return res


def decode_alternating(A, obs, eps=0.0, max_iters=50, restarts=10, seed=0, x_init=None):
    """Alternate s <- sign(Ax) and an l1 solve with the pattern fixed.

    Once an iterate is feasible, the next sign update keeps it feasible and the
    objective can only decrease. Infeasible patterns fall back to the
    least-squares solution of ``diag(s) A x = b+``. Restart ``0`` starts from
    ``x_init`` when given.
    """
    A = as_matrix(A)
    if not isinstance(obs, Observation):
        obs = Observation(np.asarray(obs, dtype=float), 0.0, False)
    if max_iters < 1 or restarts < 1:
        raise InputError("max_iters and restarts must be at least 1")
    if eps < 0:
        raise InputError(f"eps must be nonnegative, got {eps}")
    m, N = A.shape
    bp = np.maximum(obs.b, 0.0)
    if bp.size != m:
        raise InputError(f"observation has length {bp.size} but the matrix has {m} rows")
    if np.linalg.norm(bp) <= eps:
        res = _finish(np.zeros(N), A, bp, np.ones(m), 0, "alternating", eps)
        res.exact = False
        return res
    rng = np.random.default_rng(seed)
    tol = FEAS_TOL * (1.0 + np.linalg.norm(bp))
    best = None
    restart_objs, solves = [], 0
    for r in range(restarts):
        x = as_signal(x_init, N).copy() if (r == 0 and x_init is not None) else rng.standard_normal(N)
        history, prev_s, converged, seen = [], None, False, set()
        feasible_x = None
        for _ in range(max_iters):
            s = np.where(A @ x >= 0, 1.0, -1.0)
            key = s.tobytes()
            if key in seen:
                # the step is a deterministic function of s, so a repeat means a cycle
                converged = prev_s is not None and np.array_equal(s, prev_s)
                break
            seen.add(key)
            prev_s = s
            M = A * s[:, None]
            solves += 1
            try:
                if eps == 0:
                    sol = min_l1_affine(M, bp)
                    if not sol.ok:
                        raise InfeasibleError("pattern inconsistent")
                    x_new = sol.point
                else:
                    x_new = min_l1_residual_ball(M, bp, eps).x
            except InfeasibleError as exc:
                # relax the ball just past the pattern's floor so the step still favors sparsity
                x_new = min_l1_residual_ball(M, bp, RELAX * _floor_of(M, bp, exc)).x
            if np.linalg.norm(np.abs(A @ x_new) - bp) <= eps + tol:
                if feasible_x is not None and lp_norm(x_new, 1) > history[-1]:
                    x_new = feasible_x  # solver round-off; keep the monotone incumbent
                feasible_x = x_new
                history.append(lp_norm(x_new, 1))
            x = x_new
        if feasible_x is None:
            restart_objs.append(None)
            continue
        obj = history[-1]
        restart_objs.append(obj)
        if best is None or obj < best[0] - TIE_TOL * (1.0 + obj):
            best = (obj, feasible_x, converged, history)
    if best is None:
        x = np.linalg.lstsq(A, bp, rcond=None)[0]
        res = _finish(x, A, bp, np.where(A @ x >= 0, 1.0, -1.0), solves, "alternating", eps,
                      {"restart_objectives": restart_objs, "feasible": False})
        res.exact, res.converged = False, False
        return res
    obj, x, converged, history = best
    s = np.where(A @ x >= 0, 1.0, -1.0)
    s = s * s[0]
    res = _finish(x, A, bp, s, solves, "alternating", eps,
                  {"restart_objectives": restart_objs, "history": history, "feasible": True})
    res.exact, res.converged = False, converged
    return res


def _floor_of(M, d, exc):
    if exc.floor is not None:
        return exc.floor
    x = np.linalg.lstsq(M, d, rcond=None)[0]
    return float(np.linalg.norm(M @ x - d))


@dataclass
class ErrorReport:
    dist_l1: float
    dist_l2: float
    sigma_k: float
    rhs: float
    bound_satisfied: bool
    constants: bounds.StabilityConstants

    def to_json(self):
        return {"dist_l1": self.dist_l1, "dist_l2": self.dist_l2, "sigma_k": self.sigma_k,
                "rhs": self.rhs, "bound_satisfied": self.bound_satisfied,
                "c1": self.constants.c1, "c2": self.constants.c2}


def error_report(x_hat, x0, k, eps, delta, t, rho=0.0, slack=1e-8):
    """Compare min ||x_hat -+ x0||_2 with c1*eps + c2*(2*sigma_k(x0)_1 + rho)/sqrt(k)."""
    x_hat = as_signal(x_hat)
    x0 = as_signal(x0, x_hat.size)
    consts = bounds.stability_constants(delta, t, rho)
    sig = best_k_term(x0, int(k), 1).value
    rhs = consts.rhs(eps, sig, k)
    d2 = sim_distance(x_hat, x0, 2)
    return ErrorReport(sim_distance(x_hat, x0, 1), d2, sig, rhs, bool(d2 <= rhs + slack), consts)
