"""Exact and randomized certification of RIP, S-RIP, NSP and S-NSP.

Exact routines enumerate supports, half-row subsets and sign orthants, so they
are only meant for desk-scale matrices; every enumeration checks a size cap and
raises :class:`CapacityError` instead of running for hours.

Row-subset quantifiers ``|I| >= m/2`` are reduced to ``|I| = ceil(m/2)``: adding
rows grows ``A_I^T A_I`` in the PSD order and shrinks ``N(A_I)``, so lower
restricted eigenvalues and null-space constants are extremal at the smallest
admissible ``I``, while upper eigenvalues are extremal at ``I = [m]``. The
``*_naive`` variants enumerate every admissible ``I`` and serve as oracles.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.linalg import null_space

from . import bounds
from .errors import CapacityError, InputError
from .measurements import as_matrix
from .optim.simplex import solve_standard
from .signals import best_k_term, lp_norm

SUPPORT_CAP = 200_000
SRIP_CAP = 20_000_000
NSP_MAX_N = 12
NAIVE_MAX_M = 12
SPARSE_PROBE_CAP = 1000


def half(m):
    """Smallest admissible row-subset size, ceil(m/2)."""
    return (m + 1) // 2


def _check_order(k, N):
    if int(k) != k or k < 1 or k > N:
        raise InputError(f"order k must be an integer in [1, {N}], got {k}")
    return int(k)


def _supports(N, k, cap):
    count = math.comb(N, k)
    if count > cap:
        raise CapacityError(f"C({N},{k}) = {count} supports exceeds the cap {cap}; "
                            "use a randomized estimate instead")
    return np.array(list(combinations(range(N), k)), dtype=int)


def _restricted_eigs(G, S):
    """Eigenvalues of the principal sub-blocks G[..., S_i, S_i] for every support row of S.

    ``G`` has shape (..., N, N); the result has shape (..., len(S), k).
    """
    blocks = G[..., S[:, :, None], S[:, None, :]]
    return np.linalg.eigvalsh(blocks)


@dataclass
class RipReport:
    k: int
    lower: float
    upper: float
    delta: float
    witness_support: tuple
    valid: bool


def rip_constant(A, k, cap=SUPPORT_CAP):
    """Exact delta_k = max(1 - L_k, U_k - 1) over all supports of size k."""
    A = as_matrix(A)
    k = _check_order(k, A.shape[1])
    S = _supports(A.shape[1], k, cap)
    ev = _restricted_eigs(A.T @ A, S)
    lo_i, hi_i = int(np.argmin(ev[:, 0])), int(np.argmax(ev[:, -1]))
    lower, upper = float(ev[lo_i, 0]), float(ev[hi_i, -1])
    if 1.0 - lower >= upper - 1.0:
        delta, w = 1.0 - lower, lo_i
    else:
        delta, w = upper - 1.0, hi_i
    return RipReport(k, lower, upper, float(delta), tuple(S[w].tolist()), bool(delta < 1.0))


@dataclass
class SripReport:
    k: int
    theta_minus: float
    theta_plus: float
    witness: tuple  # (support, row subset) attaining theta_minus
    valid: bool
    witness_vector: np.ndarray = None
    row_subset_size: int = 0
    note: str = ""


def _row_subsets(m, sizes, cap):
    count = sum(math.comb(m, s) for s in sizes)
    if count > cap:
        raise CapacityError(f"{count} row subsets exceeds the cap {cap}")
    return [np.array(I, dtype=int) for s in sizes for I in combinations(range(m), s)]


def _srip_scan(A, k, subsets, cap, chunk=2048):
    m, N = A.shape
    S = _supports(N, k, cap)
    if len(subsets) * len(S) > cap * 100:
        raise CapacityError(f"{len(subsets)} row subsets x {len(S)} supports exceeds the cap")
    best = (np.inf, None, None, None)
    # outer products of rows let Gram matrices of any subset be sums of a few slices
    R = A[:, :, None] * A[:, None, :]
    for start in range(0, len(subsets), chunk):
        block = subsets[start:start + chunk]
        sizes = {len(I) for I in block}
        if len(sizes) == 1:
            idx = np.stack(block)
            G = R[idx].sum(axis=1)
        else:
            G = np.stack([R[I].sum(axis=0) for I in block])
        blocks = G[:, S[:, :, None], S[:, None, :]]
        w, v = np.linalg.eigh(blocks)
        lam = w[..., 0]
        i, j = np.unravel_index(np.argmin(lam), lam.shape)
        if lam[i, j] < best[0]:
            x = np.zeros(N)
            x[S[j]] = v[i, j][:, 0]
            best = (float(lam[i, j]), tuple(S[j].tolist()), tuple(block[i].tolist()), x)
    ev_full = _restricted_eigs(A.T @ A, S)
    theta_plus = float(ev_full[:, -1].max())
    return best, theta_plus


def srip_bounds(A, k, cap=SRIP_CAP):
    """theta_-, theta_+ of order k, enumerating only row subsets of size ceil(m/2)."""
    A = as_matrix(A)
    m, N = A.shape
    k = _check_order(k, N)
    if math.comb(N, k) * math.comb(m, half(m)) > cap:
        raise CapacityError(f"C({N},{k}) * C({m},{half(m)}) exceeds the cap {cap}")
    subsets = _row_subsets(m, [half(m)], cap)
    (tm, supp, I, x), tp = _srip_scan(A, k, subsets, cap)
    return SripReport(k, tm, tp, (supp, I), bool(0.0 < tm and tp < 2.0), x, half(m),
                      "row subsets reduced to |I| = ceil(m/2) by PSD monotonicity")


def srip_bounds_naive(A, k, max_m=NAIVE_MAX_M, cap=SRIP_CAP):
    """Oracle for :func:`srip_bounds`: every I with |I| >= m/2, upper bound from all I as well."""
    A = as_matrix(A)
    m, N = A.shape
    k = _check_order(k, N)
    if m > max_m:
        raise CapacityError(f"m = {m} exceeds the naive enumeration cap {max_m}")
    subsets = _row_subsets(m, range(half(m), m + 1), cap)
    S = _supports(N, k, cap)
    tm, tp = np.inf, -np.inf
    wit = (None, None)
    x_w = None
    for I in subsets:
        A_I = A[I]
        w, v = np.linalg.eigh(_gram_blocks(A_I, S))
        j = int(np.argmin(w[:, 0]))
        if w[j, 0] < tm:
            tm = float(w[j, 0])
            wit = (tuple(S[j].tolist()), tuple(I.tolist()))
            x_w = np.zeros(N)
            x_w[S[j]] = v[j][:, 0]
        tp = max(tp, float(w[:, -1].max()))
    return SripReport(k, tm, tp, wit, bool(0.0 < tm and tp < 2.0), x_w, 0, "all |I| >= m/2")


def _gram_blocks(A_I, S):
    cols = A_I[:, S]  # (rows, nS, k)
    return np.einsum("rsi,rsj->sij", cols, cols)


def lemma31_check(A, k, theta_minus, trials=1000, seed=0, slack=1e-10):
    """Sample pairs x, y in Sigma_k and test ||Ax|-|Ay||^2 >= theta_- min(||x-y||^2, ||x+y||^2).

    Returns a dict with the violation count and the worst (smallest) margin
    ``lhs - rhs`` encountered.
    """
    A = as_matrix(A)
    m, N = A.shape
    k = _check_order(k, N)
    rng = np.random.default_rng(seed)
    violations = 0
    worst = np.inf
    worst_pair = None
    for trial in range(trials):
        x = np.zeros(N)
        y = np.zeros(N)
        x[rng.choice(N, k, replace=False)] = rng.standard_normal(k)
        mode = trial % 4
        if mode == 0:
            y[rng.choice(N, k, replace=False)] = rng.standard_normal(k)
        elif mode == 1:  # same support, nearby values
            y[x != 0] = x[x != 0] + 0.1 * rng.standard_normal(k)
        elif mode == 2:  # near the flipped copy
            y[x != 0] = -x[x != 0] + 0.1 * rng.standard_normal(k)
        else:  # shared support for part of the entries
            y[rng.choice(N, k, replace=False)] = rng.standard_normal(k)
            y[np.flatnonzero(x)[:1]] += x[np.flatnonzero(x)[:1]]
        lhs = float(np.sum((np.abs(A @ x) - np.abs(A @ y)) ** 2))
        rhs = theta_minus * min(float(np.sum((x - y) ** 2)), float(np.sum((x + y) ** 2)))
        margin = lhs - rhs
        if margin < worst:
            worst, worst_pair = margin, (x, y)
        if margin < -slack:
            violations += 1
    return {"violations": violations, "worst_margin": worst, "trials": trials,
            "witness": worst_pair}


@dataclass
class NspReport:
    order: int
    constant: float
    witness: np.ndarray
    exact: bool
    vacuous: bool = False
    witness_rows: tuple = None
    info: dict = field(default_factory=dict)


def _sparse_null_vector(A, T):
    """A nonzero vector of N(A) supported inside T, or None."""
    Z = null_space(A[:, list(T)])
    if Z.shape[1] == 0:
        return None
    eta = np.zeros(A.shape[1])
    eta[list(T)] = Z[:, 0]
    return eta


def nsp_constant(A, order, max_N=NSP_MAX_N):
    """Smallest C with ||eta||_1 <= C sigma_order(eta)_1 for every eta in N(A).

    For each support T and orthant sign vector sigma, maximize ||eta||_1 over
    {A eta = 0, sigma_i eta_i >= 0, ||eta_{T^c}||_1 <= 1}; an unbounded LP means
    N(A) holds an order-sparse vector and the constant is +inf.
    """
    A = as_matrix(A)
    m, N = A.shape
    order = _check_order(order, N)
    if N > max_N:
        raise CapacityError(f"N = {N} exceeds the exact NSP cap {max_N}; use a randomized estimate")
    Z = null_space(A)
    if Z.shape[1] == 0:
        return NspReport(order, 0.0, np.zeros(N), True, vacuous=True)
    supports = list(combinations(range(N), order))
    # any order-sparse null vector makes sigma_order vanish with ||eta|| > 0
    for T in supports:
        eta = _sparse_null_vector(A, T)
        if eta is not None:
            return NspReport(order, math.inf, eta, True, info={"support": T})
    best, best_eta, best_T = -np.inf, None, None
    n_lp = 0
    # orthant sign vectors with sigma_0 = +1; eta and -eta give the same ratio
    for bits in range(2 ** (N - 1)):
        sigma = np.array([1.0] + [(-1.0 if (bits >> (N - 2 - i)) & 1 else 1.0) for i in range(N - 1)])
        AS = A * sigma
        for T in supports:
            offT = np.ones(N)
            offT[list(T)] = 0.0
            # variables u >= 0 (eta = sigma*u) and slack s >= 0
            E = np.vstack([np.hstack([AS, np.zeros((m, 1))]), np.append(offT, 1.0)])
            f = np.append(np.zeros(m), 1.0)
            c = np.append(-np.ones(N), 0.0)
            sol = solve_standard(E, f, c)
            n_lp += 1
            if sol.status == "unbounded":  # excluded above, but guard against round-off
                return NspReport(order, math.inf, None, True, info={"support": T, "lps": n_lp})
            if sol.ok and -sol.objective > best + 1e-12:
                best = -sol.objective
                best_eta = sigma * sol.point[:N]
                best_T = T
    return NspReport(order, float(best), best_eta, True, info={"support": best_T, "lps": n_lp})


def witness_ratio(eta, order):
    """||eta||_1 / sigma_order(eta)_1 recomputed from scratch."""
    s = best_k_term(eta, order, 1).value
    n1 = lp_norm(eta, 1)
    if s == 0:
        return math.inf if n1 > 0 else 0.0
    return n1 / s


def snsp_constant(A, order, max_N=NSP_MAX_N, cap=5000):
    """S-NSP constant: worst nsp_constant(A_I, order) over |I| = ceil(m/2)."""
    A = as_matrix(A)
    m, N = A.shape
    subsets = _row_subsets(m, [half(m)], cap)
    return _snsp_over(A, order, subsets, max_N)


def snsp_constant_naive(A, order, max_N=NSP_MAX_N, max_m=NAIVE_MAX_M, cap=5000):
    """Oracle for :func:`snsp_constant` enumerating every |I| >= m/2."""
    A = as_matrix(A)
    m, N = A.shape
    if m > max_m:
        raise CapacityError(f"m = {m} exceeds the naive enumeration cap {max_m}")
    subsets = _row_subsets(m, range(half(m), m + 1), cap)
    return _snsp_over(A, order, subsets, max_N)


def _snsp_over(A, order, subsets, max_N):
    worst = None
    for I in subsets:
        rep = nsp_constant(A[I], order, max_N)
        if worst is None or rep.constant > worst.constant:
            worst = rep
            worst.witness_rows = tuple(I.tolist())
        if math.isinf(rep.constant):
            break
    worst.vacuous = worst.constant == 0.0 and worst.vacuous
    return worst


def _io_ratio(eta1, eta2, k):
    num = 4.0 * min(lp_norm(eta1, 1), lp_norm(eta2, 1))
    den = best_k_term(eta1 - eta2, k, 1).value + best_k_term(eta1 + eta2, k, 1).value
    if den <= 1e-14 * (1.0 + num):
        return math.inf if num > 1e-12 else 0.0
    return num / den


def _refine(ratio_fn, w, rng, steps=200):
    """Coordinate ascent with shrinking steps on an objective of the coefficient vector."""
    best = ratio_fn(w)
    h = 0.5
    for _ in range(steps):
        improved = False
        for i in range(w.size):
            for sgn in (1.0, -1.0):
                cand = w.copy()
                cand[i] += sgn * h
                val = ratio_fn(cand)
                if val > best:
                    best, w, improved = val, cand, True
        if not improved:
            h *= 0.5
            if h < 1e-6:
                break
    return best, w


def phaseless_io_condition_estimate(A, k, budget=200, seed=0, refine_steps=50):
    """Randomized lower bound on the smallest C0 in the two-null-space condition.

    Samples I and pairs eta1 in N(A_I), eta2 in N(A_{I^c}) and maximizes
    ``4 min(||eta1||_1, ||eta2||_1) / (sigma_k(eta1 - eta2)_1 + sigma_k(eta1 + eta2)_1)``
    by coordinate ascent in the null-space coefficients. This is an estimate, never
    a certificate.
    """
    A = as_matrix(A)
    m, N = A.shape
    k = _check_order(k, N)
    if budget < 1:
        raise InputError("budget must be at least 1")
    rng = np.random.default_rng(seed)
    best, wit, sampled = 0.0, None, 0
    for _ in range(budget):
        mask = rng.random(m) < 0.5
        I, Ic = np.flatnonzero(mask), np.flatnonzero(~mask)
        Z1 = null_space(A[I]) if I.size else np.eye(N)
        Z2 = null_space(A[Ic]) if Ic.size else np.eye(N)
        if Z1.shape[1] == 0 or Z2.shape[1] == 0:
            continue
        sampled += 1
        d1 = Z1.shape[1]

        def ratio(w):
            return _io_ratio(Z1 @ w[:d1], Z2 @ w[d1:], k)

        w0 = rng.standard_normal(d1 + Z2.shape[1])
        val, w = _refine(ratio, w0, rng, refine_steps)
        if val > best:
            best, wit = val, (Z1 @ w[:d1], Z2 @ w[d1:], tuple(I.tolist()))
    return {"estimate": best, "witness": wit, "vacuous": sampled == 0, "sampled": sampled,
            "exact": False}


def mixed_nsp_check(A, k, p, q, C, budget=200, seed=0, refine_steps=50):
    """Randomized falsification of ||eta||_p <= C k^-s sigma_k(eta)_q on half-row null spaces."""
    A = as_matrix(A)
    m, N = A.shape
    k = _check_order(k, N)
    if not 1.0 <= q <= p <= 2.0:
        raise InputError(f"need 1 <= q <= p <= 2, got p={p}, q={q}")
    s = bounds.mixed_exponent(p, q)
    rng = np.random.default_rng(seed)

    def ratio_of(eta):
        num = lp_norm(eta, p)
        den = k ** (-s) * best_k_term(eta, k, q).value
        if den <= 1e-14 * (1.0 + num):
            return math.inf if num > 1e-12 else 0.0
        return num / den

    worst, wit, violations, sampled = 0.0, None, 0, 0
    h = half(m)
    for _ in range(budget):
        I = np.sort(rng.choice(m, h, replace=False))
        Z = null_space(A[I])
        if Z.shape[1] == 0:
            continue
        sampled += 1
        # random search never lands exactly on a k-sparse null vector, so probe those directly
        sparse = None
        if math.comb(N, k) <= SPARSE_PROBE_CAP:
            sparse = next((e for T in combinations(range(N), k)
                           if (e := _sparse_null_vector(A[I], T)) is not None), None)
        if sparse is not None:
            val, w = math.inf, None
            eta = sparse
        else:
            val, w = _refine(lambda w: ratio_of(Z @ w), rng.standard_normal(Z.shape[1]), rng,
                             refine_steps)
            eta = Z @ w
        if val > C:
            violations += 1
        if val > worst:
            worst, wit = val, (eta, tuple(I.tolist()))
    return {"violations": violations, "worst_ratio": worst, "witness": wit, "sampled": sampled,
            "vacuous": sampled == 0, "exponent": s}


# ---------------------------------------------------------------- theorem gates

@dataclass
class OrderCertificate:
    """S-RIP bounds at one sparsity order and the admissible range of t."""

    order: int
    theta_minus: float
    theta_plus: float
    delta: float
    t_min: float
    t_max: float  # inf when the order covers every vector (order == N)


def _srip_orders(A, k, orders, cap):
    out = []
    for r in orders:
        rep = srip_bounds(A, r, cap)
        out.append(rep)
    return out


def stability_certificate(A, k, cap=SRIP_CAP):
    """Admissible (order, t) pairs for the S-RIP stability theorem at sparsity k.

    The theorem needs S-RIP of order ceil(t k) with t at or above the threshold
    max(1/(2th- - th-^2), 1/(2th+ - th+^2)). Orders at or above N cover all of R^N,
    so there any t works. Returns a (possibly empty) list of certificates whose
    t-range is strictly above the threshold, where c1 and c2 are finite.
    """
    A = as_matrix(A)
    N = A.shape[1]
    certs = []
    for rep in _srip_orders(A, k, range(k + 1, N + 1), cap):
        if not rep.valid:
            continue
        thr = bounds.srip_stability_threshold(rep.theta_minus, rep.theta_plus)
        t_max = math.inf if rep.k >= N else rep.k / k
        if thr < t_max:
            certs.append(OrderCertificate(rep.k, rep.theta_minus, rep.theta_plus,
                                          bounds.rip_from_srip(rep.theta_minus, rep.theta_plus),
                                          thr, t_max))
    return certs


def io_certificate(A, k, cap=SRIP_CAP):
    """Admissible (order, t) pairs for l1 phaseless instance optimality at sparsity k."""
    A = as_matrix(A)
    N = A.shape[1]
    certs = []
    for rep in _srip_orders(A, k, range(k + 1, N + 1), cap):
        if not rep.valid:
            continue
        thr = bounds.io_threshold(rep.theta_minus, rep.theta_plus)
        t_max = math.inf if rep.k >= N else rep.k / k
        if thr <= t_max:
            certs.append(OrderCertificate(rep.k, rep.theta_minus, rep.theta_plus,
                                          bounds.rip_from_srip(rep.theta_minus, rep.theta_plus),
                                          thr, t_max))
    return certs
