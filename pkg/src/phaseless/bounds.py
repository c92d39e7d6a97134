"""Closed-form constants and thresholds for the recovery guarantees.

Every evaluator checks its domain and raises :class:`DomainError` naming the
violated condition. Where a constant sits exactly on the edge of its domain
(the instance-optimality constant ``2*C0/(2 - C0)`` at ``C0 = 2``) the value is
the :data:`BOUNDARY_DEGENERATE` marker rather than ``inf``, so reports can tell
a vacuous bound apart from a merely large one.
"""

import math
from dataclasses import dataclass

from .errors import DomainError, InputError


class _BoundaryDegenerate:
    """Marker for a constant evaluated where its guarantee becomes vacuous."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOUNDARY_DEGENERATE"

    def __str__(self):
        return "boundary-degenerate"

    def __reduce__(self):
        return (_BoundaryDegenerate, ())


BOUNDARY_DEGENERATE = _BoundaryDegenerate()


def _check_theta(theta_minus, theta_plus):
    for name, v in (("theta_minus", theta_minus), ("theta_plus", theta_plus)):
        if not 0.0 < v < 2.0:
            raise DomainError(f"{name} = {v} must lie in (0, 2)")


def order_for(t, k):
    """Sparsity order ceil(t*k) and the rounded-up ratio t* = ceil(t*k)/k."""
    order = math.ceil(t * k - 1e-12)
    return order, order / k


@dataclass(frozen=True)
class StabilityConstants:
    c1: float
    c2: float
    delta: float
    t: float
    rho: float = 0.0

    def rhs(self, eps, sigma, k):
        """c1*eps + c2*(2*sigma + rho)/sqrt(k)."""
        return self.c1 * eps + self.c2 * (2.0 * sigma + self.rho) / math.sqrt(k)


def stability_constants(delta, t, rho=0.0):
    """c1, c2 of the RIP stability lemma for l1 minimization with l1 slack ``rho``."""
    if not t > 1:
        raise DomainError(f"t = {t} must exceed 1")
    if delta < 0:
        raise DomainError(f"delta = {delta} must be nonnegative")
    if rho < 0:
        raise DomainError(f"rho = {rho} must be nonnegative")
    limit = math.sqrt((t - 1.0) / t)
    if not delta < limit:
        raise DomainError(
            f"delta = {delta} >= sqrt((t-1)/t) = {limit}: denominators "
            "1 - sqrt(t/(t-1))*delta and sqrt(t(t-1)) - delta*t vanish or turn negative")
    c1 = math.sqrt(2.0 * (1.0 + delta)) / (1.0 - math.sqrt(t / (t - 1.0)) * delta)
    den = math.sqrt(t * (t - 1.0)) - delta * t
    c2 = (math.sqrt(2.0) * delta + math.sqrt(den * delta)) / den + 1.0
    return StabilityConstants(c1, c2, float(delta), float(t), float(rho))


def srip_stability_threshold(theta_minus, theta_plus):
    """Smallest admissible t: max(1/(2*th- - th-^2), 1/(2*th+ - th+^2))."""
    _check_theta(theta_minus, theta_plus)
    return max(1.0 / (2.0 * theta_minus - theta_minus ** 2),
               1.0 / (2.0 * theta_plus - theta_plus ** 2))


def rip_from_srip(theta_minus, theta_plus):
    """RIP constant implied on every half-row submatrix: max(1 - th-, th+ - 1)."""
    _check_theta(theta_minus, theta_plus)
    return max(1.0 - theta_minus, theta_plus - 1.0)


def nsp_const_from_rip(a, b, delta):
    """C0 = 1 + sqrt(a(1+delta) / (b(1-delta))), the NSP constant of order a*k from RIP of order (a+b)k."""
    if not (a > 0 and b > 0):
        raise DomainError(f"a = {a} and b = {b} must be positive")
    if not 0.0 <= delta < 1.0:
        raise DomainError(f"delta = {delta} must lie in [0, 1)")
    return 1.0 + math.sqrt(a * (1.0 + delta) / (b * (1.0 - delta)))


@dataclass(frozen=True)
class IoConstants:
    C0: float
    C: object  # float, or BOUNDARY_DEGENERATE when C0 == 2
    t: float
    theta_minus: float
    theta_plus: float
    delta: float
    threshold: float

    @property
    def degenerate(self):
        return self.C is BOUNDARY_DEGENERATE


def io_threshold(theta_minus, theta_plus):
    _check_theta(theta_minus, theta_plus)
    return max(2.0 / theta_minus, 2.0 / (2.0 - theta_plus))


def l1_io_constants(theta_minus, theta_plus, t):
    """Constants of l1 phaseless instance optimality: C0 and C = 2*C0/(2 - C0)."""
    thr = io_threshold(theta_minus, theta_plus)
    if t < thr * (1.0 - 1e-12):
        raise DomainError(f"t = {t} is below the required threshold max(2/th-, 2/(2-th+)) = {thr}")
    delta = max(1.0 - theta_minus, theta_plus - 1.0)
    C0 = 1.0 + math.sqrt((1.0 + delta) / ((t - 1.0) * (1.0 - delta)))
    if C0 >= 2.0 - 1e-12:
        C = BOUNDARY_DEGENERATE
    else:
        C = 2.0 * C0 / (2.0 - C0)
    return IoConstants(C0, C, float(t), float(theta_minus), float(theta_plus), delta, thr)


def mixed_ktilde(k, N, q):
    """k~ = k (N/k)^(2 - 2/q)."""
    if not (1 <= k <= N):
        raise InputError(f"need 1 <= k <= N, got k={k}, N={N}")
    if not 1.0 <= q <= 2.0:
        raise InputError(f"q = {q} must lie in [1, 2]")
    if q == 1:
        return float(k)
    if q == 2:
        return float(N)
    return k * (N / k) ** (2.0 - 2.0 / q)


def mixed_nsp_constant(delta, p, q):
    """C0 = 2^(1/p + 1/2) sqrt((1+delta)/(1-delta)) + 2^(1/p - 1/q)."""
    if not 0.0 <= delta < 1.0:
        raise InputError(f"delta = {delta} must lie in [0, 1)")
    if not 1.0 <= q <= p <= 2.0:
        raise InputError(f"need 1 <= q <= p <= 2, got p={p}, q={q}")
    return (2.0 ** (1.0 / p + 0.5) * math.sqrt((1.0 + delta) / (1.0 - delta))
            + 2.0 ** (1.0 / p - 1.0 / q))


def mixed_exponent(p, q):
    """s = 1/q - 1/p."""
    return 1.0 / q - 1.0 / p


# the absolute constant c in the Gaussian S-RIP success probability 1 - exp(-c m / 2)
# is never quantified; reports carry this note instead of a number
GAUSSIAN_SRIP_CONSTANT = "unquantified"


FORMULAS = {
    "stability": lambda p: stability_constants(p["delta"], p["t"], p.get("rho", 0.0)),
    "srip-threshold": lambda p: srip_stability_threshold(p["theta_minus"], p["theta_plus"]),
    "rip-from-srip": lambda p: rip_from_srip(p["theta_minus"], p["theta_plus"]),
    "nsp-from-rip": lambda p: nsp_const_from_rip(p["a"], p["b"], p["delta"]),
    "l1-io": lambda p: l1_io_constants(p["theta_minus"], p["theta_plus"], p["t"]),
    "mixed-ktilde": lambda p: mixed_ktilde(p["k"], p["N"], p["q"]),
    "mixed-nsp": lambda p: mixed_nsp_constant(p["delta"], p["p"], p["q"]),
}
