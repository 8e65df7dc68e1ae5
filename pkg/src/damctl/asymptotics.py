"""Closed-form limits for p1, p2 and the limiting cost functionals.

Covers the three large-threshold regimes (subcritical, critical,
supercritical), the heavy-traffic regimes rho1 = 1 +/- delta with
L * delta -> C, and the limiting costs J_upper / J_lower used by the
control problem.

A caveat on the lower heavy-traffic formulas: they are evaluated literally
with exponent rho12_tilde / (2C).  That expression diverges as C -> 0
although the C = 0 case should recover the critical-regime limits; the
exact recurrence is the ground truth and `damctl verify
--regime lower` quantifies the discrepancy instead of hiding it.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import RegimeError

__all__ = [
    "AsymptoticRegime",
    "limit_subcritical",
    "critical_decay",
    "root_phi",
    "supercritical",
    "heavy_upper",
    "heavy_lower",
    "j_upper",
    "j_lower",
    "rho12_tilde",
]


@dataclass(frozen=True)
class AsymptoticRegime:
    """Tagged regime descriptor; delta/c only apply to the heavy regimes."""
    tag: str  # subcritical | critical | supercritical | heavy_upper | heavy_lower
    delta: float = None
    c: float = None

    def __post_init__(self):
        heavy = self.tag in ("heavy_upper", "heavy_lower")
        if heavy != (self.delta is not None) or heavy != (self.c is not None):
            raise ValueError("delta and c must be given exactly for the heavy regimes")


def limit_subcritical(rho1):
    """Limits of (p1, p2) for rho1 < 1."""
    if not 0 < rho1 < 1:
        raise RegimeError("subcritical limit needs 0 < rho1 < 1, got %r" % (rho1,))
    return 1.0 - rho1, 0.0


def critical_decay(rho12, rho2):
    """Limits of (L*p1, L*p2) at rho1 = 1."""
    if rho12 <= 0:
        raise ValueError("rho12 must be positive")
    if not 0 < rho2 < 1:
        raise ValueError("rho2 must lie in (0, 1)")
    lp1 = rho12 / 2.0
    return lp1, rho2 / (1.0 - rho2) * lp1


def root_phi(lam, b1, tol=1e-12):
    """Least root in (0,1) of z = B1_hat(lam - lam*z); requires rho1 > 1.

    Bracketing scan (geometric in 1-z) followed by bisection-safeguarded
    Newton; the residual is checked against `tol`.
    """
    rho1 = lam * b1.mean()
    if rho1 <= 1.0:
        raise RegimeError("root exists in (0,1) only for rho1 > 1, got rho1=%g" % rho1)

    def g(z):
        return b1.lst(lam - lam * z) - z

    def gprime(z):
        return -lam * b1.lst_derivative(lam - lam * z) - 1.0

    # scan z_k = 1 - (1e-9)^(k/63), k = 0..63: z from 0 to 1 - 1e-9
    lo, glo = 0.0, g(0.0)
    hi = None
    for k in range(1, 64):
        z = 1.0 - 10.0 ** (-9.0 * k / 63.0)
        gz = g(z)
        if gz < 0.0:
            hi, ghi = z, gz
            break
        lo, glo = z, gz
    if hi is None:
        raise RegimeError("no sign change located for the root of z = B1_hat(lam - lam z)")

    z = 0.5 * (lo + hi)
    for _ in range(200):
        gz = g(z)
        if gz > 0.0:
            lo = z
        else:
            hi = z
        dg = gprime(z)
        step = gz / dg if dg != 0.0 else math.inf
        z_new = z - step
        if not (lo < z_new < hi):
            z_new = 0.5 * (lo + hi)
        if abs(z_new - z) < 1e-16 and abs(gz) < tol:
            z = z_new
            break
        z = z_new
    if abs(g(z)) >= tol:
        raise RegimeError("root refinement stalled; residual %g" % abs(g(z)))
    return z


def supercritical(model):
    """(p1 prefactor, p2 limit, phi) for rho1 > 1: p1(L) ~ prefactor * phi^L."""
    rho1, rho2 = model.rho1, model.rho2
    if rho1 <= 1.0:
        raise RegimeError("supercritical limits need rho1 > 1")
    phi = root_phi(model.lam, model.b1)
    pref = (1.0 - rho2) * (1.0 + model.lam * model.b1.lst_derivative(
        model.lam - model.lam * phi)) / (rho1 - rho2)
    p2_limit = rho2 * (rho1 - 1.0) / (rho1 - rho2)
    return pref, p2_limit, phi


def _check_heavy_args(delta, c, rho12t, rho2):
    if delta <= 0:
        raise RegimeError("heavy-traffic formulas need delta > 0")
    if c <= 0:
        raise RegimeError("C must be positive; use critical_decay for C = 0")
    if rho12t <= 0:
        raise ValueError("rho12_tilde must be positive")
    if not 0 <= rho2 < 1:
        raise ValueError("rho2 must lie in [0, 1)")


def heavy_upper(delta, c, rho12t, rho2):
    """(p1, p2) for rho1 = 1 + delta with L*delta -> C > 0."""
    _check_heavy_args(delta, c, rho12t, rho2)
    e = math.exp(2.0 * c / rho12t)
    p1 = delta / (e - 1.0)
    p2 = delta * rho2 * e / ((1.0 - rho2) * (e - 1.0))
    return p1, p2


def heavy_lower(delta, c, rho12t, rho2):
    """(p1, p2, e_nu1) for rho1 = 1 - delta with L*delta -> C > 0.

    Literal formulas with exponent rho12_tilde / (2C); e_nu1 is the
    underlying busy-period count approximation so callers can compare
    against the exact recurrence.
    """
    _check_heavy_args(delta, c, rho12t, rho2)
    e = math.exp(rho12t / (2.0 * c))
    p1 = delta * e
    p2 = delta * rho2 / (1.0 - rho2) * (e - 1.0)
    return p1, p2, 1.0 / (delta * e)


def _critical_cost(rho12t, rho2, costs):
    return rho12t / 2.0 * (costs.j1 + costs.j2 * rho2 / (1.0 - rho2))


def j_upper(c, rho12t, rho2, costs):
    """Limiting cost in the upper regime; continuous extension at C = 0.

    Accepts a scalar or a numpy array of C values.
    """
    if rho12t <= 0:
        raise ValueError("rho12_tilde must be positive")
    if not 0 <= rho2 < 1:
        raise ValueError("rho2 must lie in [0, 1)")
    c_arr = np.asarray(c, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        e = np.exp(2.0 * c_arr / rho12t)
        val = c_arr * (costs.j1 / (e - 1.0)
                       + costs.j2 * rho2 * e / ((1.0 - rho2) * (e - 1.0)))
    val = np.where(c_arr == 0.0, _critical_cost(rho12t, rho2, costs), val)
    # guard against overflow of exp for very large C: the cost tends to
    # j2 * rho2 / (1 - rho2) * C there
    big = ~np.isfinite(e)
    if np.any(big):
        val = np.where(big, costs.j2 * rho2 / (1.0 - rho2) * c_arr, val)
    return float(val) if np.isscalar(c) or np.ndim(c) == 0 else val


def j_lower(c, rho12t, rho2, costs):
    """Limiting cost in the lower regime (literal formula).

    At C = 0 the literal expression diverges; the continuous extension
    (the critical-regime cost) is returned instead.  Accepts scalars or
    numpy arrays.
    """
    if rho12t <= 0:
        raise ValueError("rho12_tilde must be positive")
    if not 0 <= rho2 < 1:
        raise ValueError("rho2 must lie in [0, 1)")
    c_arr = np.asarray(c, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        e = np.exp(rho12t / (2.0 * c_arr))
        val = c_arr * (costs.j1 * e
                       + costs.j2 * rho2 / (1.0 - rho2) * (e - 1.0))
    val = np.where(c_arr == 0.0, _critical_cost(rho12t, rho2, costs), val)
    big = ~np.isfinite(val) & (c_arr > 0.0)
    if np.any(big):
        val = np.where(big, np.inf, val)
    return float(val) if np.isscalar(c) or np.ndim(c) == 0 else val


def rho12_tilde(lam, shape_dist):
    """Normalized second moment of the scale family evaluated at rho1 = 1."""
    d = shape_dist.scale_to_mean(1.0 / lam)
    return lam ** 2 * d.raw_moment(2)
