"""Exact finite-threshold analysis of the state-dependent M/GI/1 dam.

The expected number of below-threshold services per busy period, Q_L, is
computed from the convolution recurrence

    Q_0 = 1,   Q_{n+1} = (Q_n - sum_{j=1..n} r_j Q_{n-j+1}) / r_0,

with r_j the arrival-count weights of the normal-regime service law.  The
remaining busy-period quantities follow from Wald identities, and the
stationary probabilities p1 (idle / lower passage) and p2 (above-threshold
occupation) from the renewal reward theorem.
"""

from dataclasses import dataclass
import math
import os

import numpy as np

from .distributions import ServiceDistribution
from .errors import NumericDegeneracyError
from . import kernels

__all__ = [
    "DamModel",
    "CostModel",
    "BusyPeriodMetrics",
    "StationaryMetrics",
    "busy_period_counts",
    "gf_coefficients",
    "busy_period_metrics",
    "stationary_probs",
    "cost",
]

PRECISION_ENV_VAR = "DAMCTL_PRECISION"

_R0_FLOOR = 1e-300


@dataclass(frozen=True)
class DamModel:
    """Arrival rate, below/above-threshold service laws and threshold."""
    lam: float
    b1: ServiceDistribution
    b2: ServiceDistribution
    level: int

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("arrival rate must be positive")
        if int(self.level) != self.level or self.level < 1:
            raise ValueError("level must be an integer >= 1")
        if self.rho2 >= 1.0:
            raise ValueError("stability requires rho2 = lam * mean(b2) < 1")

    @property
    def rho1(self):
        return self.lam * self.b1.mean()

    @property
    def rho2(self):
        return self.lam * self.b2.mean()

    @property
    def rho12(self):
        return self.lam ** 2 * self.b1.raw_moment(2)

    @property
    def rho13(self):
        return self.lam ** 3 * self.b1.raw_moment(3)


@dataclass(frozen=True)
class CostModel:
    """Per-level damage costs for lower (j1) and upper (j2) passages."""
    j1: float
    j2: float

    def __post_init__(self):
        if self.j1 < 0 or self.j2 < 0:
            raise ValueError("damage costs must be nonnegative")


@dataclass(frozen=True)
class BusyPeriodMetrics:
    e_nu1: float
    e_nu2: float
    e_t1: float
    e_t2: float
    e_t: float
    e_idle: float


@dataclass(frozen=True)
class StationaryMetrics:
    p1: float
    p2: float
    cost: float


def _env_precision():
    raw = os.environ.get(PRECISION_ENV_VAR, "").strip()
    if not raw:
        return None
    digits = int(raw)
    if digits <= 0:
        raise ValueError("DAMCTL_PRECISION must be a positive digit count")
    return digits


def _counts_scaled(model, backend=None):
    """(mantissas, binary exponents) of Q_0..Q_L."""
    L = int(model.level)
    r = model.b1.mixed_poisson_weights(model.lam, max(L - 1, 0))
    if r[0] < _R0_FLOOR:
        raise NumericDegeneracyError(
            "r_0 = %g underflows; the normal-regime service law puts its mass "
            "too far from the origin for arrival rate %g" % (r[0], model.lam))
    return kernels.busy_period_recurrence(r, L, backend=backend)


def _counts_mp(model, digits):
    """Extended-precision recurrence via mpmath (DAMCTL_PRECISION path)."""
    import mpmath

    L = int(model.level)
    with mpmath.workdps(digits):
        r = [mpmath.mpf(x) for x in
             model.b1.mixed_poisson_weights(model.lam, max(L - 1, 0))]
        q = [mpmath.mpf(1)]
        for n in range(L):
            s = mpmath.fsum(r[j] * q[n - j + 1] for j in range(1, n + 1))
            q.append((q[n] - s) / r[0])
        return q


def busy_period_counts(model, precision=None, backend=None):
    """Vector (Q_0, ..., Q_L); entries beyond double range come back as inf."""
    if precision is None:
        precision = _env_precision()
    if precision is not None:
        return np.array([float(x) for x in _counts_mp(model, precision)])
    q, ex = _counts_scaled(model, backend=backend)
    out = np.empty_like(q)
    for i in range(len(q)):
        if ex[i] == 0:
            out[i] = q[i]
        else:
            try:
                out[i] = math.ldexp(q[i], int(ex[i]))
            except OverflowError:
                out[i] = math.inf
    return out


def gf_coefficients(model, n, backend=None):
    """First n+1 series coefficients of r(z) / (r(z) - z).

    Independent second route to Q_0..Q_n: formal power-series division of
    the weight generating function by (r(z) - z).
    """
    n = int(n)
    num = model.b1.mixed_poisson_weights(model.lam, n)
    if num[0] < _R0_FLOOR:
        raise NumericDegeneracyError("r_0 = %g underflows" % (num[0],))
    den = num.copy()
    den[1] -= 1.0
    out = np.empty(n + 1)
    out[0] = num[0] / den[0]
    for m in range(1, n + 1):
        s = math.fsum(den[1:m + 1] * out[m - 1::-1])
        out[m] = (num[m] - s) / den[0]
    return out


def _q_top(model, precision=None, backend=None):
    """Q_L as a (mantissa, binary exponent) pair."""
    if precision is None:
        precision = _env_precision()
    if precision is not None:
        import mpmath
        q = _counts_mp(model, precision)[-1]
        m, e = mpmath.frexp(q)
        return float(m), int(e)
    q, ex = _counts_scaled(model, backend=backend)
    return float(q[-1]), int(ex[-1])


def busy_period_metrics(model, precision=None, backend=None):
    """Busy-period expectations via Wald identities; e_nu1 = Q_L."""
    m, e = _q_top(model, precision=precision, backend=backend)
    try:
        e_nu1 = math.ldexp(m, e)
    except OverflowError:
        e_nu1 = math.inf
    rho1, rho2 = model.rho1, model.rho2
    e_nu2 = 1.0 / (1.0 - rho2) - (1.0 - rho1) / (1.0 - rho2) * e_nu1
    e_t1 = model.b1.mean() * e_nu1
    e_t2 = model.b2.mean() * e_nu2
    return BusyPeriodMetrics(
        e_nu1=e_nu1, e_nu2=e_nu2, e_t1=e_t1, e_t2=e_t2,
        e_t=e_t1 + e_t2, e_idle=1.0 / model.lam)


def stationary_probs(model, precision=None, backend=None):
    """(p1, p2) from the renewal-reward closed forms."""
    m, e = _q_top(model, precision=precision, backend=backend)
    rho1, rho2 = model.rho1, model.rho2
    # work with 1/Q_L so that supercritical growth cannot overflow
    inv_q = math.ldexp(1.0 / m, -e)
    denom = inv_q + (rho1 - rho2)
    p1 = (1.0 - rho2) * inv_q / denom
    p2 = (rho2 * inv_q + rho2 * (rho1 - 1.0)) / denom
    # deep subcritical: the numerator of p2 cancels to round-off and can come
    # out a hair negative; the true value is a nonnegative probability
    return p1, max(p2, 0.0)


def cost(model, costs, precision=None, backend=None):
    """Long-run average damage cost J(L) = L * (j1 * p1 + j2 * p2)."""
    p1, p2 = stationary_probs(model, precision=precision, backend=backend)
    return model.level * (costs.j1 * p1 + costs.j2 * p2)


def stationary_metrics(model, costs, precision=None, backend=None):
    p1, p2 = stationary_probs(model, precision=precision, backend=backend)
    return StationaryMetrics(p1=p1, p2=p2,
                             cost=model.level * (costs.j1 * p1 + costs.j2 * p2))
