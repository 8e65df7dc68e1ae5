"""Service-time distribution families.

Every family carries exact closed forms for its raw moments, its
Laplace-Stieltjes transform (LST) and the arrival-count weights

    r_j = integral of exp(-lam*x) * (lam*x)^j / j! dB(x),

i.e. the probability that exactly j Poisson(lam) arrivals occur during one
service.  The weights are evaluated in the log domain so that very deep
tails (or a tiny r_0) do not underflow prematurely.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import gammaln

__all__ = [
    "ServiceDistribution",
    "Exponential",
    "Erlang",
    "Gamma",
    "Deterministic",
    "HyperExponential",
    "dist_from_dict",
    "dist_to_dict",
    "parse_dist_spec",
]

_WEIGHT_SUM_TOL = 1e-12


def _check_moment_order(k):
    if k not in (1, 2, 3):
        raise ValueError("raw_moment order must be 1, 2 or 3, got %r" % (k,))


def _check_s(s):
    if s < 0:
        raise ValueError("LST argument must be nonnegative, got %r" % (s,))


def _negbin_log_weights(shape, rate, lam, n):
    # r_j for Gamma(shape, rate) service: negative binomial with success
    # probability rate/(lam+rate).
    j = np.arange(n + 1, dtype=np.float64)
    log_p = math.log(rate) - math.log(lam + rate)
    log_q = math.log(lam) - math.log(lam + rate)
    return gammaln(shape + j) - gammaln(j + 1.0) - gammaln(shape) \
        + shape * log_p + j * log_q


class ServiceDistribution:
    """Common surface of all supported service-time families."""

    def mean(self):
        return self.raw_moment(1)

    def raw_moment(self, k):
        raise NotImplementedError

    def lst(self, s):
        raise NotImplementedError

    def lst_derivative(self, s):
        raise NotImplementedError

    def _log_weights(self, lam, n):
        raise NotImplementedError

    def mixed_poisson_weights(self, lam, n):
        """Weights (r_0, ..., r_n) for Poisson arrival rate lam."""
        if lam <= 0:
            raise ValueError("arrival rate must be positive, got %r" % (lam,))
        if n < 0:
            raise ValueError("weight count must be nonnegative")
        return np.exp(self._log_weights(float(lam), int(n)))

    def scale_to_mean(self, b):
        raise NotImplementedError


@dataclass(frozen=True)
class Exponential(ServiceDistribution):
    rate: float

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("Exponential rate must be positive")

    def raw_moment(self, k):
        _check_moment_order(k)
        return math.factorial(k) / self.rate ** k

    def lst(self, s):
        _check_s(s)
        return self.rate / (self.rate + s)

    def lst_derivative(self, s):
        _check_s(s)
        return -self.rate / (self.rate + s) ** 2

    def _log_weights(self, lam, n):
        return _negbin_log_weights(1.0, self.rate, lam, n)

    def scale_to_mean(self, b):
        if b <= 0:
            raise ValueError("target mean must be positive")
        return Exponential(rate=1.0 / b)


@dataclass(frozen=True)
class Erlang(ServiceDistribution):
    shape: int
    rate: float

    def __post_init__(self):
        if int(self.shape) != self.shape or self.shape < 1:
            raise ValueError("Erlang shape must be a positive integer")
        if self.rate <= 0:
            raise ValueError("Erlang rate must be positive")

    def raw_moment(self, k):
        _check_moment_order(k)
        m = 1.0
        for i in range(k):
            m *= (self.shape + i) / self.rate
        return m

    def lst(self, s):
        _check_s(s)
        return (self.rate / (self.rate + s)) ** self.shape

    def lst_derivative(self, s):
        _check_s(s)
        return -(self.shape / self.rate) * (self.rate / (self.rate + s)) ** (self.shape + 1)

    def _log_weights(self, lam, n):
        return _negbin_log_weights(float(self.shape), self.rate, lam, n)

    def scale_to_mean(self, b):
        if b <= 0:
            raise ValueError("target mean must be positive")
        return Erlang(shape=self.shape, rate=self.shape / b)


@dataclass(frozen=True)
class Gamma(ServiceDistribution):
    shape: float
    rate: float

    def __post_init__(self):
        if self.shape <= 0 or self.rate <= 0:
            raise ValueError("Gamma shape and rate must be positive")

    def raw_moment(self, k):
        _check_moment_order(k)
        m = 1.0
        for i in range(k):
            m *= (self.shape + i) / self.rate
        return m

    def lst(self, s):
        _check_s(s)
        return (self.rate / (self.rate + s)) ** self.shape

    def lst_derivative(self, s):
        _check_s(s)
        return -(self.shape / self.rate) * (self.rate / (self.rate + s)) ** (self.shape + 1.0)

    def _log_weights(self, lam, n):
        return _negbin_log_weights(self.shape, self.rate, lam, n)

    def scale_to_mean(self, b):
        if b <= 0:
            raise ValueError("target mean must be positive")
        return Gamma(shape=self.shape, rate=self.shape / b)


@dataclass(frozen=True)
class Deterministic(ServiceDistribution):
    duration: float

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("Deterministic duration must be positive")

    def raw_moment(self, k):
        _check_moment_order(k)
        return self.duration ** k

    def lst(self, s):
        _check_s(s)
        return math.exp(-s * self.duration)

    def lst_derivative(self, s):
        _check_s(s)
        return -self.duration * math.exp(-s * self.duration)

    def _log_weights(self, lam, n):
        # Poisson(lam * duration) pmf.
        mu = lam * self.duration
        j = np.arange(n + 1, dtype=np.float64)
        return -mu + j * math.log(mu) - gammaln(j + 1.0)

    def scale_to_mean(self, b):
        if b <= 0:
            raise ValueError("target mean must be positive")
        return Deterministic(duration=b)


@dataclass(frozen=True)
class HyperExponential(ServiceDistribution):
    weights: tuple
    rates: tuple

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        r = tuple(float(x) for x in self.rates)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "rates", r)
        if len(w) != len(r) or not w:
            raise ValueError("HyperExponential needs matching nonempty weights and rates")
        if any(x < 0 for x in w):
            raise ValueError("HyperExponential weights must be nonnegative")
        if abs(sum(w) - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError("HyperExponential weights must sum to 1")
        if any(x <= 0 for x in r):
            raise ValueError("HyperExponential rates must be positive")

    def raw_moment(self, k):
        _check_moment_order(k)
        return sum(w * math.factorial(k) / r ** k
                   for w, r in zip(self.weights, self.rates))

    def lst(self, s):
        _check_s(s)
        return sum(w * r / (r + s) for w, r in zip(self.weights, self.rates))

    def lst_derivative(self, s):
        _check_s(s)
        return -sum(w * r / (r + s) ** 2 for w, r in zip(self.weights, self.rates))

    def _log_weights(self, lam, n):
        total = np.zeros(n + 1)
        for w, r in zip(self.weights, self.rates):
            if w > 0:
                total += w * np.exp(_negbin_log_weights(1.0, r, lam, n))
        with np.errstate(divide="ignore"):
            return np.log(total)

    def scale_to_mean(self, b):
        if b <= 0:
            raise ValueError("target mean must be positive")
        factor = self.mean() / b
        return HyperExponential(weights=self.weights,
                                rates=tuple(r * factor for r in self.rates))


# --- serialization helpers (config files use tagged records) ---

def dist_to_dict(d):
    if isinstance(d, Exponential):
        return {"type": "exp", "rate": d.rate}
    if isinstance(d, Erlang):
        return {"type": "erlang", "shape": d.shape, "rate": d.rate}
    if isinstance(d, Gamma):
        return {"type": "gamma", "shape": d.shape, "rate": d.rate}
    if isinstance(d, Deterministic):
        return {"type": "det", "duration": d.duration}
    if isinstance(d, HyperExponential):
        return {"type": "hyper", "weights": list(d.weights), "rates": list(d.rates)}
    raise ValueError("unknown distribution object %r" % (d,))


def dist_from_dict(rec):
    try:
        kind = rec["type"]
    except (TypeError, KeyError):
        raise ValueError("distribution record needs a 'type' tag: %r" % (rec,))
    if kind in ("exp", "exponential"):
        return Exponential(rate=float(rec["rate"]))
    if kind == "erlang":
        return Erlang(shape=int(rec["shape"]), rate=float(rec["rate"]))
    if kind == "gamma":
        return Gamma(shape=float(rec["shape"]), rate=float(rec["rate"]))
    if kind in ("det", "deterministic"):
        return Deterministic(duration=float(rec["duration"]))
    if kind == "hyper":
        return HyperExponential(weights=tuple(rec["weights"]),
                                rates=tuple(rec["rates"]))
    raise ValueError("unknown distribution type %r" % (kind,))


def parse_dist_spec(text):
    """Parse the one-line flag grammar, e.g. 'exp:1.25' or 'erlang:2:2.0'.

    Supported: exp:<rate>, erlang:<shape>:<rate>, gamma:<shape>:<rate>,
    det:<duration>, hyper:<w1>:<r1>:<w2>:<r2>[...].
    """
    parts = str(text).split(":")
    kind, args = parts[0], parts[1:]
    try:
        if kind == "exp" and len(args) == 1:
            return Exponential(rate=float(args[0]))
        if kind == "erlang" and len(args) == 2:
            return Erlang(shape=int(args[0]), rate=float(args[1]))
        if kind == "gamma" and len(args) == 2:
            return Gamma(shape=float(args[0]), rate=float(args[1]))
        if kind == "det" and len(args) == 1:
            return Deterministic(duration=float(args[0]))
        if kind == "hyper" and len(args) >= 4 and len(args) % 2 == 0:
            vals = [float(a) for a in args]
            return HyperExponential(weights=tuple(vals[0::2]),
                                    rates=tuple(vals[1::2]))
    except ValueError:
        raise
    raise ValueError("cannot parse distribution spec %r" % (text,))
