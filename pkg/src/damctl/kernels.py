"""Hot numeric kernels: busy-period recurrence and cycle simulation.

Two backends are provided for each kernel:

  * ``numba``  -- @njit-compiled loops (the default when numba imports),
  * ``numpy``  -- pure numpy / stdlib fallback.

Selection is via the environment variable ``DAMCTL_BACKEND`` (``numba`` or
``numpy``); unset means "numba if available".  All entry points also accept
an explicit ``backend=`` argument, which the benchmark uses to time both
paths in one process.

The simulator draws from a counter-based splittable stream: each
regeneration cycle gets its own splitmix64 stream keyed by
(seed, cycle index), so replications are reproducible regardless of
execution order.
"""

import math
import os

import numpy as np

BACKEND_ENV_VAR = "DAMCTL_BACKEND"

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    njit = None
    HAVE_NUMBA = False


def active_backend():
    """Backend chosen by the environment (numba unless told otherwise)."""
    req = os.environ.get(BACKEND_ENV_VAR, "").strip().lower()
    if req == "numpy":
        return "numpy"
    if req == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("DAMCTL_BACKEND=numba but numba is not importable")
        return "numba"
    if req:
        raise RuntimeError("unknown DAMCTL_BACKEND value %r" % (req,))
    return "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# Busy-period recurrence
#
# Q_0 = 1,  Q_{n+1} = (Q_n - sum_{j=1..n} r_j Q_{n-j+1}) / r_0.
#
# In the supercritical regime Q_n grows geometrically, so values are kept as
# (mantissa, binary exponent) pairs: whenever the working value passes 1e300
# the whole window is rescaled by 2^-1024 and the per-entry exponent records
# the cumulative shift at write time.
# ---------------------------------------------------------------------------

_RESCALE_BITS = 1024
_RESCALE_LIMIT = 1e300


def _recurrence_numpy(r, L):
    q = np.empty(L + 1)
    ex = np.zeros(L + 1, dtype=np.int64)
    w = np.empty(L + 1)  # mantissas in the current scaling
    q[0] = w[0] = 1.0
    shift = 0
    r0 = float(r[0])
    for n in range(L):
        if n == 0:
            s = 0.0
        else:
            # terms r_j * Q_{n-j+1}, j = 1..n; fsum gives an exactly
            # rounded inner product
            s = math.fsum(r[1:n + 1] * w[n:0:-1])
        v = (w[n] - s) / r0
        if v > _RESCALE_LIMIT:
            w[:n + 1] = np.ldexp(w[:n + 1], -_RESCALE_BITS)
            v = math.ldexp(v, -_RESCALE_BITS)
            shift += _RESCALE_BITS
        w[n + 1] = v
        q[n + 1] = v
        ex[n + 1] = shift
    return q, ex


def _recurrence_loop(r, L):
    q = np.empty(L + 1)
    ex = np.zeros(L + 1, dtype=np.int64)
    w = np.empty(L + 1)
    q[0] = 1.0
    w[0] = 1.0
    shift = 0
    r0 = r[0]
    for n in range(L):
        # Kahan-compensated inner product
        s = 0.0
        c = 0.0
        for j in range(1, n + 1):
            y = r[j] * w[n - j + 1] - c
            t = s + y
            c = (t - s) - y
            s = t
        v = (w[n] - s) / r0
        if v > 1e300:
            for m in range(n + 1):
                w[m] = math.ldexp(w[m], -1024)
            v = math.ldexp(v, -1024)
            shift += 1024
        w[n + 1] = v
        q[n + 1] = v
        ex[n + 1] = shift
    return q, ex


if HAVE_NUMBA:
    _recurrence_numba = njit(cache=True)(_recurrence_loop)
else:  # pragma: no cover
    _recurrence_numba = None


def busy_period_recurrence(r, L, backend=None):
    """Run the recurrence; returns (mantissas, binary exponents).

    Entry n equals mantissas[n] * 2**exponents[n].
    """
    r = np.ascontiguousarray(r, dtype=np.float64)
    if backend is None:
        backend = active_backend()
    if backend == "numba":
        return _recurrence_numba(r, int(L))
    return _recurrence_numpy(r, int(L))


# ---------------------------------------------------------------------------
# Counter-based splittable RNG (splitmix64) and the cycle simulator.
#
# The same source is used for both backends: the factory below optionally
# jit-compiles the whole call chain.  Pure-python execution uses np.uint64
# scalar arithmetic, so integer wraparound warnings are silenced at the
# simulate() wrapper.
# ---------------------------------------------------------------------------

_U64 = np.uint64
_GOLDEN = 0x9E3779B97F4A7C15

# service-law encodings for the kernel
KIND_EXP = 0
KIND_ERLANG = 1
KIND_GAMMA = 2
KIND_DET = 3
KIND_HYPER = 4


def _build_sim(decorate):
    dec = decorate if decorate is not None else (lambda f: f)

    @dec
    def smix_next(state):
        state = state + _U64(0x9E3779B97F4A7C15)
        z = state
        z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
        z = z ^ (z >> _U64(31))
        return state, z

    @dec
    def stream_key(seed, idx):
        # documented splitting rule: hash the seed, xor in the golden-ratio
        # multiple of the index, hash again
        s, z1 = smix_next(_U64(seed))
        s2 = z1 ^ (_U64(idx) * _U64(0x9E3779B97F4A7C15))
        s2, z2 = smix_next(s2)
        return z2

    @dec
    def u01(state):
        # uniform on (0, 1]; never 0, so log() is safe
        state, z = smix_next(state)
        return state, (float(z >> _U64(11)) + 1.0) * 1.1102230246251565e-16

    @dec
    def draw_gamma(state, shape, rate):
        # Marsaglia-Tsang; shape < 1 boosted via u^(1/shape)
        a = shape
        boost = 1.0
        if a < 1.0:
            state, u = u01(state)
            boost = u ** (1.0 / a)
            a += 1.0
        d = a - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        while True:
            state, u1 = u01(state)
            state, u2 = u01(state)
            x = math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
            t = 1.0 + c * x
            if t <= 0.0:
                continue
            v = t * t * t
            state, u = u01(state)
            if u < 1.0 - 0.0331 * x * x * x * x:
                break
            if math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
                break
        return state, boost * d * v / rate

    @dec
    def draw_service(kind, par, state):
        if kind == 0:    # exponential
            state, u = u01(state)
            return state, -math.log(u) / par[0]
        if kind == 1:    # Erlang: sum of integer-shape exponentials
            total = 0.0
            for _ in range(int(par[0])):
                state, u = u01(state)
                total += -math.log(u)
            return state, total / par[1]
        if kind == 2:    # Gamma
            return draw_gamma(state, par[0], par[1])
        if kind == 3:    # deterministic
            return state, par[0]
        # hyperexponential: par = [k, cumw_1..cumw_k, rate_1..rate_k]
        k = int(par[0])
        state, u = u01(state)
        idx = 0
        while idx < k - 1 and u > par[1 + idx]:
            idx += 1
        state, u2 = u01(state)
        return state, -math.log(u2) / par[1 + k + idx]

    @dec
    def simulate_cycles(n_cycles, seed, lam, level, kind1, par1, kind2, par2):
        idle = np.empty(n_cycles)
        below = np.empty(n_cycles)
        above = np.empty(n_cycles)
        nu1 = np.empty(n_cycles, dtype=np.int64)
        nu2 = np.empty(n_cycles, dtype=np.int64)
        for cyc in range(n_cycles):
            state = stream_key(seed, cyc)
            state, u = u01(state)
            t_idle = -math.log(u) / lam
            n = 1
            t_below = 0.0
            t_above = 0.0
            k1 = 0
            k2 = 0
            while n > 0:
                if n <= level:
                    state, s = draw_service(kind1, par1, state)
                    t_below += s
                    k1 += 1
                else:
                    state, s = draw_service(kind2, par2, state)
                    t_above += s
                    k2 += 1
                # arrivals during the service; exponential gaps, a tie with
                # the completion instant counts as after it (departure-first)
                state, u = u01(state)
                t = -math.log(u) / lam
                while t < s:
                    n += 1
                    state, u = u01(state)
                    t += -math.log(u) / lam
                n -= 1
            idle[cyc] = t_idle
            below[cyc] = t_below
            above[cyc] = t_above
            nu1[cyc] = k1
            nu2[cyc] = k2
        return idle, below, above, nu1, nu2

    return simulate_cycles, stream_key


_sim_numpy, _stream_key_numpy = _build_sim(None)
if HAVE_NUMBA:
    _sim_numba, _stream_key_numba = _build_sim(njit)
else:  # pragma: no cover
    _sim_numba, _stream_key_numba = None, None


def simulate_cycles(n_cycles, seed, lam, level, kind1, par1, kind2, par2,
                    backend=None):
    """Simulate regeneration cycles; returns per-cycle arrays
    (idle, below_time, above_time, nu1, nu2)."""
    par1 = np.ascontiguousarray(par1, dtype=np.float64)
    par2 = np.ascontiguousarray(par2, dtype=np.float64)
    if backend is None:
        backend = active_backend()
    if backend == "numba":
        return _sim_numba(int(n_cycles), int(seed), float(lam), int(level),
                          int(kind1), par1, int(kind2), par2)
    with np.errstate(over="ignore"):
        return _sim_numpy(int(n_cycles), int(seed), float(lam), int(level),
                          int(kind1), par1, int(kind2), par2)


def stream_key(seed, idx, backend=None):
    """64-bit stream key for (seed, idx); the splitting rule of the simulator."""
    if backend is None:
        backend = active_backend()
    if backend == "numba":
        return int(_stream_key_numba(int(seed), int(idx)))
    with np.errstate(over="ignore"):
        return int(_stream_key_numpy(int(seed), int(idx)))
