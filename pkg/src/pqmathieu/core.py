"""Scalar numerical machinery shared by every evaluator.

Complex log-gamma (Lanczos with reflection), Pochhammer symbols, shifted
binomial coefficients, and a compensated series-summation engine with a
uniform truncation policy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

_EPS = 2.220446049250313e-16
_ABS_FLOOR = 1e-300

# ratio of max |partial sum| to |result| above which >= 6 digits were lost
CANCELLATION_RATIO = 1e6


class DomainError(ValueError):
    """Raised when arguments violate a documented domain restriction."""


class Status(Enum):
    CONVERGED = "converged"
    TRUNCATED = "truncated"
    CANCELLATION_WARNING = "cancellation_warning"
    INVALID_DOMAIN = "invalid_domain"


@dataclass
class EvalOutcome:
    """Value plus an honest absolute-error estimate and a work counter."""

    value: complex
    abs_err: float
    work: int
    status: Status

    @property
    def converged(self) -> bool:
        return self.status in (Status.CONVERGED, Status.CANCELLATION_WARNING)


@dataclass
class SummationPolicy:
    rel_tol: float = 1e-15
    consecutive_small: int = 3
    max_terms: int = 100_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("SummationPolicy.rel_tol must be > 0")
        if self.consecutive_small < 1:
            raise DomainError("SummationPolicy.consecutive_small must be >= 1")
        if self.max_terms < self.consecutive_small:
            raise DomainError("SummationPolicy.max_terms must be >= consecutive_small")


DEFAULT_SUMMATION = SummationPolicy()

# Lanczos g = 5.2421875, 14 coefficients; relative error of exp(log_gamma)
# stays below ~5e-14 on |z| <= 50, Re z >= 0.5.
_LANCZOS_G = 5.2421875
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS_COF = np.array([
    57.1562356658629235, -59.5979603554754912, 14.1360979747417471,
    -0.491913816097620199, 0.339946499848118887e-4, 0.465236289270485756e-4,
    -0.983744753048795646e-4, 0.158088703224912494e-3, -0.210264441724104883e-3,
    0.217439618115212643e-3, -0.164318106536763890e-3, 0.844182239838527433e-4,
    -0.261908384015814087e-4, 0.368991826595316234e-5,
])
_SQRT_2PI = 2.5066282746310005


def _lanczos_half_plane(z):
    # valid for Re z >= 0.5
    t = z + _LANCZOS_G
    acc = (z + 0.5) * np.log(t) - t
    ser = np.full_like(z, _LANCZOS_C0)
    for j, c in enumerate(_LANCZOS_COF):
        ser = ser + c / (z + (j + 1))
    return acc + np.log(_SQRT_2PI * ser / z)


def _log_sin_pi_upper(z):
    # log sin(pi z) for Im z >= 0, branch continuous off the real poles:
    # sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
    return (math.log(0.5) + 0.5j * math.pi) - 1j * math.pi * z \
        + np.log1p(-np.exp(2j * math.pi * z))


def log_gamma(z):
    """Log of the gamma function for complex scalars or arrays.

    Lanczos approximation on Re z >= 0.5, reflection formula elsewhere.
    Agrees with the principal branch on the right half plane; exp of the
    result reproduces gamma everywhere away from the poles.
    """
    a = np.asarray(z, dtype=complex)
    scalar = a.ndim == 0
    a = np.atleast_1d(a)
    on_pole = (a.imag == 0.0) & (a.real <= 0.0) & (a.real == np.floor(a.real))
    if np.any(on_pole):
        raise DomainError("log_gamma pole at non-positive integer z")

    out = np.empty_like(a)
    right = a.real >= 0.5
    if np.any(right):
        out[right] = _lanczos_half_plane(a[right])
    if not np.all(right):
        w = a[~right]
        flip = w.imag < 0.0
        wu = np.where(flip, w.conj(), w)
        ls = _log_sin_pi_upper(wu)
        ls = np.where(flip, ls.conj(), ls)
        out[~right] = math.log(math.pi) - ls - _lanczos_half_plane(1.0 - w)
    if scalar:
        return complex(out[0])
    return out


def pochhammer(lam: complex, n: int) -> complex:
    """Shifted factorial (lam)_n = lam (lam+1) ... (lam+n-1); (lam)_0 = 1."""
    if n < 0:
        raise DomainError("pochhammer order must be a non-negative integer")
    out = complex(1.0)
    lam = complex(lam)
    for k in range(n):
        out *= lam + k
    return out


def binom_shifted(mu: float, m: int) -> float:
    """Binomial coefficient C(mu+m-1, m) = (mu)_m / m! for real mu > 0."""
    if not mu > 0:
        raise DomainError("binom_shifted requires mu > 0")
    if m < 0:
        raise DomainError("binom_shifted requires m >= 0")
    out = 1.0
    for j in range(1, m + 1):
        out *= (mu + j - 1) / j
    return out


def _two_sum(x: float, y: float):
    s = x + y
    t = s - x
    return s, (x - (s - t)) + (y - t)


class _NeumaierSum:
    """Compensated accumulator for one real component."""

    __slots__ = ("s", "c")

    def __init__(self):
        self.s = 0.0
        self.c = 0.0

    def add(self, x: float):
        t, e = _two_sum(self.s, x)
        self.c += e
        self.s = t

    def total(self) -> float:
        return self.s + self.c


class _DoubleDoubleSum:
    """Double-double accumulator; keeps ~32 digits of the running sum."""

    __slots__ = ("hi", "lo")

    def __init__(self):
        self.hi = 0.0
        self.lo = 0.0

    def add(self, x: float):
        s, e = _two_sum(self.hi, x)
        self.hi, self.lo = _two_sum(s, self.lo + e)

    def total(self) -> float:
        return self.hi + self.lo


def sum_series(term: Callable[[int], complex],
               policy: SummationPolicy | None = None,
               use_dd: bool = False) -> EvalOutcome:
    """Sum term(0) + term(1) + ... under the truncation policy.

    Stops once `consecutive_small` successive terms fall below the relative
    tolerance; the tail is bounded by the last-term heuristic.  Sets the
    cancellation flag when intermediate partial sums ever exceeded the
    result by CANCELLATION_RATIO.  With use_dd the accumulation runs in
    double-double arithmetic (internal fallback for alternating sums).
    """
    pol = policy or DEFAULT_SUMMATION
    acc_re = _DoubleDoubleSum() if use_dd else _NeumaierSum()
    acc_im = _DoubleDoubleSum() if use_dd else _NeumaierSum()

    small_run = 0
    max_partial = 0.0
    max_term = 0.0
    sum_abs = 0.0
    tail = 0.0
    last_at = 0.0
    k = 0
    converged = False
    while k < pol.max_terms:
        t = complex(term(k))
        acc_re.add(t.real)
        acc_im.add(t.imag)
        k += 1
        at = abs(t)
        last_at = at
        partial = math.hypot(acc_re.total(), acc_im.total())
        max_partial = max(max_partial, partial)
        max_term = max(max_term, at)
        sum_abs += at
        # stop slightly below rel_tol so the reported error stays within it
        if at <= 0.25 * pol.rel_tol * partial + _ABS_FLOOR:
            small_run += 1
            tail = max(tail, at)
            if small_run >= pol.consecutive_small:
                converged = True
                break
        else:
            small_run = 0
            tail = 0.0

    value = complex(acc_re.total(), acc_im.total())
    av = abs(value)
    if use_dd:
        round_err = 0.25 * _EPS * sum_abs
    else:
        round_err = 2.0 * _EPS * sum_abs
    if not converged:
        abs_err = 10.0 * max(tail, last_at) + round_err
        return EvalOutcome(value, abs_err, k, Status.TRUNCATED)

    abs_err = tail + round_err
    status = Status.CONVERGED
    if av > 0 and max_partial / av > CANCELLATION_RATIO:
        status = Status.CANCELLATION_WARNING
    elif abs_err > pol.rel_tol * av + _ABS_FLOOR:
        status = Status.CANCELLATION_WARNING
    return EvalOutcome(value, abs_err, k, status)
