"""Integration engines shared by all integral representations.

Three routes: tanh-sinh (double-exponential) on the unit interval, a
double-exponential map for (0, inf) with exponentially decaying
integrands, and trapezoid summation along vertical lines in the complex
plane.  Engines report a level-difference error estimate and never hide
non-convergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import DomainError, EvalOutcome, Status

_EPS = 2.220446049250313e-16
_HALF_PI = 0.5 * math.pi
_T_CAP = 7.5  # node parameter beyond which double precision has nothing left


@dataclass
class QuadPolicy:
    rel_tol: float = 1e-12
    max_level: int = 12
    abs_floor: float = 1e-300

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("QuadPolicy.rel_tol must be > 0")
        if not 2 <= self.max_level <= 14:
            raise DomainError("QuadPolicy.max_level must lie in [2, 14]")
        if self.abs_floor < 0:
            raise DomainError("QuadPolicy.abs_floor must be >= 0")


DEFAULT_QUAD = QuadPolicy()


@dataclass
class ContourSpec:
    """Vertical line Re s = c, truncated at |Im s| <= half_height initially.

    The truncation height is grown adaptively (doubling) until the
    outermost block contributes below tolerance; `step` is the trapezoid
    spacing, halved once for the error estimate.
    """

    c: float = 0.5
    half_height: float = 8.0
    step: float = 0.05

    def __post_init__(self):
        if not self.half_height > 0:
            raise DomainError("ContourSpec.half_height must be > 0")
        if not self.step > 0:
            raise DomainError("ContourSpec.step must be > 0")


def _unit_point(t: float):
    # x = (1 + tanh(u))/2 with u = (pi/2) sinh t; returns (x, 1-x, w/h)
    u = _HALF_PI * math.sinh(t)
    if u >= 0:
        e = math.exp(-2.0 * u)
        x = 1.0 / (1.0 + e)
        xc = e / (1.0 + e)
        sech = 2.0 * math.exp(-u) / (1.0 + e)
    else:
        e = math.exp(2.0 * u)
        x = e / (1.0 + e)
        xc = 1.0 / (1.0 + e)
        sech = 2.0 * math.exp(u) / (1.0 + e)
    w = 0.25 * math.pi * math.cosh(t) * sech * sech
    return x, xc, w


def _semi_point(t: float):
    # x = exp(t - exp(-t)); good for integrands decaying like exp(-a x)
    emt = math.exp(-t)
    x = math.exp(t - emt)
    return x, x * (1.0 + emt)


class _LevelAccumulator:
    """Shared trapezoid-refinement driver for the two real-axis engines."""

    def __init__(self, point, evaluate, rel_tol):
        self.point = point          # t -> node tuple (last item is w/h)
        self.evaluate = evaluate    # node tuple -> complex or None to skip
        self.cut_rel = min(1e-14, rel_tol * 1e-2)
        self.sum = 0.0 + 0.0j
        self.sum_abs = 0.0
        self.scale = 0.0
        self.reach_pos = 0.0
        self.reach_neg = 0.0
        self.work = 0

    def _contrib(self, t: float):
        node = self.point(t)
        w = node[-1]
        if w == 0.0:
            return None
        val = self.evaluate(node)
        if val is None:
            return None
        self.work += 1
        c = w * val
        if c != c or abs(c) == math.inf:  # non-finite: endpoint underflow debris
            return None
        return c

    def _walk(self, start: float, step: float, minimum_reach: float):
        # sweep t = start, start+step, ... (step may be negative)
        t = start
        small = 0
        while abs(t) <= _T_CAP:
            c = self._contrib(t)
            if c is None:
                break
            self.sum += c
            ac = abs(c)
            self.sum_abs += ac
            self.scale = max(self.scale, ac, abs(self.sum))
            if ac <= self.cut_rel * self.scale and abs(t) >= minimum_reach:
                small += 1
                if small >= 4:
                    break
            else:
                small = 0
            t += step
        if step > 0:
            self.reach_pos = max(self.reach_pos, abs(t))
        else:
            self.reach_neg = max(self.reach_neg, abs(t))

    def base_level(self, h: float):
        c0 = self._contrib(0.0)
        if c0 is not None:
            self.sum += c0
            self.sum_abs += abs(c0)
            self.scale = max(self.scale, abs(c0))
        self._walk(h, h, 0.0)
        self._walk(-h, -h, 0.0)

    def refine(self, h: float):
        # new nodes at odd multiples of h, covering at least the old reach
        self._walk(h, 2.0 * h, self.reach_pos)
        self._walk(-h, -2.0 * h, self.reach_neg)


def _de_integrate(point, evaluate, policy: QuadPolicy) -> EvalOutcome:
    h = 1.0
    acc = _LevelAccumulator(point, evaluate, policy.rel_tol)
    acc.base_level(h)
    value = h * acc.sum
    err = math.inf
    status = Status.TRUNCATED
    for level in range(1, policy.max_level + 1):
        h *= 0.5
        acc.refine(h)
        new_value = h * acc.sum
        err = abs(new_value - value)
        value = new_value
        if level >= 2 and err <= policy.rel_tol * abs(value) + policy.abs_floor:
            status = Status.CONVERGED
            break
    abs_err = err + 2.0 * _EPS * h * acc.sum_abs + 8.0 * acc.cut_rel * h * acc.scale
    return EvalOutcome(complex(value), abs_err, acc.work, status)


def integrate_unit(f, policy: QuadPolicy | None = None) -> EvalOutcome:
    """Tanh-sinh integration of f over (0, 1).

    The integrand is called as f(t, tc) where tc = 1 - t is computed to
    full relative precision, so algebraic or essential singularities at
    either endpoint can be evaluated accurately.
    """
    pol = policy or DEFAULT_QUAD

    def evaluate(node):
        x, xc, _ = node
        if x == 0.0 or xc == 0.0:
            return None
        return f(x, xc)

    return _de_integrate(_unit_point, evaluate, pol)


def integrate_semi_infinite(f, policy: QuadPolicy | None = None) -> EvalOutcome:
    """Double-exponential integration of f over (0, inf).

    Assumes f decays at least like exp(-a x) for some a > 0 beyond a
    finite point; algebraic behaviour x^(s-1), s > 0, at the origin is
    handled by the map x = exp(t - exp(-t)).
    """
    pol = policy or DEFAULT_QUAD

    def evaluate(node):
        x, _ = node
        if x == 0.0 or x == math.inf:
            return None
        return f(x)

    return _de_integrate(_semi_point, evaluate, pol)


def integrate_vertical_line(g, spec: ContourSpec,
                            policy: QuadPolicy | None = None) -> EvalOutcome:
    """Trapezoid sum of g along the vertical line Re s = spec.c.

    `g` must accept a numpy array of contour points s and return the
    integrand values; it must decay at least exponentially in |Im s|.
    Returns the raw line integral (the caller applies any 1/(i pi) or
    1/(2 pi i) prefactor).
    """
    pol = policy or DEFAULT_QUAD
    c, h = spec.c, spec.step

    def block(lo_k: int, hi_k: int, step_h: float, offset: float):
        # nodes at Im s = (k + offset) * step_h for k in [lo_k, hi_k)
        ts = (np.arange(lo_k, hi_k) + offset) * step_h
        vals = g(c + 1j * ts)
        vals = np.asarray(vals, dtype=complex)
        bad = ~np.isfinite(vals)
        if bad.any():
            vals = np.where(bad, 0.0, vals)
        return complex(vals.sum()), float(np.abs(vals).sum()), len(ts)

    k_half = max(4, int(math.ceil(spec.half_height / h)))
    total, total_abs, work = block(-k_half, k_half + 1, h, 0.0)
    last_chunk = math.inf
    grown = 0
    while grown < 10:
        lo, hi = k_half + 1, 2 * k_half + 1
        up, up_abs, n1 = block(lo, hi, h, 0.0)
        dn, dn_abs, n2 = block(-hi + 1, -lo + 1, h, 0.0)
        total += up + dn
        total_abs += up_abs + dn_abs
        work += n1 + n2
        k_half = 2 * k_half
        last_chunk = abs(up) + abs(dn)
        if last_chunk <= 0.25 * pol.rel_tol * max(abs(total), 1e-305):
            break
        grown += 1
    else:
        return EvalOutcome(1j * h * total, math.inf, work,
                           Status.INVALID_DOMAIN)

    coarse = 1j * h * total
    mid, mid_abs, n3 = block(-k_half, k_half, h, 0.5)
    work += n3
    fine = 1j * 0.5 * h * (total + mid)
    err = abs(fine - coarse) + h * last_chunk \
        + 2.0 * _EPS * h * (total_abs + mid_abs)
    status = Status.CONVERGED if err <= pol.rel_tol * abs(fine) + pol.abs_floor \
        else Status.TRUNCATED
    return EvalOutcome(complex(fine), err, work, status)


@lru_cache(maxsize=32)
def unit_grid(level: int):
    """Precomputed tanh-sinh node data for vectorized unit-interval work.

    Returns (log_t, log_tc, inv_t, inv_tc, log_w) arrays for step
    h = 2^-level, usable for integrands of the form
    exp(a log t + b log(1-t) - p/t - q/(1-t)).
    """
    h = 2.0 ** (-level)
    k = np.arange(-int(_T_CAP / h), int(_T_CAP / h) + 1)
    t = k * h
    u = _HALF_PI * np.sinh(t)
    log_t = -np.logaddexp(0.0, -2.0 * u)
    log_tc = -np.logaddexp(0.0, 2.0 * u)
    abs_u = np.abs(u)
    log_sech = math.log(2.0) - abs_u - np.log1p(np.exp(-2.0 * abs_u))
    log_w = math.log(0.25 * math.pi * h) + np.log(np.cosh(t)) + 2.0 * log_sech
    keep = (log_w > -746.0) & np.isfinite(log_w)
    log_t, log_tc, log_w = log_t[keep], log_tc[keep], log_w[keep]
    with np.errstate(over="ignore"):
        inv_t = np.exp(-log_t)
        inv_tc = np.exp(-log_tc)
    return log_t, log_tc, inv_t, inv_tc, log_w
