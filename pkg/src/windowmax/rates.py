"""Log-MGF evaluators, numeric Legendre transforms, and closed-form rate functions.

Everything downstream (the limit solvers and the test oracles) consumes
these evaluators.  All quantities are in nats unless a function name says
otherwise; ``entropy_h`` is the lone base-2 function because the classical
Bernoulli formulas are stated in bits.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp

from .laws import (
    DomainError,
    IncrementKind,
    IncrementLaw,
    WindowKind,
    WindowLaw,
)

__all__ = [
    "BracketError",
    "NonConcaveWarning",
    "RateProfile",
    "cgf",
    "window_scaled_cgf",
    "legendre",
    "rate_f",
    "cramer_D",
    "upper_cramer_D",
    "entropy_h",
    "g",
    "rate_profile",
]

Interval = Tuple[float, float]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0

# ceiling for the expanding Legendre bracket; exp(t) overflows past ~709
TAU_GUARD = 700.0

# average slope on the last doubled segment above which the objective is
# declared unbounded (vs. merely converging to a finite supremum)
_UNBOUNDED_SLOPE = 1e-9

DEFAULT_TOL = 1e-10


class BracketError(ValueError):
    """A search bracket is empty, reversed, or otherwise unusable."""


class NonConcaveWarning(UserWarning):
    """The Legendre objective failed a concavity chord test."""


def cgf(law: IncrementLaw, tau: float) -> float:
    """Log moment generating function of one increment at ``tau``."""
    if tau == 0.0:
        return 0.0
    kind = law.kind
    if kind is IncrementKind.TABULATED:
        lo, hi = law.cgf_domain
        if not (lo <= tau <= hi):
            raise DomainError(f"tau={tau} outside tabulated grid [{lo}, {hi}]")
        return float(law._interp(tau))
    if not law.contains_tau(tau):
        raise DomainError(f"tau={tau} outside log-MGF domain {law.cgf_domain}")
    if kind is IncrementKind.BERNOULLI_PM1:
        # log cosh, written to stay finite for large |tau|
        a = abs(tau)
        return a - math.log(2.0) + math.log1p(math.exp(-2.0 * a))
    if kind is IncrementKind.GAUSSIAN:
        return 0.5 * law.variance * tau * tau
    if kind is IncrementKind.SQUARED_GAUSSIAN_WEIGHT:
        return -0.5 * math.log1p(-2.0 * law.weight_variance * tau)
    if kind is IncrementKind.CONSTANT:
        return law.value * tau
    raise AssertionError(f"unhandled increment kind {kind}")


def _bounded_support_logweights(wlaw: WindowLaw) -> Tuple[np.ndarray, np.ndarray]:
    lo, hi = wlaw.support_interval
    p = wlaw.p
    ls = np.arange(max(int(math.ceil(lo * p)), 0), int(math.floor(hi * p)) + 1)
    if len(ls) == 0:
        raise ValueError(f"support [{lo}, {hi}] x p={p} contains no integers")
    logq = ls * math.log(p) - p - gammaln(ls + 1)
    logq -= logsumexp(logq)
    return ls, logq


def window_scaled_cgf(wlaw: WindowLaw, t: float) -> float:
    """Scaled log-MGF of the window length: (1/p) log E exp(t * lambda)."""
    if t < 0.0:
        raise DomainError(f"window log-MGF is only used on t >= 0, got {t}")
    if t == 0.0:
        return 0.0
    if wlaw.kind is WindowKind.POISSON:
        try:
            return math.expm1(t)
        except OverflowError:
            return math.inf
    if wlaw.kind is WindowKind.DETERMINISTIC:
        return t * (wlaw.k / wlaw.p)
    if wlaw.kind is WindowKind.BOUNDED_SUPPORT:
        ls, logq = _bounded_support_logweights(wlaw)
        return float(logsumexp(logq + t * ls)) / wlaw.p
    raise AssertionError(f"unhandled window kind {wlaw.kind}")


def _objective(cgf_evaluator: Callable[[float], float], y: float, t: float) -> float:
    # points where the evaluator blows up or leaves its domain can never be
    # the supremum; map them to -inf so the search skips them
    try:
        c = cgf_evaluator(t)
    except (DomainError, OverflowError):
        return -math.inf
    if math.isnan(c):
        return -math.inf
    return y * t - c


def _golden_max(
    obj: Callable[[float], float], lo: float, hi: float, tol: float
) -> Tuple[float, float]:
    """Maximize a concave function on [lo, hi]; returns (value, argmax)."""
    h = hi - lo
    if h <= tol:
        mid = 0.5 * (lo + hi)
        return obj(mid), mid
    n = int(math.ceil(math.log(tol / h) / math.log(_INV_PHI)))
    c = lo + _INV_PHI_SQ * h
    d = lo + _INV_PHI * h
    yc = obj(c)
    yd = obj(d)
    for _ in range(n - 1):
        if yc > yd:
            hi = d
            d = c
            yd = yc
            h = _INV_PHI * h
            c = lo + _INV_PHI_SQ * h
            yc = obj(c)
        else:
            lo = c
            c = d
            yc = yd
            h = _INV_PHI * h
            d = lo + _INV_PHI * h
            yd = obj(d)
    if yc > yd:
        return yc, c
    return yd, d


def _chord_ok(obj: Callable[[float], float], lo: float, hi: float) -> bool:
    ts = np.linspace(lo, hi, 5)
    vals = [obj(t) for t in ts]
    if not all(math.isfinite(v) for v in vals):
        return True  # cannot test across a domain edge
    for i in (1, 2, 3):
        w = (ts[i] - ts[0]) / (ts[4] - ts[0])
        chord = (1 - w) * vals[0] + w * vals[4]
        if vals[i] < chord - 1e-10:
            return False
    return True


def legendre(
    cgf_evaluator: Callable[[float], float],
    y: float,
    bracket: Interval = (0.0, math.inf),
    tol: float = DEFAULT_TOL,
) -> float:
    """sup over the bracket of ``y*t - cgf(t)`` for a convex ``cgf``.

    The objective is concave, so golden-section search is exact up to
    ``tol``.  An unbounded bracket is expanded by doubling until the
    objective stops increasing; if it is still climbing at a nontrivial
    rate when the overflow guard is reached, the supremum is +inf and the
    sentinel is returned rather than raising.
    """
    lo, hi = bracket
    if not (math.isfinite(lo) and hi > lo):
        raise BracketError(f"invalid bracket [{lo}, {hi}]")

    def obj(t: float) -> float:
        return _objective(cgf_evaluator, y, t)

    if math.isinf(hi):
        t_prev = max(lo, 0.0) + 1.0
        v_prev = obj(t_prev)
        while True:
            t_next = 2.0 * t_prev
            v_next = obj(t_next)
            if not v_next > v_prev:
                hi = t_next
                break
            if t_next > TAU_GUARD:
                if (v_next - v_prev) / (t_next - t_prev) > _UNBOUNDED_SLOPE:
                    return math.inf
                hi = t_next
                break
            t_prev, v_prev = t_next, v_next

    if not _chord_ok(obj, lo, hi):
        warnings.warn(
            "Legendre objective is not concave on the bracket; "
            "check the tabulated input",
            NonConcaveWarning,
        )
    best, _ = _golden_max(obj, lo, hi, tol)
    # a boundary supremum (e.g. t*=0 when y is at or below the mean slope)
    # is cheaper and exact when evaluated directly
    return max(best, obj(lo), obj(hi))


def rate_f(wlaw: WindowLaw, y: float) -> float:
    """Large-deviation rate of the window length at ratio ``y`` = length/p.

    Total on y >= 0, with +inf as the out-of-domain sentinel so variational
    objectives can compare it directly.
    """
    if y < 0.0:
        raise DomainError(f"rate is defined on y >= 0, got {y}")
    if wlaw.kind is WindowKind.POISSON:
        if y <= 1.0:
            return 0.0
        return y * (math.log(y) - 1.0) + 1.0
    if wlaw.kind is WindowKind.DETERMINISTIC:
        r = wlaw.k / wlaw.p
        # indicator of the single attainable ratio, with a small matching
        # window so searches probing y = r +- float noise stay feasible
        return 0.0 if abs(y - r) <= 1e-9 * max(1.0, r) else math.inf
    if wlaw.kind is WindowKind.BOUNDED_SUPPORT:
        lo, hi = wlaw.support_interval
        if y < lo or y > hi:
            return math.inf
        # conditioning removes mass outside [lo, hi] but leaves the
        # exponential scale inside untouched, so the interior rate is the
        # parent (Poisson) rate
        if y <= 1.0:
            return 0.0
        return y * (math.log(y) - 1.0) + 1.0
    raise AssertionError(f"unhandled window kind {wlaw.kind}")


def cramer_D(law: IncrementLaw, a: float, tol: float = DEFAULT_TOL) -> float:
    """Two-sided Cramér rate: sup over the law's log-MGF domain of ``a*tau - cgf``.

    Zero at the mean, +inf beyond the essential supremum, and equal to
    ``log 2 * (1 - entropy_h((1+a)/2))`` for the symmetric +-1 law.
    """
    if a > law.ess_sup:
        return math.inf
    lo, hi = law.cgf_domain
    if a >= law.mean:
        return legendre(lambda t: cgf(law, t), a, (0.0, hi), tol)
    # maximizer sits at tau <= 0: reflect so the search runs on t >= 0
    return legendre(lambda t: cgf(law, -t), -a, (0.0, -lo), tol)


def upper_cramer_D(law: IncrementLaw, a: float, tol: float = DEFAULT_TOL) -> float:
    """Upper-tail Cramér rate: sup restricted to tau >= 0, hence 0 at and below the mean."""
    if a <= law.mean:
        return 0.0
    return cramer_D(law, a, tol)


def entropy_h(t: float) -> float:
    """Binary entropy in bits, with the continuous extension h(0) = h(1) = 0."""
    if t < 0.0 or t > 1.0:
        raise DomainError(f"binary entropy needs t in [0, 1], got {t}")
    if t == 0.0 or t == 1.0:
        return 0.0
    return -t * math.log2(t) - (1.0 - t) * math.log2(1.0 - t)


def g(a: float, y: float) -> float:
    """Bit-rate contribution y * (1 - h(1/2 + a/2y)) of a window at ratio ``y``.

    Equals ``a`` at y = a and decays strictly on (a, +inf).
    """
    if y <= 0.0:
        raise DomainError(f"window ratio must be positive, got {y}")
    ratio = a / y
    if ratio < -1.0 or ratio > 1.0:
        raise DomainError(f"|a/y| = {abs(ratio)} exceeds 1")
    return y * (1.0 - entropy_h(0.5 + 0.5 * ratio))


@dataclass(frozen=True)
class RateProfile:
    """Memoized window-rate evaluator with domain metadata."""

    evaluator: Callable[[float], float]
    finite_domain: Interval
    minimizer: float
    steep: bool

    def __call__(self, y: float) -> float:
        return self.evaluator(y)


def rate_profile(wlaw: WindowLaw) -> RateProfile:
    """Build the rate profile of a window law (rate 0 at the mean ratio)."""
    if wlaw.kind is WindowKind.POISSON:
        domain: Interval = (0.0, math.inf)
        minimizer = 1.0
    elif wlaw.kind is WindowKind.DETERMINISTIC:
        r = wlaw.k / wlaw.p
        domain = (r, r)
        minimizer = r
    else:
        domain = wlaw.support_interval
        minimizer = 1.0
    evaluator = functools.lru_cache(maxsize=4096)(lambda y: rate_f(wlaw, y))
    return RateProfile(
        evaluator=evaluator, finite_domain=domain, minimizer=minimizer, steep=True
    )
