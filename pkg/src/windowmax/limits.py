"""Solvers for the implicit variational equations of the window-maximum limit constants.

The classical constant solves ``D(alpha) = 1/C`` for a fixed window; the
stochastic constant solves ``inf_y [f(y) + y D(alpha/y)] = 1/C`` where f is
the window-length rate.  Both are found by bisection over a nested 1-D
minimization; all internal computation is in nats, with the Bernoulli
bit-form solvers as an independent entropy-based route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from .laws import DomainError, IncrementLaw, WindowKind, WindowLaw
from .rates import (
    DEFAULT_TOL,
    cramer_D,
    entropy_h,
    g,
    rate_f,
    upper_cramer_D,
)

__all__ = [
    "InvalidC",
    "InfeasibleError",
    "CapReached",
    "SolveResult",
    "objective",
    "inner_min",
    "classical_alpha",
    "classical_alpha_bernoulli",
    "stochastic_alpha",
    "stochastic_alpha_bernoulli",
    "LN2",
]

LN2 = math.log(2.0)

Interval = Tuple[float, float]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0

_MAX_BISECT = 200


class InvalidC(ValueError):
    """The limit-constant parameter C (or c) must be positive."""


class InfeasibleError(RuntimeError):
    """No window ratio gives a finite objective at this alpha."""


class CapReached(RuntimeError):
    """The alpha bracket hit its configured cap while the objective stayed below 1/C."""

    def __init__(self, cap: float, last_objective: float):
        super().__init__(
            f"alpha cap {cap:g} reached with objective {last_objective:g} still below target"
        )
        self.cap = cap
        self.last_objective = last_objective


@dataclass(frozen=True)
class SolveResult:
    """Limit constant plus solver diagnostics."""

    alpha: float
    residual: float
    inner_minimizer: Optional[float]
    bracket: Interval
    iterations: int
    saturated: bool = False
    diagnostic: str = ""


def objective(
    law: IncrementLaw,
    wlaw: WindowLaw,
    alpha: float,
    y: float,
    tol: float = DEFAULT_TOL,
) -> float:
    """f(y) + y * D(alpha/y), with +inf when either term is infinite.

    D is the upper-tail rate (supremum over tau >= 0), which is what the
    window-maximum tail costs; it agrees with the full Cramér rate at and
    above the increment mean.
    """
    if y <= 0.0:
        raise DomainError(f"window ratio must be positive, got {y}")
    fw = rate_f(wlaw, y)
    if math.isinf(fw):
        return math.inf
    d = upper_cramer_D(law, alpha / y, tol)
    if math.isinf(d):
        return math.inf
    return fw + y * d


def _window_ratio_domain(wlaw: WindowLaw) -> Interval:
    if wlaw.kind is WindowKind.POISSON:
        return (0.0, math.inf)
    if wlaw.kind is WindowKind.DETERMINISTIC:
        r = wlaw.k / wlaw.p
        return (r, r)
    return wlaw.support_interval


def _minimize_convex(
    obj: Callable[[float], float], lo: float, hi: float, tol: float
) -> Tuple[float, float]:
    """Golden-section minimum of a convex function on [lo, hi]; ties go to larger y."""
    a, b = lo, hi
    h = b - a
    if h > tol:
        n = int(math.ceil(math.log(tol / h) / math.log(_INV_PHI)))
        c = a + _INV_PHI_SQ * h
        d = a + _INV_PHI * h
        yc = obj(c)
        yd = obj(d)
        for _ in range(n - 1):
            if yc < yd:
                b = d
                d = c
                yd = yc
                h = _INV_PHI * h
                c = a + _INV_PHI_SQ * h
                yc = obj(c)
            else:
                a = c
                c = d
                yc = yd
                h = _INV_PHI * h
                d = a + _INV_PHI * h
                yd = obj(d)
    mid = 0.5 * (a + b)
    candidates = [(obj(mid), mid), (obj(lo), lo), (obj(hi), hi)]
    best_v, best_y = candidates[0]
    for v, y in candidates[1:]:
        if v < best_v - 1e-13 * max(1.0, abs(best_v)) or (
            abs(v - best_v) <= 1e-13 * max(1.0, abs(best_v)) and y > best_y
        ):
            best_v, best_y = v, y
    return best_v, best_y


def _inner_min_generic(
    obj: Callable[[float], float],
    y_lo: float,
    y_hi: float,
    alpha: float,
    tol: float,
) -> Tuple[float, float]:
    if y_lo > y_hi * (1.0 + 1e-12):
        raise InfeasibleError(f"no feasible window ratio at alpha={alpha:g}")
    if y_lo >= y_hi:  # single-point domain (deterministic window)
        v = obj(y_lo)
        if math.isinf(v):
            raise InfeasibleError(f"objective infinite at the only feasible y={y_lo:g}")
        return v, y_lo
    if math.isinf(y_hi):
        # expand until the objective is rising, which brackets the argmin
        # because the objective is convex (f convex, y*D(alpha/y) a perspective)
        edge = max(2.0 * y_lo, 2.0 * alpha, 2.0)
        v_edge = obj(edge)
        for _ in range(200):
            v_next = obj(2.0 * edge)
            if v_next >= v_edge:
                break
            edge *= 2.0
            v_edge = v_next
        y_hi = 2.0 * edge
    value, y_star = _minimize_convex(obj, y_lo, y_hi, tol)
    if math.isinf(value):
        raise InfeasibleError(f"no finite objective found on [{y_lo:g}, {y_hi:g}]")
    return value, y_star


def inner_min(
    law: IncrementLaw,
    wlaw: WindowLaw,
    alpha: float,
    tol: float = DEFAULT_TOL,
) -> Tuple[float, float]:
    """Infimum over window ratios of the variational objective, with its argmin.

    When the objective has a flat zero stretch (alpha at or below the
    attainable mean) the largest minimizing ratio is returned, which is the
    window law's own rate minimizer.
    """
    if alpha < 0.0:
        raise DomainError(f"alpha must be nonnegative, got {alpha}")
    w_lo, w_hi = _window_ratio_domain(wlaw)
    r = wlaw.k / wlaw.p if wlaw.kind is WindowKind.DETERMINISTIC else 1.0
    if alpha <= law.mean * r:
        return 0.0, r
    y_lo = w_lo
    if math.isfinite(law.ess_sup):
        if law.ess_sup <= 0.0:
            raise InfeasibleError(f"increments never exceed {law.ess_sup:g} on average")
        y_lo = max(y_lo, alpha / law.ess_sup)
    y_lo = max(y_lo, 1e-12)

    def obj(y: float) -> float:
        return objective(law, wlaw, alpha, y, tol)

    return _inner_min_generic(obj, y_lo, w_hi, alpha, tol)


def _bisect_value(
    value_fn: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    tol: float,
) -> Tuple[float, float, Interval, int, bool]:
    """Bisect a nondecreasing value function to hit ``target``.

    Returns (alpha, residual, bracket, iterations, saturated); ``saturated``
    marks a jump discontinuity (feasibility edge) where the residual cannot
    be driven below ``tol``.
    """
    iterations = 0
    v_lo = value_fn(lo)
    for _ in range(_MAX_BISECT):
        if hi - lo <= max(tol, 1e-15 * max(1.0, abs(hi))):
            break
        mid = 0.5 * (lo + hi)
        v_mid = value_fn(mid)
        iterations += 1
        if v_mid < target:
            lo, v_lo = mid, v_mid
        else:
            hi = mid
    residual_lo = abs(v_lo - target)
    mid = 0.5 * (lo + hi)
    v_mid = value_fn(mid)
    if math.isfinite(v_mid) and abs(v_mid - target) <= residual_lo:
        alpha, residual = mid, abs(v_mid - target)
    else:
        alpha, residual = lo, residual_lo
    return alpha, residual, (lo, hi), iterations, residual > tol


def classical_alpha(law: IncrementLaw, C: float, tol: float = 1e-8) -> SolveResult:
    """Fixed-window limit constant: the root of D(alpha) = 1/C on [mean, ess_sup].

    When 1/C exceeds the largest attainable rate (bounded increments with C
    below the law's critical value) the constant saturates at the essential
    supremum.
    """
    if C <= 0.0:
        raise InvalidC(f"C must be positive, got {C}")
    target = 1.0 / C

    def d_of(a: float) -> float:
        return upper_cramer_D(law, a, min(tol * 1e-2, DEFAULT_TOL))

    lo = law.mean
    if math.isfinite(law.ess_sup):
        d_top = cramer_D(law, law.ess_sup)
        # absorb the numeric transform's float error at the critical C
        if target >= d_top - 1e-12 * max(1.0, abs(d_top)):
            return SolveResult(
                alpha=law.ess_sup,
                residual=abs(d_top - target),
                inner_minimizer=None,
                bracket=(law.ess_sup, law.ess_sup),
                iterations=0,
                saturated=target > d_top,
                diagnostic="target rate at or above the largest attainable rate",
            )
        hi = law.ess_sup
    else:
        hi = max(lo + 1.0, 1.0)
        for _ in range(200):
            if d_of(hi) >= target:
                break
            hi = lo + 2.0 * (hi - lo)
    alpha, residual, bracket, iterations, saturated = _bisect_value(
        d_of, target, lo, hi, tol
    )
    return SolveResult(
        alpha=alpha,
        residual=residual,
        inner_minimizer=None,
        bracket=bracket,
        iterations=iterations,
        saturated=saturated,
    )


def classical_alpha_bernoulli(c: float, tol: float = 1e-8) -> SolveResult:
    """Classical +-1 constant from the bit-form equation 1 - h((1+alpha)/2) = 1/c.

    For c <= 1 the equation saturates and the constant equals 1, the
    essential supremum of the increments.
    """
    if c <= 0.0:
        raise InvalidC(f"c must be positive, got {c}")
    target = 1.0 / c

    def m(alpha: float) -> float:
        return 1.0 - entropy_h(0.5 * (1.0 + alpha))

    if target >= 1.0:  # m(1) = 1 is the largest attainable value
        return SolveResult(
            alpha=1.0,
            residual=abs(1.0 - target),
            inner_minimizer=None,
            bracket=(1.0, 1.0),
            iterations=0,
            saturated=target > 1.0,
        )
    alpha, residual, bracket, iterations, saturated = _bisect_value(
        m, target, 0.0, 1.0, tol
    )
    return SolveResult(
        alpha=alpha,
        residual=residual,
        inner_minimizer=None,
        bracket=bracket,
        iterations=iterations,
        saturated=saturated,
    )


def _solve_stochastic(
    value_fn: Callable[[float], Tuple[float, float]],
    target: float,
    tol: float,
    alpha_cap: float,
    raise_on_cap: bool,
) -> SolveResult:
    def value_only(alpha: float) -> float:
        try:
            return value_fn(alpha)[0]
        except InfeasibleError:
            return math.inf

    lo, hi = 0.0, 1.0
    last = value_only(hi)
    grow = 0
    while last < target:
        lo, hi = hi, 2.0 * hi
        grow += 1
        if hi > alpha_cap:
            if raise_on_cap:
                raise CapReached(alpha_cap, last)
            return SolveResult(
                alpha=math.inf,
                residual=math.inf,
                inner_minimizer=None,
                bracket=(lo, math.inf),
                iterations=grow,
                saturated=False,
                diagnostic=(
                    f"alpha cap {alpha_cap:g} reached; objective {last:g} "
                    f"still below 1/C = {target:g} (constant diverges)"
                ),
            )
        last = value_only(hi)
    alpha, residual, bracket, iterations, saturated = _bisect_value(
        value_only, target, lo, hi, tol
    )
    try:
        value, y_star = value_fn(alpha)
    except InfeasibleError:
        value, y_star = math.inf, None
    return SolveResult(
        alpha=alpha,
        residual=residual,
        inner_minimizer=y_star,
        bracket=bracket,
        iterations=iterations + grow,
        saturated=saturated,
        diagnostic="objective jumps over the target at a feasibility edge"
        if saturated
        else "",
    )


def stochastic_alpha(
    law: IncrementLaw,
    wlaw: WindowLaw,
    C: float,
    tol: float = 1e-8,
    alpha_cap: float = 1e6,
    raise_on_cap: bool = False,
) -> SolveResult:
    """Random-window limit constant: root of inf_y [f(y) + y D(alpha/y)] = 1/C.

    The alpha bracket grows geometrically from 0; if it passes ``alpha_cap``
    while the objective is still below 1/C, the constant is diverging (small
    C with unbounded window fluctuations) and the +inf sentinel is returned
    with diagnostics, or ``CapReached`` is raised when ``raise_on_cap``.
    """
    if C <= 0.0:
        raise InvalidC(f"C must be positive, got {C}")
    inner_tol = min(tol * 1e-2, DEFAULT_TOL)

    def value_fn(alpha: float) -> Tuple[float, float]:
        return inner_min(law, wlaw, alpha, inner_tol)

    return _solve_stochastic(value_fn, 1.0 / C, tol, alpha_cap, raise_on_cap)


def stochastic_alpha_bernoulli(
    c: float,
    tol: float = 1e-8,
    wlaw: Optional[WindowLaw] = None,
    alpha_cap: float = 1e6,
    raise_on_cap: bool = False,
) -> SolveResult:
    """Random-window +-1 constant from the bit-form objective f(y)/log2 + g(alpha, y).

    Everything is evaluated in bits (the window rate converted by dividing
    by log 2) so the right-hand side is exactly 1/c.  The route is
    independent of the numeric Legendre machinery: the increment cost comes
    from the binary entropy formula.  Defaults to Poisson windows; the
    window rate depends only on the law's shape, not its mean parameter.
    """
    if c <= 0.0:
        raise InvalidC(f"c must be positive, got {c}")
    if wlaw is None:
        wlaw = WindowLaw(kind=WindowKind.POISSON, p=1.0)
    w_lo, w_hi = _window_ratio_domain(wlaw)

    def value_fn(alpha: float) -> Tuple[float, float]:
        if alpha == 0.0:
            r = wlaw.k / wlaw.p if wlaw.kind is WindowKind.DETERMINISTIC else 1.0
            return 0.0, r

        def obj(y: float) -> float:
            fw = rate_f(wlaw, y)
            if math.isinf(fw):
                return math.inf
            if alpha / y > 1.0:
                return math.inf
            return fw / LN2 + g(alpha, y)

        y_lo = max(w_lo, alpha, 1e-12)
        return _inner_min_generic(obj, y_lo, w_hi, alpha, min(tol * 1e-2, DEFAULT_TOL))

    return _solve_stochastic(value_fn, 1.0 / c, tol, alpha_cap, raise_on_cap)
