"""Increment and window-length law descriptions.

An increment law describes the i.i.d. summands of the windowed partial
sums; a window law describes the (possibly random) number of terms per
window.  Both are immutable value objects consumed by the rate evaluators
and solvers.
"""

from __future__ import annotations

import csv
import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator

__all__ = [
    "DomainError",
    "NonConvexGridWarning",
    "IncrementKind",
    "WindowKind",
    "IncrementLaw",
    "WindowLaw",
    "bernoulli_pm1",
    "gaussian",
    "squared_gaussian_weight",
    "constant",
    "tabulated",
    "tabulated_from_csv",
    "poisson_window",
    "deterministic_window",
    "bounded_support_window",
]

Interval = Tuple[float, float]


class DomainError(ValueError):
    """An evaluation point lies outside the function's domain."""


class NonConvexGridWarning(UserWarning):
    """A tabulated log-MGF grid failed the convexity chord test."""


class IncrementKind(enum.Enum):
    BERNOULLI_PM1 = "bernoulli_pm1"
    GAUSSIAN = "gaussian"
    SQUARED_GAUSSIAN_WEIGHT = "squared_gaussian_weight"
    CONSTANT = "constant"
    TABULATED = "tabulated"


class WindowKind(enum.Enum):
    POISSON = "poisson"
    DETERMINISTIC = "deterministic"
    BOUNDED_SUPPORT = "bounded_support"


@dataclass(frozen=True)
class IncrementLaw:
    """Distribution of a single summand, with log-MGF metadata.

    ``cgf_domain`` is the maximal open interval on which the log-MGF is
    finite.  The variational formulas only ever take suprema over the
    positive part of this interval; the negative part exists so the full
    two-sided Cramér transform is computable (e.g. for lower-tail rates).
    """

    kind: IncrementKind
    mean: float
    variance: float
    cgf_domain: Interval
    ess_sup: float
    # kind-specific parameters
    value: float = 0.0                      # CONSTANT
    weight_variance: float = 1.0            # SQUARED_GAUSSIAN_WEIGHT: v^2
    _interp: Optional[PchipInterpolator] = field(default=None, compare=False, repr=False)

    def contains_tau(self, tau: float) -> bool:
        lo, hi = self.cgf_domain
        return lo < tau < hi or tau == 0.0


@dataclass(frozen=True)
class WindowLaw:
    """Distribution of the window length, scaled so the mean is ``p``."""

    kind: WindowKind
    p: float
    k: Optional[float] = None               # DETERMINISTIC: fixed length
    support_interval: Optional[Interval] = None  # BOUNDED_SUPPORT: Y, in units of p
    cgf_domain: Interval = (0.0, math.inf)

    def __post_init__(self) -> None:
        if not self.p > 0:
            raise ValueError(f"expected window p must be positive, got {self.p}")
        if self.kind is WindowKind.DETERMINISTIC:
            k = self.p if self.k is None else self.k
            if k < 0:
                raise ValueError(f"deterministic window length must be >= 0, got {k}")
            object.__setattr__(self, "k", float(k))
        if self.kind is WindowKind.BOUNDED_SUPPORT:
            if self.support_interval is None:
                raise ValueError("bounded-support window requires a support interval")
            lo, hi = self.support_interval
            if not (0 <= lo < 1 < hi):
                raise ValueError(
                    f"support interval must straddle the mean ratio 1, got [{lo}, {hi}]"
                )


def bernoulli_pm1() -> IncrementLaw:
    """Symmetric +-1 increments (probability 1/2 each)."""
    return IncrementLaw(
        kind=IncrementKind.BERNOULLI_PM1,
        mean=0.0,
        variance=1.0,
        cgf_domain=(-math.inf, math.inf),
        ess_sup=1.0,
    )


def gaussian(variance: float = 1.0) -> IncrementLaw:
    """Centered Gaussian increments with the given variance."""
    if not variance > 0:
        raise ValueError(f"variance must be positive, got {variance}")
    return IncrementLaw(
        kind=IncrementKind.GAUSSIAN,
        mean=0.0,
        variance=float(variance),
        cgf_domain=(-math.inf, math.inf),
        ess_sup=math.inf,
    )


def squared_gaussian_weight(weight_variance: float = 1.0) -> IncrementLaw:
    """Square of a centered Gaussian weight: mean v^2, log-MGF finite below 1/(2 v^2)."""
    v2 = float(weight_variance)
    if not v2 > 0:
        raise ValueError(f"weight variance must be positive, got {weight_variance}")
    return IncrementLaw(
        kind=IncrementKind.SQUARED_GAUSSIAN_WEIGHT,
        mean=v2,
        variance=2.0 * v2 * v2,
        cgf_domain=(-math.inf, 1.0 / (2.0 * v2)),
        ess_sup=math.inf,
        weight_variance=v2,
    )


def constant(value: float) -> IncrementLaw:
    """Degenerate increments equal to ``value`` with probability 1."""
    return IncrementLaw(
        kind=IncrementKind.CONSTANT,
        mean=float(value),
        variance=0.0,
        cgf_domain=(-math.inf, math.inf),
        ess_sup=float(value),
        value=float(value),
    )


def _chord_check(taus: np.ndarray, logphis: np.ndarray) -> bool:
    # convexity: each interior point lies below the chord of its neighbours
    for i in range(1, len(taus) - 1):
        w = (taus[i] - taus[i - 1]) / (taus[i + 1] - taus[i - 1])
        chord = (1 - w) * logphis[i - 1] + w * logphis[i + 1]
        if logphis[i] > chord + 1e-10:
            return False
    return True


def tabulated(
    taus: Sequence[float],
    logphis: Sequence[float],
    ess_sup: float = math.inf,
) -> IncrementLaw:
    """Increment law given by a sampled log-MGF grid.

    The grid must be strictly increasing in tau and bracket 0; the curve is
    shifted so it passes exactly through (0, 0), then interpolated with a
    monotone cubic, which keeps the numeric transform convex up to
    interpolation error.
    """
    t = np.asarray(taus, dtype=float)
    v = np.asarray(logphis, dtype=float)
    if t.ndim != 1 or t.shape != v.shape or len(t) < 3:
        raise ValueError("grid must be two equal-length 1-D columns with >= 3 points")
    if not np.all(np.diff(t) > 0):
        raise ValueError("tau grid must be strictly increasing")
    if not (t[0] <= 0.0 <= t[-1]):
        raise ValueError("tau grid must bracket 0")
    if not _chord_check(t, v):
        warnings.warn("tabulated log-MGF grid is not convex", NonConvexGridWarning)
    interp = PchipInterpolator(t, v, extrapolate=False)
    shift = float(interp(0.0))
    interp = PchipInterpolator(t, v - shift, extrapolate=False)
    # mean and variance metadata from value differences at the origin; a
    # multi-knot stencil avoids the interpolant's per-cell derivative bias
    step = 4.0 * float(np.median(np.diff(t)))
    dr = min(step, 0.5 * t[-1]) if t[-1] > 0 else 0.0
    dl = min(step, -0.5 * t[0]) if t[0] < 0 else 0.0
    if dr > 0.0 and dl > 0.0:
        d = min(dr, dl)
        mean = float((interp(d) - interp(-d)) / (2.0 * d))
        variance = float((interp(d) + interp(-d)) / (d * d))
    else:
        d = dr if dr > 0.0 else dl
        sgn = 1.0 if dr > 0.0 else -1.0
        mean = sgn * float((4.0 * interp(sgn * d) - interp(sgn * 2.0 * d)) / (2.0 * d))
        variance = float((interp(sgn * 2.0 * d) - 2.0 * interp(sgn * d)) / (d * d))
    return IncrementLaw(
        kind=IncrementKind.TABULATED,
        mean=mean,
        variance=max(variance, 0.0),
        cgf_domain=(float(t[0]), float(t[-1])),
        ess_sup=float(ess_sup),
        _interp=interp,
    )


def tabulated_from_csv(path: str, ess_sup: float = math.inf) -> IncrementLaw:
    """Load a tabulated law from a two-column CSV with header ``tau,logphi``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["tau", "logphi"]:
            raise ValueError(f"expected header 'tau,logphi' in {path}, got {header}")
        rows = [(float(r[0]), float(r[1])) for r in reader if r]
    if not rows:
        raise ValueError(f"no data rows in {path}")
    taus, logphis = zip(*rows)
    return tabulated(taus, logphis, ess_sup=ess_sup)


def poisson_window(p: float) -> WindowLaw:
    """Poisson-distributed window lengths with mean ``p``."""
    return WindowLaw(kind=WindowKind.POISSON, p=float(p))


def deterministic_window(p: float, k: Optional[float] = None) -> WindowLaw:
    """Fixed window length ``k`` (defaults to ``p``), reproducing the classical setting."""
    return WindowLaw(kind=WindowKind.DETERMINISTIC, p=float(p), k=k)


def bounded_support_window(p: float, support: Interval = (0.5, 2.0)) -> WindowLaw:
    """Poisson window conditioned on lying inside ``support`` (in units of ``p``).

    Mass outside the interval is removed entirely, so window-length
    fluctuations on the scale of ``p`` are bounded; the mean stays within an
    exponentially small correction of ``p``.
    """
    lo, hi = float(support[0]), float(support[1])
    return WindowLaw(
        kind=WindowKind.BOUNDED_SUPPORT, p=float(p), support_interval=(lo, hi)
    )
