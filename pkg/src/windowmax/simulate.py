"""Reproducible Monte Carlo for maxima of windowed partial sums.

Provides the optimized O(n) trial runners for fixed and random window
lengths, an exact brute-force oracle for small n, log-domain binomial tail
bounds, and a convergence sweep over sequence lengths.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln, logsumexp

from .laws import DomainError, IncrementKind, IncrementLaw, WindowKind, WindowLaw
from .rng import (
    PURPOSE_INCREMENTS,
    PURPOSE_SAMPLE,
    PURPOSE_WINDOWS,
    child_seed,
    generator,
)

__all__ = [
    "ConfigError",
    "LengthError",
    "WindowCapExceeded",
    "WindowCountConvention",
    "SimConfig",
    "TrialRecord",
    "SweepRow",
    "draw_increments",
    "draw_windows",
    "classical_eta",
    "stochastic_eta",
    "run_trials",
    "brute_force_eta",
    "binomial_tail_bounds",
    "binomial_tail_log_bounds",
    "convergence_sweep",
    "TRIAL_CSV_HEADER",
    "SWEEP_CSV_HEADER",
    "trial_csv_row",
    "sweep_csv_row",
]


class ConfigError(ValueError):
    """A simulation configuration is internally inconsistent."""


class LengthError(ValueError):
    """The input stream is too short for a requested window."""


class WindowCapExceeded(OverflowError):
    """A drawn window length exceeded the configured hard cap."""


class WindowCountConvention(enum.Enum):
    """Number of terms in a window of nominal length k.

    ``K_TERMS`` sums k terms starting at i (the form that matches the
    limit equations); ``K_PLUS_1_TERMS`` sums k+1 terms while still
    dividing by k, for sensitivity checks.  The limit constant is the same
    either way; finite-n regressions need one fixed choice.
    """

    K_TERMS = "k_terms"
    K_PLUS_1_TERMS = "k_plus_1_terms"


@dataclass(frozen=True)
class SimConfig:
    """One reproducible simulation: law, window choice, seed, and trial count."""

    n: int
    law: IncrementLaw
    window: Union[int, WindowLaw]
    seed: int = 1
    trials: int = 16
    convention: WindowCountConvention = WindowCountConvention.K_TERMS
    growth_C: Optional[float] = None  # nats; used by sweeps to rescale k or p
    lambda_cap: int = 10**6

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if isinstance(self.window, int):
            k = self.window
            extra = 1 if self.convention is WindowCountConvention.K_PLUS_1_TERMS else 0
            if not (1 <= k <= self.n - extra):
                raise ConfigError(
                    f"fixed window k={k} does not fit n={self.n} "
                    f"under {self.convention.value}"
                )
        elif not isinstance(self.window, WindowLaw):
            raise ConfigError(f"window must be an int or a WindowLaw, got {self.window!r}")

    @property
    def is_classical(self) -> bool:
        return isinstance(self.window, int)


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one simulated trial."""

    seed: int
    n: int
    window_param: float
    eta: float
    argmax_index: int  # 1-based
    max_window_drawn: int
    wall_ms: float


@dataclass(frozen=True)
class SweepRow:
    n: int
    median_eta: float
    q1: float
    q3: float


def draw_increments(law: IncrementLaw, count: int, gen: np.random.Generator) -> np.ndarray:
    """Sample ``count`` i.i.d. increments as float64."""
    if law.kind is IncrementKind.BERNOULLI_PM1:
        return (gen.integers(0, 2, size=count) * 2 - 1).astype(np.float64)
    if law.kind is IncrementKind.GAUSSIAN:
        return gen.standard_normal(count) * math.sqrt(law.variance)
    if law.kind is IncrementKind.CONSTANT:
        return np.full(count, law.value, dtype=np.float64)
    if law.kind is IncrementKind.SQUARED_GAUSSIAN_WEIGHT:
        z = gen.standard_normal(count) * math.sqrt(law.weight_variance)
        return z * z
    raise ConfigError(f"no sampler for increment kind {law.kind}")


def draw_windows(
    wlaw: WindowLaw, count: int, gen: np.random.Generator, cap: int = 10**6
) -> np.ndarray:
    """Sample ``count`` i.i.d. integer window lengths."""
    if wlaw.kind is WindowKind.POISSON:
        lam = gen.poisson(wlaw.p, size=count)
    elif wlaw.kind is WindowKind.DETERMINISTIC:
        k = wlaw.k
        if k != int(k):
            raise ConfigError(f"deterministic window length must be integral, got {k}")
        lam = np.full(count, int(k), dtype=np.int64)
    elif wlaw.kind is WindowKind.BOUNDED_SUPPORT:
        lo, hi = wlaw.support_interval
        lo_l = int(math.ceil(lo * wlaw.p))
        hi_l = int(math.floor(hi * wlaw.p))
        if lo_l > hi_l:
            raise ConfigError(f"support [{lo}, {hi}] x p={wlaw.p} contains no integers")
        lam = gen.poisson(wlaw.p, size=count)
        # redraw out-of-range entries in place; deterministic given the stream
        bad = (lam < lo_l) | (lam > hi_l)
        while bad.any():
            lam[bad] = gen.poisson(wlaw.p, size=int(bad.sum()))
            bad = (lam < lo_l) | (lam > hi_l)
    else:
        raise ConfigError(f"no sampler for window kind {wlaw.kind}")
    if int(lam.max(initial=0)) > cap:
        raise WindowCapExceeded(f"drawn window exceeds the hard cap {cap}")
    return lam.astype(np.int64)


def _trial_id(config: SimConfig, trial: int) -> int:
    return child_seed(config.seed, trial, PURPOSE_SAMPLE)


def classical_eta(config: SimConfig, trial: int = 0) -> TrialRecord:
    """Maximum fixed-window average over one simulated stream of length n."""
    if not config.is_classical:
        raise ConfigError("classical_eta needs a fixed integer window")
    t0 = time.perf_counter()
    k = config.window
    n = config.n
    w = k + 1 if config.convention is WindowCountConvention.K_PLUS_1_TERMS else k
    gen = generator(config.seed, trial, PURPOSE_INCREMENTS)
    xs = draw_increments(config.law, n, gen)
    prefix = np.concatenate(([0.0], np.cumsum(xs)))
    sums = prefix[w:] - prefix[:-w]  # S_i for i = 1 .. n-w+1
    idx = int(np.argmax(sums))
    eta = float(sums[idx]) / k
    wall = (time.perf_counter() - t0) * 1e3
    return TrialRecord(
        seed=_trial_id(config, trial),
        n=n,
        window_param=float(k),
        eta=eta,
        argmax_index=idx + 1,
        max_window_drawn=k,
        wall_ms=wall,
    )


def stochastic_eta(config: SimConfig, trial: int = 0) -> TrialRecord:
    """Maximum random-window partial sum over p, for one simulated stream.

    Window lengths come from their own stream, independent of the
    increment stream; the increment stream extends past n so every window
    starting at i <= n is fully defined.
    """
    if config.is_classical:
        raise ConfigError("stochastic_eta needs a WindowLaw window")
    t0 = time.perf_counter()
    wlaw: WindowLaw = config.window
    n = config.n
    lam = draw_windows(
        wlaw, n, generator(config.seed, trial, PURPOSE_WINDOWS), config.lambda_cap
    )
    extra = 1 if config.convention is WindowCountConvention.K_PLUS_1_TERMS else 0
    max_lam = int(lam.max())
    need = n + max_lam + extra
    gen = generator(config.seed, trial, PURPOSE_INCREMENTS)
    xs = draw_increments(config.law, need, gen)
    prefix = np.concatenate(([0.0], np.cumsum(xs)))
    starts = np.arange(n)
    sums = prefix[starts + lam + extra] - prefix[starts]
    idx = int(np.argmax(sums))
    eta = float(sums[idx]) / wlaw.p
    wall = (time.perf_counter() - t0) * 1e3
    return TrialRecord(
        seed=_trial_id(config, trial),
        n=n,
        window_param=wlaw.p,
        eta=eta,
        argmax_index=idx + 1,
        max_window_drawn=max_lam,
        wall_ms=wall,
    )


def run_trials(config: SimConfig) -> List[TrialRecord]:
    """Run all trials of a config; trial t uses the (seed, t, purpose) streams."""
    op = classical_eta if config.is_classical else stochastic_eta
    return [op(config, trial) for trial in range(config.trials)]


def brute_force_eta(
    stream: Sequence[float],
    windows: Union[int, Sequence[int]],
    p: float,
) -> float:
    """Direct evaluation of every windowed sum; the oracle for the fast paths.

    Sums run left to right with no prefix trick, so the result is exact up
    to floating-point associativity (bit-exact for integer-valued
    increments).
    """
    stream = list(stream)
    n = len(stream)
    if isinstance(windows, int):
        w = windows
        if w < 0 or w > n:
            raise LengthError(f"window {w} does not fit stream of length {n}")
        per_start = [w] * (n - w + 1)
    else:
        per_start = list(windows)
        for i, w in enumerate(per_start):
            if i + w > n:
                raise LengthError(
                    f"window {w} at start {i + 1} overruns stream of length {n}"
                )
    best = -math.inf
    for i, w in enumerate(per_start):
        s = 0.0
        for v in stream[i : i + w]:
            s += v
        if s > best:
            best = s
    return best / p


# Sandwich constants for the +-1 tail envelope 2^{-l(1 - h((1+x)/2))}/sqrt(l),
# calibrated by scripts/calibrate_tail_constants.py over l in [1, 1e4] and
# threshold fractions x in [0.05, 0.95], then widened by a 1.1x margin.
TAIL_LOWER_CONST = 0.0535
TAIL_UPPER_CONST = 8.9117


def binomial_tail_log_bounds(l: int, threshold: float) -> Tuple[float, float, float]:
    """Natural-log sandwich and exact tail of Pr{sum of l +-1 terms >= threshold}.

    The log domain keeps the comparison meaningful where the linear values
    underflow (large l with a high threshold).
    """
    if l < 1:
        raise DomainError(f"l must be >= 1, got {l}")
    if abs(threshold) > l:
        raise DomainError(f"|threshold| = {abs(threshold)} exceeds l = {l}")
    j_min = int(math.ceil((l + threshold) / 2.0))
    js = np.arange(j_min, l + 1)
    log_terms = gammaln(l + 1) - gammaln(js + 1) - gammaln(l - js + 1)
    log_exact = float(logsumexp(log_terms) - l * math.log(2.0))
    t = 0.5 * (1.0 + threshold / l)
    if t in (0.0, 1.0):
        h = 0.0
    else:
        h = -t * math.log2(t) - (1.0 - t) * math.log2(1.0 - t)
    log_envelope = -l * (1.0 - h) * math.log(2.0) - 0.5 * math.log(l)
    return (
        math.log(TAIL_LOWER_CONST) + log_envelope,
        math.log(TAIL_UPPER_CONST) + log_envelope,
        log_exact,
    )


def binomial_tail_bounds(l: int, threshold: float) -> Tuple[float, float, float]:
    """Sandwich (lower, upper) and exact value of the +-1 binomial tail.

    The exact tail is computed with log-domain binomial coefficients; the
    bounds scale the entropy envelope by the calibrated constants.
    """
    log_lower, log_upper, log_exact = binomial_tail_log_bounds(l, threshold)
    return math.exp(log_lower), math.exp(log_upper), math.exp(log_exact)


def _window_for(config: SimConfig, n: int, C: float) -> Union[int, WindowLaw]:
    if config.is_classical:
        return int(math.floor(C * math.log(n)))
    return replace(config.window, p=C * math.log(n))


def convergence_sweep(base: SimConfig, n_grid: Sequence[int]) -> List[SweepRow]:
    """Medians and interquartile ranges of eta along an increasing n grid.

    The window scale is recomputed at each n as floor(C log n) (fixed
    windows) or C log n (random windows); C comes from ``base.growth_C`` or
    is inferred from the base window and n.  Each grid point uses its own
    derived seed so streams at different n are independent.
    """
    if any(b >= a for a, b in zip(n_grid[1:], n_grid)):
        raise ConfigError("n_grid must be strictly increasing")
    if base.growth_C is not None:
        C = base.growth_C
    elif base.is_classical:
        C = base.window / math.log(base.n)
    else:
        C = base.window.p / math.log(base.n)
    rows = []
    for n in n_grid:
        cfg = replace(
            base,
            n=n,
            window=_window_for(base, n, C),
            seed=child_seed(base.seed, n, PURPOSE_SAMPLE),
        )
        etas = [rec.eta for rec in run_trials(cfg)]
        rows.append(
            SweepRow(
                n=n,
                median_eta=float(np.median(etas)),
                q1=float(np.percentile(etas, 25)),
                q3=float(np.percentile(etas, 75)),
            )
        )
    return rows


TRIAL_CSV_HEADER = "seed,n,window_param,eta,argmax_index,max_window,wall_ms"
SWEEP_CSV_HEADER = "n,median_eta,q1,q3"


def trial_csv_row(rec: TrialRecord) -> str:
    return (
        f"{rec.seed},{rec.n},{rec.window_param!r},{rec.eta!r},"
        f"{rec.argmax_index},{rec.max_window_drawn},{rec.wall_ms!r}"
    )


def sweep_csv_row(row: SweepRow) -> str:
    return f"{row.n},{row.median_eta!r},{row.q1!r},{row.q3!r}"
