#!/usr/bin/env python3
"""Recompute the sandwich constants for the +-1 binomial tail envelope.

Sweeps the ratio exact / envelope over window lengths l in [1, 1e4] and
threshold fractions x in [0, 1], prints the extremes, and the values to
freeze into windowmax.simulate (widened by a 1.1x margin on both sides).
"""

import math

import numpy as np
from scipy.special import gammaln, logsumexp


def log_exact_tail(l: int, threshold: float) -> float:
    j_min = int(math.ceil((l + threshold) / 2.0))
    js = np.arange(j_min, l + 1)
    log_terms = gammaln(l + 1) - gammaln(js + 1) - gammaln(l - js + 1)
    return float(logsumexp(log_terms) - l * math.log(2.0))


def log_envelope(l: int, threshold: float) -> float:
    t = 0.5 * (1.0 + threshold / l)
    if t in (0.0, 1.0):
        h = 0.0
    else:
        h = -t * math.log2(t) - (1.0 - t) * math.log2(1.0 - t)
    return -l * (1.0 - h) * math.log(2.0) - 0.5 * math.log(l)


def main() -> None:
    ls = sorted(
        set(range(1, 101))
        | {1000}
        | {int(round(v)) for v in np.geomspace(100, 10_000, 120)}
    )
    # the 1/sqrt(l) prefactor is only right for threshold fractions bounded
    # away from 0 and 1: at x = 1 the tail is a single lattice point (ratio
    # ~ sqrt(l)) and at x = 0 it is order 1 (ratio ~ sqrt(l)/2), so no fixed
    # constants cover those edges; calibrate over [0.05, 0.95], a superset
    # of every fraction the sandwich is used with
    xs = np.arange(0.05, 0.9501, 0.025)
    lo, hi = math.inf, -math.inf
    arg_lo = arg_hi = None
    for l in ls:
        for x in xs:
            threshold = x * l
            ratio = math.exp(log_exact_tail(l, threshold) - log_envelope(l, threshold))
            if ratio < lo:
                lo, arg_lo = ratio, (l, x)
            if ratio > hi:
                hi, arg_hi = ratio, (l, x)
    print(f"min ratio {lo:.6f} at (l, x) = {arg_lo}")
    print(f"max ratio {hi:.6f} at (l, x) = {arg_hi}")
    print(f"freeze: TAIL_LOWER_CONST = {lo / 1.1:.4f}")
    print(f"freeze: TAIL_UPPER_CONST = {hi * 1.1:.4f}")


if __name__ == "__main__":
    main()
