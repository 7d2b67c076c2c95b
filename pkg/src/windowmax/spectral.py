"""Sparse weighted random matrices: sampling, spectral norms, row statistics.

Samples symmetric N x N matrices whose entries are Bernoulli(p/N) edge
indicators times i.i.d. symmetric weights, scaled by 1/sqrt(p), computes
the spectral norm by power iteration on the squared matrix, and the
row-sum statistics whose maximum is a lower bound for the squared norm.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .laws import IncrementLaw, constant, poisson_window, squared_gaussian_weight
from .limits import SolveResult, stochastic_alpha
from .rng import (
    PURPOSE_EDGES,
    PURPOSE_SAMPLE,
    PURPOSE_START_VECTOR,
    PURPOSE_WEIGHTS,
    child_seed,
    generator,
)

__all__ = [
    "DimensionError",
    "SamplingError",
    "WeightKind",
    "WeightLaw",
    "SparseSymmetricSample",
    "NormEstimate",
    "SpectralReport",
    "RegimeRow",
    "squared_increment_law",
    "sample_weighted_adjacency",
    "spectral_norm",
    "row_statistics",
    "spectral_report",
    "regime_sweep",
    "alpha_hat_target",
    "SPECTRAL_CSV_HEADER",
    "REGIME_CSV_HEADER",
    "spectral_csv_row",
    "regime_csv_row",
]


class DimensionError(ValueError):
    """Matrix dimension or density parameters are out of range."""


class SamplingError(RuntimeError):
    """The sampled edge count fell outside its 5-sigma binomial band."""


class WeightKind(enum.Enum):
    BERNOULLI = "bernoulli"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class WeightLaw:
    """Symmetric weight distribution with standard deviation ``v``."""

    kind: WeightKind = WeightKind.BERNOULLI
    v: float = 1.0

    def __post_init__(self) -> None:
        if not self.v > 0:
            raise ValueError(f"weight scale v must be positive, got {self.v}")


def squared_increment_law(wl: WeightLaw) -> IncrementLaw:
    """Increment law of the squared weights, used for the limit-constant target."""
    if wl.kind is WeightKind.BERNOULLI:
        return constant(wl.v * wl.v)
    return squared_gaussian_weight(wl.v * wl.v)


@dataclass(frozen=True)
class SparseSymmetricSample:
    """One sampled matrix, stored as CSR with entries already scaled by 1/sqrt(p)."""

    N: int
    p: float
    seed: int
    weight_law: WeightLaw
    scale: float
    matrix: sp.csr_matrix
    upper_rows: np.ndarray  # i <= j coordinate list of the sampled triangle
    upper_vals: np.ndarray  # scaled values at those coordinates

    @property
    def nnz(self) -> int:
        return self.matrix.nnz


def sample_weighted_adjacency(
    N: int,
    p: float,
    weight_law: WeightLaw = WeightLaw(),
    seed: int = 0,
    include_diagonal: bool = False,
) -> SparseSymmetricSample:
    """Sample the upper triangle with edge probability p/N and mirror it.

    Edge indicators and weights come from independent streams.  The default
    excludes the diagonal, matching the simple-graph model; loops can be
    enabled with ``include_diagonal``.
    """
    if N < 1:
        raise DimensionError(f"N must be >= 1, got {N}")
    if not (0.0 < p <= N):
        raise DimensionError(f"need 0 < p <= N, got p={p}, N={N}")
    q = p / N
    iu, ju = np.triu_indices(N, k=0 if include_diagonal else 1)
    m = len(iu)
    edge_gen = generator(seed, 0, PURPOSE_EDGES)
    mask = edge_gen.random(m) < q
    count = int(mask.sum())
    sigma = math.sqrt(m * q * (1.0 - q))
    if abs(count - m * q) > 5.0 * sigma + 1e-12:
        raise SamplingError(
            f"sampled {count} edges, outside 5 sigma of the binomial mean {m * q:.1f}"
        )
    iu, ju = iu[mask], ju[mask]
    weight_gen = generator(seed, 0, PURPOSE_WEIGHTS)
    if weight_law.kind is WeightKind.BERNOULLI:
        unit = (weight_gen.integers(0, 2, size=count) * 2 - 1).astype(np.float64)
    else:
        unit = weight_gen.standard_normal(count)
    vals = (weight_law.v / math.sqrt(p)) * unit
    off = iu != ju
    rows = np.concatenate([iu, ju[off]])
    cols = np.concatenate([ju, iu[off]])
    data = np.concatenate([vals, vals[off]])
    matrix = sp.csr_matrix((data, (rows, cols)), shape=(N, N))
    matrix.sort_indices()
    return SparseSymmetricSample(
        N=N,
        p=p,
        seed=seed,
        weight_law=weight_law,
        scale=1.0 / math.sqrt(p),
        matrix=matrix,
        upper_rows=iu,
        upper_vals=vals,
    )


@dataclass(frozen=True)
class NormEstimate:
    norm: float
    iterations: int
    residual: float
    converged: bool


def spectral_norm(
    sample: SparseSymmetricSample, tol: float = 1e-10, max_iter: int = 50000
) -> NormEstimate:
    """Largest |eigenvalue| via power iteration on the squared matrix.

    Iterating on the square resolves the +-lambda ambiguity of symmetric
    spectra.  The stop rule extrapolates the geometric tail of the Rayleigh
    increments, so near-degenerate top pairs do not stall the estimate; the
    residual reported is ||A^2 v - rho v|| / rho at exit.
    """
    A = sample.matrix
    if A.nnz == 0:
        return NormEstimate(norm=0.0, iterations=0, residual=0.0, converged=True)
    v = generator(sample.seed, 0, PURPOSE_START_VECTOR).standard_normal(sample.N)
    v /= np.linalg.norm(v)
    rho_prev = 0.0
    d_prev = math.inf
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        u = A @ (A @ v)
        rho = float(v @ u)
        norm_u = float(np.linalg.norm(u))
        if norm_u == 0.0:
            return NormEstimate(norm=0.0, iterations=iterations, residual=0.0, converged=True)
        d = rho - rho_prev
        if iterations > 1:
            if d <= 0.0:
                converged = True  # increments exhausted at float precision
            else:
                r = d / d_prev if d_prev > 0 else 0.0
                if r < 1.0 and d * r / (1.0 - r) <= tol * max(rho, 1e-300):
                    converged = True
        rho_prev, d_prev = rho, d
        v = u / norm_u
        if converged:
            break
    rho = max(rho_prev, 0.0)
    residual = float(np.linalg.norm(A @ (A @ v) - rho * v) / rho) if rho > 0 else 0.0
    return NormEstimate(
        norm=math.sqrt(rho),
        iterations=iterations,
        residual=residual,
        converged=converged,
    )


def row_statistics(sample: SparseSymmetricSample) -> Tuple[float, float]:
    """(H, H_hat): max over rows of the squared-entry row sums, full and upper."""
    if sample.nnz == 0:
        return 0.0, 0.0
    sq = sample.matrix.copy()
    sq.data = sq.data * sq.data
    T = np.asarray(sq.sum(axis=1)).ravel()
    T_hat = np.bincount(
        sample.upper_rows, weights=sample.upper_vals**2, minlength=sample.N
    )
    return float(T.max()), float(T_hat.max())


@dataclass(frozen=True)
class SpectralReport:
    """Norm and row statistics of one sample, with the lower-bound check."""

    seed: int
    N: int
    p: float
    norm: float
    H: float
    H_hat: float
    lower_bound_ok: bool
    iterations: int
    residual: float
    converged: bool = True


def spectral_report(
    sample: SparseSymmetricSample, tol: float = 1e-10, max_iter: int = 50000
) -> SpectralReport:
    est = spectral_norm(sample, tol=tol, max_iter=max_iter)
    H, H_hat = row_statistics(sample)
    return SpectralReport(
        seed=sample.seed,
        N=sample.N,
        p=sample.p,
        norm=est.norm,
        H=H,
        H_hat=H_hat,
        lower_bound_ok=est.norm**2 >= H - 1e-6,
        iterations=est.iterations,
        residual=est.residual,
        converged=est.converged,
    )


@dataclass(frozen=True)
class RegimeRow:
    regime: str  # "dense" or "sparse"
    gamma: float
    N: int
    p: float
    median_norm: float
    trials: int


def regime_sweep(
    N: int,
    gammas: Sequence[float],
    weight_law: WeightLaw = WeightLaw(),
    trials: int = 16,
    seed: int = 0,
) -> List[RegimeRow]:
    """Median norms at densities (log N)^(1 +- gamma) for each gamma.

    Above the log threshold the norm settles toward twice the weight scale;
    below it the norm grows with N.
    """
    rows = []
    logn = math.log(N)
    for gamma in gammas:
        if not (0.0 < gamma < 1.0):
            raise ValueError(f"gamma must be in (0, 1), got {gamma}")
        for regime, expo in (("dense", 1.0 + gamma), ("sparse", 1.0 - gamma)):
            p = logn**expo
            norms = []
            for t in range(trials):
                s = sample_weighted_adjacency(
                    N, p, weight_law, seed=child_seed(seed, t, PURPOSE_SAMPLE)
                )
                norms.append(spectral_norm(s).norm)
            rows.append(
                RegimeRow(
                    regime=regime,
                    gamma=gamma,
                    N=N,
                    p=p,
                    median_norm=float(np.median(norms)),
                    trials=trials,
                )
            )
    return rows


def alpha_hat_target(weight_law: WeightLaw, C: float, tol: float = 1e-8) -> SolveResult:
    """Limit constant bounding lim H(N, C log N): the random-window constant
    of the squared-weight increments with Poisson window-length rate."""
    return stochastic_alpha(squared_increment_law(weight_law), poisson_window(1.0), C, tol)


SPECTRAL_CSV_HEADER = "seed,N,p,norm,H,H_hat,lower_bound_ok,iterations,residual"
REGIME_CSV_HEADER = "regime,gamma,N,p,median_norm,trials"


def spectral_csv_row(rep: SpectralReport) -> str:
    ok = "true" if rep.lower_bound_ok else "false"
    return (
        f"{rep.seed},{rep.N},{rep.p!r},{rep.norm!r},{rep.H!r},{rep.H_hat!r},"
        f"{ok},{rep.iterations},{rep.residual!r}"
    )


def regime_csv_row(row: RegimeRow) -> str:
    return (
        f"{row.regime},{row.gamma!r},{row.N},{row.p!r},{row.median_norm!r},{row.trials}"
    )
