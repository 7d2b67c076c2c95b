"""Limit constants and Monte Carlo experiments for maxima of windowed partial sums."""

__version__ = "0.1.0"

from .laws import (
    DomainError,
    IncrementKind,
    IncrementLaw,
    WindowKind,
    WindowLaw,
    bernoulli_pm1,
    bounded_support_window,
    constant,
    deterministic_window,
    gaussian,
    poisson_window,
    squared_gaussian_weight,
    tabulated,
    tabulated_from_csv,
)
from .rates import (
    RateProfile,
    cgf,
    cramer_D,
    entropy_h,
    g,
    legendre,
    rate_f,
    rate_profile,
    upper_cramer_D,
    window_scaled_cgf,
)
from .limits import (
    CapReached,
    InfeasibleError,
    InvalidC,
    SolveResult,
    classical_alpha,
    classical_alpha_bernoulli,
    inner_min,
    objective,
    stochastic_alpha,
    stochastic_alpha_bernoulli,
)
from .simulate import (
    SimConfig,
    TrialRecord,
    WindowCountConvention,
    binomial_tail_bounds,
    brute_force_eta,
    classical_eta,
    convergence_sweep,
    run_trials,
    stochastic_eta,
)
from .spectral import (
    SparseSymmetricSample,
    SpectralReport,
    WeightKind,
    WeightLaw,
    alpha_hat_target,
    regime_sweep,
    row_statistics,
    sample_weighted_adjacency,
    spectral_norm,
    spectral_report,
)
