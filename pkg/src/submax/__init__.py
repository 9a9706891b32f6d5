"""Stochastic submodular maximization via continuous greedy ascent.

Monotone stochastic submodular objectives under uniform or partition
matroid constraints, optimized by the stochastic continuous greedy
loop with interchangeable gradient estimators: Monte-Carlo sampling,
a deterministic Taylor-surrogate polynomial estimator, and exact
enumeration at desk scale.
"""

from ._kernels import backend_name
from .complement import ComplementPolynomial
from .estimators import (
    EstimatorConfig,
    GradientVector,
    exact_gradient,
    polynomial_gradient,
    sample_gradient,
)
from .matroids import Matroid
from .objectives import (
    CacheNetworkObjective,
    CacheRequest,
    FacilityLocationObjective,
    InfluenceObjective,
    ScalarTaylor,
    SummarizationObjective,
    taylor_expansion,
)
from .oracle import (
    EXACT_LIMIT,
    OptReport,
    brute_force_opt,
    exact_extension,
    greedy_baseline,
    verify_bias,
)
from .polynomials import (
    BudgetExceededError,
    GeneralPolynomial,
    Monomial,
    MultilinearPolynomial,
    multilinearize,
)
from .rngs import SeedStreams
from .rounding import ConvexDecomposition, swap_round
from .scg import SCGConfig, Trajectory, estimate_utility, run_scg

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "CacheNetworkObjective",
    "CacheRequest",
    "ComplementPolynomial",
    "ConvexDecomposition",
    "EstimatorConfig",
    "EXACT_LIMIT",
    "FacilityLocationObjective",
    "GeneralPolynomial",
    "GradientVector",
    "InfluenceObjective",
    "Matroid",
    "Monomial",
    "MultilinearPolynomial",
    "OptReport",
    "ScalarTaylor",
    "SCGConfig",
    "SeedStreams",
    "SummarizationObjective",
    "Trajectory",
    "backend_name",
    "brute_force_opt",
    "estimate_utility",
    "exact_extension",
    "exact_gradient",
    "greedy_baseline",
    "multilinearize",
    "polynomial_gradient",
    "run_scg",
    "sample_gradient",
    "swap_round",
    "taylor_expansion",
    "verify_bias",
]
