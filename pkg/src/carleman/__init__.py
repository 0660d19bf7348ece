"""Truncated Carleman lifting of polynomial ODE systems.

The package turns a quadratic or cubic system x' = F1·x + Fd·x^{⊗d} into
the linear dynamics of its tensor powers, truncated at level N, and
provides the spectral quantities (resonance gap Δ, eigenbasis condition
number κ₁, convergence rates) that govern how fast the truncation error
decays with N — together with the benchmark models, a theory-verification
layer, and the ``expcli`` experiment harness.
"""

from .dynamics import (
    CarlemanOperator,
    PolynomialSystem,
    TrajectoryRecord,
    TruncationError,
    UnstableStepError,
    apply_carleman,
    default_step_size,
    integrate_lifted,
    integrate_reference,
    truncation_error,
)
from .linalg import (
    DefectiveMatrixError,
    EigenDecomposition,
    NonConvergenceError,
    condition_number_1,
    eigendecompose,
    induced_norm,
    spectral_radius,
)
from .models import (
    FirstIntegralViolation,
    ModelConfig,
    ReducedSystem,
    build_bernoulli,
    build_burgers,
    build_fpu,
    build_from_config,
    build_kdv,
    reduce_first_integral,
)
from .spectral import (
    CombinatorialBudgetError,
    RateReport,
    ResonanceWitness,
    SpectralReport,
    compute_rates,
    error_bound,
    resonance_delta,
    spectral_report,
)
from .tensor import (
    BlockVector,
    BudgetExceededError,
    SparseCoupling,
    apply_kronecker_sum,
    apply_transfer,
    lift,
    resolve_budget_bytes,
)
from .theory import (
    LiftedEigenvector,
    ResonantShiftError,
    build_eigenvector,
    build_resolvent,
    catalan_product_sum,
    materialize_carleman,
    verify_block_bounds,
    verify_theory_suite,
    xi_recursion,
)

__version__ = "0.1.0"

__all__ = [
    "BlockVector",
    "BudgetExceededError",
    "CarlemanOperator",
    "CombinatorialBudgetError",
    "DefectiveMatrixError",
    "EigenDecomposition",
    "FirstIntegralViolation",
    "LiftedEigenvector",
    "ModelConfig",
    "NonConvergenceError",
    "PolynomialSystem",
    "RateReport",
    "ReducedSystem",
    "ResonanceWitness",
    "ResonantShiftError",
    "SparseCoupling",
    "SpectralReport",
    "TrajectoryRecord",
    "TruncationError",
    "UnstableStepError",
    "apply_carleman",
    "apply_kronecker_sum",
    "apply_transfer",
    "build_bernoulli",
    "build_burgers",
    "build_eigenvector",
    "build_fpu",
    "build_from_config",
    "build_kdv",
    "build_resolvent",
    "catalan_product_sum",
    "compute_rates",
    "condition_number_1",
    "default_step_size",
    "eigendecompose",
    "error_bound",
    "induced_norm",
    "integrate_lifted",
    "integrate_reference",
    "lift",
    "materialize_carleman",
    "reduce_first_integral",
    "resolve_budget_bytes",
    "resonance_delta",
    "spectral_radius",
    "spectral_report",
    "truncation_error",
    "verify_block_bounds",
    "verify_theory_suite",
    "xi_recursion",
]
