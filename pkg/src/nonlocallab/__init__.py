"""Numerical laboratory for non-local parabolic integro-differential operators.

P[u] = sum_ij a_ij d2u/dx_i dx_j + sum_i b_i du/dx_i + f(x, t, u, Ju) - du/dt

with Ju the convolution of u against a non-negative integrable kernel.  The
package provides kernels and their moments, truncated grids with far-field
extension, an IMEX initial-boundary-value solver, machine checks of minimum
and comparison principles, closed-form fundamental solutions with Gaussian
envelope bounds, and a scenario-driven CLI.
"""

from .errors import (
    AsymmetricDiffusionError,
    BoundFailedError,
    BoundViolatedError,
    ConfigError,
    DimMismatchError,
    DivergentMomentError,
    InternalInconsistencyError,
    NegativeKernelError,
    NoExceedanceError,
    NonFiniteReactionError,
    NonFiniteSampleError,
    NonlocalLabError,
    NuInsufficientError,
    PadInsufficientError,
    QuadratureUnderresolvedError,
    SolverSingularError,
    StepDivergedError,
    TimeOrderError,
    UnstableTimestepError,
    UnsupportedFamilyError,
)
from .fundsol import (
    ConstCoeffParams,
    GammaBoundFit,
    GronwallVerdict,
    chapman_kolmogorov_gap,
    delta_family_check,
    derive_envelope_constants,
    discrete_gronwall,
    gamma_adjoint_eval,
    gamma_eval,
    gamma_gradient,
    gaussian_bound_check,
    gronwall_rate_constant,
    integral_representation_check,
    mass_integral,
    ordered_gap_series,
)
from .grid import (
    BoundaryTrace,
    Field,
    Grid,
    SpaceTimeField,
    convolve,
    discretize,
    field_to_csv,
    parabolic_boundary,
    spacetime_to_csv,
)
from .kernels import (
    DIVERGENT,
    JQuotientReport,
    KernelCertificate,
    KernelSpec,
    MomentReport,
    QuadratureConfig,
    classify_kernel,
    effective_radius,
    eval_kernel,
    jquotient_bound_check,
    jquotient_field,
    kernel_norms,
)
from .operator import (
    DiffusionCoefficients,
    LinearCoefficients,
    OperatorSpec,
    ParabolicityReport,
    ReactionConstantsReport,
    ReactionSpec,
    apply_P_residual,
    apply_spatial_L,
    check_parabolicity_growth,
    estimate_reaction_constants,
    factorize_difference,
    make_operator,
    registry_names,
)
from .principles import (
    HOLDS,
    HYPOTHESES_FAIL,
    THEOREM_APPLIES,
    VIOLATED,
    AuxiliaryTransform,
    ComparisonVerdict,
    CounterexampleConfig,
    CounterexampleReport,
    HypothesisReport,
    InvariantRegionConfig,
    InvariantRegionReport,
    StrongMinimumVerdict,
    auxiliary_transform,
    formulaic_nu,
    invariant_region_check,
    nonlocal_front_depletion,
    reproduce_counterexample,
    strong_minimum_check,
    verify_comparison,
    verify_weak_minimum,
)
from .profiles import front, front_value_integral, make_profile, smoothstep
from .solver import (
    ConvergenceRow,
    SolverConfig,
    convergence_study,
    exact_heat_reference,
    solve_ibvp,
)

__version__ = "1.0.0"
