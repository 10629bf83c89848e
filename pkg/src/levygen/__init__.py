"""Three equivalent realizations of a Levy generator, with cross-checks.

The generator of a one-dimensional Levy process is computed three ways --
as a compensated jump integral, as a derivative-convolution-derivative
composition, and as a Fourier multiplier -- and the routes are verified
against each other, against closed forms, and against Monte-Carlo
semigroup estimates.
"""

from .errors import (
    ConfigError,
    DomainError,
    GridError,
    IntegrabilityViolationError,
    InvalidMeasureError,
    KernelIntegrabilityError,
    LevygenError,
    NotSimulableError,
    NumericalFailureError,
    ParameterError,
    ResolutionError,
    SupportError,
)
from .generator_ops import (
    FAMILY_NAMES,
    Grid,
    SampledFunction,
    TestFunctionFamily,
    apply_convolution,
    apply_ito,
    apply_spectral,
    differentiate,
    make_family,
    sample_family,
)
from .levy_model import (
    PRESET_SPECS,
    ClosedForms,
    LevyMeasure,
    LevyTriplet,
    ProcessPreset,
    ValidationReport,
    char_exponent,
    make_preset,
    preset,
    preset_parameters,
    stable_sigma_eff,
    validate_triplet,
)
from .tail_kernels import (
    AssembledKernel,
    KernelFunction,
    TailFunction,
    assemble_kernel,
    cell_averaged_weights,
    gamma_correction,
    k_minus,
    k_plus,
    kernel_function,
    mu_minus,
    mu_plus,
    tail_function,
)
from .verification import (
    IncrementSampler,
    VerificationReport,
    check_increment_axioms,
    check_limit_theorems,
    check_monotonicity,
    compare_forms,
    mc_semigroup_check,
    simulate_increment,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "LevygenError",
    "InvalidMeasureError",
    "ParameterError",
    "DomainError",
    "SupportError",
    "GridError",
    "ResolutionError",
    "NumericalFailureError",
    "KernelIntegrabilityError",
    "IntegrabilityViolationError",
    "NotSimulableError",
    "ConfigError",
    # levy_model
    "ClosedForms",
    "LevyMeasure",
    "LevyTriplet",
    "ProcessPreset",
    "ValidationReport",
    "PRESET_SPECS",
    "char_exponent",
    "make_preset",
    "preset",
    "preset_parameters",
    "stable_sigma_eff",
    "validate_triplet",
    # tail_kernels
    "TailFunction",
    "KernelFunction",
    "AssembledKernel",
    "mu_minus",
    "mu_plus",
    "k_minus",
    "k_plus",
    "gamma_correction",
    "tail_function",
    "kernel_function",
    "assemble_kernel",
    "cell_averaged_weights",
    # generator_ops
    "Grid",
    "SampledFunction",
    "TestFunctionFamily",
    "FAMILY_NAMES",
    "make_family",
    "sample_family",
    "differentiate",
    "apply_ito",
    "apply_convolution",
    "apply_spectral",
    # verification
    "VerificationReport",
    "IncrementSampler",
    "check_limit_theorems",
    "check_monotonicity",
    "compare_forms",
    "simulate_increment",
    "mc_semigroup_check",
    "check_increment_axioms",
]
