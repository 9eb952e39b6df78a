"""Sampling-type imaging of interior Robin interfaces on the unit disk."""
from .estimators import FactorizationImager, LinearSamplingImager
from .exceptions import (
    ConfigError,
    DegenerateConfigurationError,
    DomainError,
    EmptyMapError,
    NonGenericTLSError,
    RobinEITError,
    ZeroOperatorError,
)
from .forward import (
    BoundaryGrid,
    KernelSpec,
    MediumConfig,
    ModeCoefficients,
    OperatorMatrix,
    apply_noise,
    assemble_operator,
    evaluate_potential,
    kernel_coefficient,
    radial_derivative,
    solve_mode,
)
from .greens import (
    GreensTrace,
    SamplingPoint,
    greens_trace_series,
    poisson_kernel,
    robin_greens_trace,
)
from .imaging import (
    ImagingGrid,
    IndicatorMap,
    ReconMetrics,
    lsm_indicator,
    normalize_map,
    rfm_indicator,
    score,
)
from .regularize import (
    AugmentedSpectrum,
    FilterSpec,
    SpectralSystem,
    augmented_spectrum,
    decompose,
    filter_value,
    filtered_solve,
    picard_partial_sums,
)

__version__ = "0.1.0"
