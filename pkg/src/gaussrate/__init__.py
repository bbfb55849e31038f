"""Entropy rates of stationary vector-valued Gaussian processes.

Exact finite-horizon block-Toeplitz entropies cross-validated against the
asymptotic spectral integral given by the block Szego limit, for Shannon
and Renyi orders.  All values are in nats; frequencies are radians.
"""

from .blocktoeplitz import (
    BlockToeplitzMatrix,
    FiniteEntropy,
    QuadFormCheck,
    SIZE_LIMIT,
    assemble,
    finite_entropy,
    quadratic_form_expectation_check,
    renyi_shannon_offset,
)
from .errors import (
    BadAlpha,
    BelowFloor,
    DomainError,
    GaussrateError,
    InvalidInput,
    InvalidSpec,
    LagOutOfRange,
    NoConvergence,
    NotPositiveDefinite,
    SingularDensity,
    SizeLimit,
)
from .estimate import (
    LagWindow,
    TimeSeries,
    default_window,
    estimated_spec,
    read_timeseries,
    sample_autocovariance,
    simulate,
)
from .matfun import (
    DEFAULT_FLOOR,
    EigenSpectrum,
    assert_psd,
    gaussian_integral_check,
    logdet_spd,
    trace_f_hermitian,
)
from .process import (
    VAR1,
    VMA,
    Estimated,
    Explicit,
    MatrixAutocovariance,
    ProcessSpec,
    SpectralDensity,
    White,
    lyapunov_solve,
)
from .szego import (
    ConvergenceTable,
    EntropyReport,
    convergence_study,
    entropy_rate,
    spectral_integral,
    szego_functional,
)

__version__ = "0.1.0"
