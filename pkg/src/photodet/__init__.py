"""Simulator and analytic toolkit for single-photon detection with
molecule-gated amplification.

A single photon leaks from a cavity, is absorbed by a three-level molecule
whose shelved state switches on a driven amplifier mode, and the amplifier's
output field carries the macroscopic signal. The package propagates the
cascaded master equation in both pictures, evaluates the two-time
correlations behind the collected signal, and checks everything against
closed-form results.
"""

from .operators import (
    CompositeSpace,
    OperatorMatrix,
    StateMatrix,
    annihilation,
    creation,
    number,
    projector,
    flip,
    embed,
    hs_inner,
    commutator,
    anticommutator,
    basis_state,
)
from .model import (
    ModelParams,
    LindbladGenerator,
    model_space,
    absorber_space,
    build_generator,
    build_absorber_generator,
    f_tilde,
)
from .evolution import (
    TimeSeries,
    SteadyStateResult,
    KBasis,
    IntegrationError,
    TruncationError,
    time_grid,
    evolve_state,
    evolve_observable,
    expectation_series,
    k_coefficients,
    k_coefficient_series,
    amplitude_term,
    detect_steady_state,
)
from .correlations import (
    CorrelationKernel,
    SignalCurve,
    GainDecomposition,
    two_time_correlation,
    drive_correlation_kernel,
    n_d_kernel,
    n_d_flux,
    gain_decomposition,
)
from .analytic import (
    SpectralFunction,
    p_abs,
    p_abs_maximizer,
    transmission,
    reflection,
    photon_spectrum,
    transmission_profile,
    reflection_profile,
    emission_profile,
    p_abs_overlap,
    c_steady,
    nd_slope,
    gain,
)

__version__ = "0.1.0"
