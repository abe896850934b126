"""HOM interference of coherent-state wave-packets under dispersive manipulation.

Simulates the coincidence dip of a fiber Hong-Ou-Mandel interferometer fed
with attenuated mode-locked laser pulses, exactly (Gaussian closed forms) and
numerically (spectral quadrature), generates finite-statistics synthetic
scans, and inverts noisy dips back to the physics: the intrinsic pulse width
of a dispersively broadened source and the second-order dispersion
coefficient of an unbalanced element.
"""

from .errors import (
    ConfigError,
    DipNotFoundError,
    FitConvergenceError,
    GridMismatchError,
    GridTooNarrowError,
    HomsimError,
    InfeasibleWidthError,
    MonteCarloError,
)
from .experiment import (
    HomCurve,
    ScanConfig,
    default_delay_grid,
    expected_curve,
    jitter_convolved_profile,
    sample_counts,
    singles_rates,
)
from .fitting import (
    DispersionEstimate,
    FitResult,
    dispersion_from_dip,
    fit_gaussian_dip,
    gaussian_dip_model,
    monte_carlo_fit,
    pulse_width_from_dip,
)
from .hom import (
    ArmConfig,
    CoincidenceTerms,
    DipParameters,
    alpha_of_arms,
    baseline_rate,
    coincidence_probability_gaussian,
    coincidence_probability_numeric,
    coincidence_rate_general,
    delta_tau_of_arms,
    dip_fwhm,
    dip_visibility,
    extract_alpha_from_fwhm,
    overlap_integral,
    term_decomposition,
)
from .units import (
    C_NM_PER_PS,
    FWHM_FACTOR,
    QUADRATIC_PHASE_FACTOR,
    beta2_to_dispersion_parameter,
    carrier_frequency,
    dispersion_parameter_to_beta2,
    fwhm_to_t0,
    t0_to_fwhm,
)
from .wavepacket import (
    DispersiveElement,
    FrequencyGrid,
    GaussianPulse,
    SpectralAmplitude,
    TemporalProfile,
    apply_dispersion,
    broadened_width_closed_form,
    gaussian_spectral_amplitude,
    temporal_field,
    to_temporal_profile,
)

__version__ = "0.1.0"
