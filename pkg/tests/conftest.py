import numpy as np
import pytest

from homsim import (
    ArmConfig,
    DispersiveElement,
    FrequencyGrid,
    GaussianPulse,
    gaussian_spectral_amplitude,
)

# Source parameters of the experiment the simulator targets: 1565 nm
# mode-locked laser, 0.732 ps intensity FWHM, 0.015 photons per arm.
PAPER_PULSE_FWHM = 0.732
PAPER_WAVELENGTH = 1565.0
PAPER_PHOTONS_PER_ARM = 0.015
PAPER_DIP_FWHM = 1.035
PAPER_EFFICIENCY = 0.68
PAPER_REP_RATE = 5.0e6


@pytest.fixture(scope="session")
def paper_pulse() -> GaussianPulse:
    return GaussianPulse.from_fwhm(PAPER_PULSE_FWHM, center_wavelength=PAPER_WAVELENGTH)


@pytest.fixture(scope="session")
def unit_pulse() -> GaussianPulse:
    """Paper pulse shape with unit mean photon number (convenient norms)."""
    return GaussianPulse.from_fwhm(
        PAPER_PULSE_FWHM, center_wavelength=PAPER_WAVELENGTH, mean_photon_number=1.0
    )


@pytest.fixture(scope="session")
def unit_spectrum(unit_pulse):
    return gaussian_spectral_amplitude(unit_pulse, FrequencyGrid.for_pulse(unit_pulse))


@pytest.fixture()
def empty_arm() -> ArmConfig:
    return ArmConfig()


def arm_with(length_m: float, beta1: float = 0.0, beta2: float = 0.0) -> ArmConfig:
    return ArmConfig((DispersiveElement(length=length_m, beta1=beta1, beta2=beta2),))


def arm_from_dispersion(length_m: float, dispersion: float, wavelength: float = PAPER_WAVELENGTH) -> ArmConfig:
    return ArmConfig((DispersiveElement.from_dispersion_parameter(length_m, dispersion, wavelength),))


def random_gaussian_spectrum(rng: np.random.Generator, grid: FrequencyGrid, wavelength: float = PAPER_WAVELENGTH):
    """A random-width, random-strength Gaussian spectrum on a shared grid."""
    t0 = rng.uniform(0.3, 1.2)
    n = rng.uniform(0.2, 2.0)
    pulse = GaussianPulse(t0_width=t0, center_wavelength=wavelength, mean_photon_number=n)
    return gaussian_spectral_amplitude(pulse, grid)
