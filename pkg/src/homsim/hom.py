"""The HOM coincidence observable, exact and numeric.

Two routes to the same curve:

* Gaussian closed forms: for identical transform-limited Gaussian packets the
  normalized coincidence probability is

      P(tau) = 1 - (T0^2 / sqrt(4 T0^4 + alpha^2))
                   * exp(-2 (tau - dtau)^2 / (4 T0^2 + (alpha/T0)^2))

  with dtau = beta1_A L_A - beta1_B L_B the group-delay difference and
  alpha = beta2_A L_A - beta2_B L_B the GVD difference between the arms.
  Only the *difference* enters: dispersion common to both arms cancels.

* Spectral quadrature: for arbitrary spectra the unnormalized coincidence
  rate per trial is

      n(tau) = (eta_C eta_D / 4) [ g2_A N_A^2 + g2_B N_B^2 + 2 N_A N_B
                                    - 2 |J(tau)|^2 ]

  with N_x the per-arm mean photon numbers and the exchange overlap

      J(tau) = Integral dOmega alpha_A*(Omega) alpha_B(Omega)
                 exp(-i [Omega tau - Phi(Omega)]),
      Phi(Omega) = phi_A(Omega) - phi_B(Omega).

  The delay sign convention is such that positive tau retards arm B, placing
  the dip minimum at tau = dtau.

The eight-term decomposition exposes the individual contributions, including
the fast-oscillating pair at 2 omega0 which averages to zero under fiber
phase fluctuations and is therefore zeroed by default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import GridMismatchError, InfeasibleWidthError
from .units import carrier_frequency
from .wavepacket import DispersiveElement, SpectralAmplitude, chain_phase

__all__ = [
    "ArmConfig",
    "DipParameters",
    "CoincidenceTerms",
    "overlap_integral",
    "coincidence_rate_general",
    "baseline_rate",
    "coincidence_probability_numeric",
    "coincidence_probability_gaussian",
    "dip_fwhm",
    "dip_visibility",
    "extract_alpha_from_fwhm",
    "delta_tau_of_arms",
    "alpha_of_arms",
    "term_decomposition",
]

TauLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class ArmConfig:
    """One interferometer arm: the chain of dispersive elements it contains."""

    elements: tuple[DispersiveElement, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))

    @property
    def group_delay(self) -> float:
        """Total beta1 L over the chain, ps."""
        return float(sum(e.group_delay for e in self.elements))

    @property
    def gvd(self) -> float:
        """Total beta2 L over the chain, ps^2."""
        return float(sum(e.gvd for e in self.elements))

    def phase(self, omega: np.ndarray) -> np.ndarray:
        """Accumulated spectral phase of the chain, rad."""
        return chain_phase(self.elements, omega)


def delta_tau_of_arms(arm_a: ArmConfig, arm_b: ArmConfig) -> float:
    """Group-delay difference dtau = beta1_A L_A - beta1_B L_B, ps."""
    return arm_a.group_delay - arm_b.group_delay


def alpha_of_arms(arm_a: ArmConfig, arm_b: ArmConfig) -> float:
    """GVD difference alpha = beta2_A L_A - beta2_B L_B, ps^2."""
    return arm_a.gvd - arm_b.gvd


@dataclass(frozen=True)
class DipParameters:
    """Closed-form dip parameters: center dtau (ps), alpha (ps^2), T0 (ps)."""

    delta_tau: float
    alpha: float
    t0: float

    def __post_init__(self) -> None:
        if not self.t0 > 0:
            raise ValueError(f"t0 must be positive, got {self.t0}")

    @classmethod
    def from_arms(cls, arm_a: ArmConfig, arm_b: ArmConfig, t0: float) -> "DipParameters":
        return cls(
            delta_tau=delta_tau_of_arms(arm_a, arm_b),
            alpha=alpha_of_arms(arm_a, arm_b),
            t0=t0,
        )


def coincidence_probability_gaussian(params: DipParameters, tau: TauLike) -> TauLike:
    """Normalized coincidence probability P(tau) for Gaussian packets.

    Lies in [1/2, 1]; the minimum sits exactly at tau = delta_tau and equals
    1 - 1/2 only for alpha = 0.
    """
    t0 = params.t0
    alpha = params.alpha
    depth = t0**2 / math.sqrt(4.0 * t0**4 + alpha**2)
    width_sq = 4.0 * t0**2 + (alpha / t0) ** 2
    x = np.asarray(tau, dtype=float) - params.delta_tau
    out = 1.0 - depth * np.exp(-2.0 * x**2 / width_sq)
    return float(out) if np.isscalar(tau) else out


def dip_visibility(params: DipParameters) -> float:
    """Relative dip depth 1 - P(delta_tau) = T0^2 / sqrt(4 T0^4 + alpha^2) <= 1/2."""
    return params.t0**2 / math.sqrt(4.0 * params.t0**4 + params.alpha**2)


def dip_fwhm(params: DipParameters) -> float:
    """FWHM d of the dip: d = 2 sqrt(ln 4) sqrt(T0^2 + (alpha / 2 T0)^2), ps."""
    t0 = params.t0
    return 2.0 * math.sqrt(math.log(4.0)) * math.sqrt(t0**2 + (params.alpha / (2.0 * t0)) ** 2)


def extract_alpha_from_fwhm(d: float, t0: float) -> float:
    """Invert the dip width: |alpha| = T0 sqrt(d^2 / (2 ln 2) - 4 T0^2), ps^2.

    The width determines only the magnitude of alpha.  Raises
    InfeasibleWidthError when d is below the dispersion-free minimum
    2 sqrt(ln 4) T0.
    """
    if not t0 > 0:
        raise ValueError(f"t0 must be positive, got {t0}")
    floor = 2.0 * math.sqrt(math.log(4.0)) * t0
    radicand = d**2 / (2.0 * math.log(2.0)) - 4.0 * t0**2
    if radicand < 0:
        raise InfeasibleWidthError(
            f"dip FWHM {d:.6g} ps is below the dispersion-free minimum {floor:.6g} ps "
            f"for T0 = {t0:.6g} ps"
        )
    return t0 * math.sqrt(radicand)


def _check_compatible(spec_a: SpectralAmplitude, spec_b: SpectralAmplitude) -> None:
    if spec_a.grid != spec_b.grid:
        raise GridMismatchError("spectral amplitudes must share one frequency grid")
    if spec_a.center_wavelength != spec_b.center_wavelength:
        raise GridMismatchError("spectral amplitudes must share one carrier wavelength")


def overlap_integral(
    spec_a: SpectralAmplitude,
    spec_b: SpectralAmplitude,
    arm_a: ArmConfig,
    arm_b: ArmConfig,
    tau: TauLike,
) -> complex | np.ndarray:
    """Exchange overlap J(tau) between the two dispersed packets.

    Discrete quadrature of
        J(tau) = Integral dOmega alpha_A*(Omega) alpha_B(Omega)
                   exp(-i [Omega tau - Phi(Omega)])
    with Phi the arm phase difference.  |J| <= sqrt(N_A N_B) (Cauchy-Schwarz),
    with equality at tau = dtau for identical spectra and balanced dispersion.
    """
    _check_compatible(spec_a, spec_b)
    omega = spec_a.grid.omega
    phi = arm_a.phase(omega) - arm_b.phase(omega)
    weights = np.conj(spec_a.values) * spec_b.values * np.exp(1j * phi) * spec_a.grid.spacing
    tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
    kernel = np.exp(-1j * np.outer(tau_arr, omega))
    result = kernel @ weights
    return complex(result[0]) if np.isscalar(tau) else result


def _oscillating_overlap(
    spec_a: SpectralAmplitude,
    spec_b: SpectralAmplitude,
    arm_a: ArmConfig,
    arm_b: ArmConfig,
    tau: np.ndarray,
) -> np.ndarray:
    """Overlap kernel of the fast-oscillating pair (opposite tau/phase signs)."""
    omega = spec_a.grid.omega
    phi = arm_a.phase(omega) - arm_b.phase(omega)
    weights = np.conj(spec_a.values) * spec_b.values * np.exp(-1j * phi) * spec_a.grid.spacing
    kernel = np.exp(1j * np.outer(tau, omega))
    return kernel @ weights


def baseline_rate(
    n_a: float,
    n_b: float,
    eta_c: float = 1.0,
    eta_d: float = 1.0,
    g2_a: float = 1.0,
    g2_b: float = 1.0,
) -> float:
    """Far-from-dip coincidence rate per trial (the tau -> inf asymptote)."""
    return eta_c * eta_d / 4.0 * (g2_a * n_a**2 + g2_b * n_b**2 + 2.0 * n_a * n_b)


def _check_efficiency(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")


def coincidence_rate_general(
    spec_a: SpectralAmplitude,
    spec_b: SpectralAmplitude,
    arm_a: ArmConfig,
    arm_b: ArmConfig,
    tau: TauLike,
    eta_c: float = 1.0,
    eta_d: float = 1.0,
    g2_a: float = 1.0,
    g2_b: float = 1.0,
) -> TauLike:
    """Unnormalized coincidence rate per trial, arbitrary spectra.

    (eta_C eta_D / 4) [g2_A N_A^2 + g2_B N_B^2 + 2 N_A N_B - 2 |J(tau)|^2];
    non-negative for any physical inputs.  The fast-oscillating pair is
    averaged to zero here (fiber phase fluctuations); see term_decomposition
    for the full set.
    """
    _check_efficiency("eta_c", eta_c)
    _check_efficiency("eta_d", eta_d)
    if g2_a < 0 or g2_b < 0:
        raise ValueError("g2 values must be >= 0")
    n_a = spec_a.photon_number
    n_b = spec_b.photon_number
    j = overlap_integral(spec_a, spec_b, arm_a, arm_b, tau)
    j2 = np.abs(j) ** 2
    rate = baseline_rate(n_a, n_b, eta_c, eta_d, g2_a, g2_b) - eta_c * eta_d / 2.0 * j2
    return float(rate) if np.isscalar(tau) else rate


def coincidence_probability_numeric(
    spec_a: SpectralAmplitude,
    spec_b: SpectralAmplitude,
    arm_a: ArmConfig,
    arm_b: ArmConfig,
    tau: TauLike,
    g2_a: float = 1.0,
    g2_b: float = 1.0,
) -> TauLike:
    """Quadrature coincidence rate normalized to its own baseline.

    Detector efficiencies cancel in the normalization.  For Gaussian inputs
    this matches coincidence_probability_gaussian pointwise.
    """
    rate = coincidence_rate_general(spec_a, spec_b, arm_a, arm_b, tau, 1.0, 1.0, g2_a, g2_b)
    base = baseline_rate(spec_a.photon_number, spec_b.photon_number, 1.0, 1.0, g2_a, g2_b)
    return rate / base


@dataclass(frozen=True)
class CoincidenceTerms:
    """The eight coincidence contributions at one delay.

    auto_a/auto_b: single-arm autocorrelations; osc_ab/osc_ba: the
    fast-oscillating pair at 2 omega0 (zero when averaged); direct_ab /
    direct_ba: distinguishable cross terms; exchange_ab/exchange_ba: the
    interference terms producing the dip (always equal).
    """

    auto_a: float
    auto_b: float
    osc_ab: complex
    osc_ba: complex
    direct_ab: float
    direct_ba: float
    exchange_ab: float
    exchange_ba: float

    @property
    def total(self) -> float:
        osc = self.osc_ab + self.osc_ba  # conjugate pair: imaginary parts cancel
        return (
            self.auto_a
            + self.auto_b
            + osc.real
            + self.direct_ab
            + self.direct_ba
            + self.exchange_ab
            + self.exchange_ba
        )


def term_decomposition(
    spec_a: SpectralAmplitude,
    spec_b: SpectralAmplitude,
    arm_a: ArmConfig,
    arm_b: ArmConfig,
    tau: float,
    eta_c: float = 1.0,
    eta_d: float = 1.0,
    average_oscillating: bool = True,
    g2_a: float = 1.0,
    g2_b: float = 1.0,
) -> CoincidenceTerms:
    """All eight coincidence terms at a single delay, by direct quadrature.

    With average_oscillating the fast pair is zeroed and the total equals
    coincidence_rate_general; with it disabled the pair carries the
    cos(2 omega0 tau) fringe, and at tau = dtau with identical arms the total
    vanishes (all light exits one port when the packets are phase coherent).
    """
    _check_compatible(spec_a, spec_b)
    _check_efficiency("eta_c", eta_c)
    _check_efficiency("eta_d", eta_d)
    pref = eta_c * eta_d / 4.0
    n_a = spec_a.photon_number
    n_b = spec_b.photon_number
    tau_arr = np.atleast_1d(float(tau))
    j = overlap_integral(spec_a, spec_b, arm_a, arm_b, tau_arr)[0]
    exchange = -pref * abs(j) ** 2
    if average_oscillating:
        osc_ab = 0j
    else:
        omega0 = carrier_frequency(spec_a.center_wavelength)
        k = _oscillating_overlap(spec_a, spec_b, arm_a, arm_b, tau_arr)[0]
        osc_ab = -pref * np.exp(2j * omega0 * float(tau)) * k**2
    return CoincidenceTerms(
        auto_a=pref * g2_a * n_a**2,
        auto_b=pref * g2_b * n_b**2,
        osc_ab=complex(osc_ab),
        osc_ba=complex(np.conj(osc_ab)),
        direct_ab=pref * n_a * n_b,
        direct_ba=pref * n_a * n_b,
        exchange_ab=exchange,
        exchange_ba=exchange,
    )
