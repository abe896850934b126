"""Finite-statistics synthetic experiments.

Turns the ideal coincidence rate into what a counting experiment records:
expected coincidences per delay point over the integration time, Poisson
counts with reproducible per-point substreams, detector-jitter smearing of
temporal profiles, and singles rates.

Detector timing jitter does not enter the HOM curve itself: with the
coincidence window far wider than the packets, jitter reshuffles arrival
tags without changing which pairs fall inside the window.  It matters only
when measuring pulse widths through the detection chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .hom import ArmConfig, DipParameters, coincidence_rate_general, dip_fwhm
from .wavepacket import (
    DEFAULT_GRID_POINTS,
    DEFAULT_SPAN_FACTOR,
    FrequencyGrid,
    GaussianPulse,
    TemporalProfile,
    gaussian_spectral_amplitude,
)

__all__ = [
    "ScanConfig",
    "HomCurve",
    "default_delay_grid",
    "expected_curve",
    "sample_counts",
    "jitter_convolved_profile",
    "singles_rates",
]

# intensity-FWHM -> rms width of a Gaussian
_SIGMA_PER_FWHM = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))


@dataclass(frozen=True)
class ScanConfig:
    """Full description of one delay scan.

    The same source pulse feeds both arms (a 50:50 split of one laser);
    mean_photon_number is the per-arm value.  Both detectors share one
    efficiency.  The coincidence window and jitter are recorded for the
    detection model but do not modify the ideal curve (window assumed wide).
    """

    pulse: GaussianPulse
    arm_a: ArmConfig = ArmConfig()
    arm_b: ArmConfig = ArmConfig()
    delays: tuple[float, ...] = ()
    repetition_rate: float = 5.0e6
    integration_time: float = 10.0
    detector_efficiency: float = 0.68
    coincidence_window: float = 1000.0
    timing_jitter_fwhm: float = 270.0
    rng_seed: Optional[int] = None
    grid_points: int = DEFAULT_GRID_POINTS
    grid_span_factor: float = DEFAULT_SPAN_FACTOR

    def __post_init__(self) -> None:
        delays = tuple(float(t) for t in self.delays)
        if not delays:
            delays = tuple(default_delay_grid(self.arm_a, self.arm_b, self.pulse.t0_width))
        object.__setattr__(self, "delays", delays)
        diffs = np.diff(delays)
        if len(delays) > 1 and not np.all(diffs > 0):
            raise ValueError("delay grid must be strictly increasing")
        if not 0.0 <= self.detector_efficiency <= 1.0:
            raise ValueError(f"detector_efficiency must be in [0, 1], got {self.detector_efficiency}")
        if not self.repetition_rate > 0:
            raise ValueError(f"repetition_rate must be positive, got {self.repetition_rate}")
        if not self.integration_time > 0:
            raise ValueError(f"integration_time must be positive, got {self.integration_time}")
        if not self.coincidence_window > 0:
            raise ValueError(f"coincidence_window must be positive, got {self.coincidence_window}")
        if self.timing_jitter_fwhm < 0:
            raise ValueError(f"timing_jitter_fwhm must be >= 0, got {self.timing_jitter_fwhm}")

    @property
    def trials(self) -> float:
        """Number of pulse pairs integrated per delay point."""
        return self.repetition_rate * self.integration_time

    @property
    def dip_parameters(self) -> DipParameters:
        return DipParameters.from_arms(self.arm_a, self.arm_b, self.pulse.t0_width)


def default_delay_grid(
    arm_a: ArmConfig,
    arm_b: ArmConfig,
    t0: float,
    n_points: int = 41,
    halfspan_dip_widths: float = 3.0,
) -> np.ndarray:
    """Delay grid centered on the dip: n points over +/- the given number of widths."""
    params = DipParameters.from_arms(arm_a, arm_b, t0)
    d = dip_fwhm(params)
    return np.linspace(
        params.delta_tau - halfspan_dip_widths * d,
        params.delta_tau + halfspan_dip_widths * d,
        n_points,
    )


@dataclass(frozen=True)
class HomCurve:
    """Delay-indexed coincidence data.

    expected holds the noiseless expectation per point; counts is filled by
    sample_counts.  metadata carries a config echo, the sampling seed and the
    file schema version where applicable.
    """

    delays: np.ndarray
    expected: np.ndarray
    counts: Optional[np.ndarray] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        delays = np.asarray(self.delays, dtype=float)
        expected = np.asarray(self.expected, dtype=float)
        if delays.shape != expected.shape or delays.ndim != 1:
            raise ValueError("delays and expected must be 1-d arrays of equal length")
        object.__setattr__(self, "delays", delays)
        object.__setattr__(self, "expected", expected)
        if self.counts is not None:
            counts = np.asarray(self.counts, dtype=np.int64)
            if counts.shape != delays.shape:
                raise ValueError("counts must match delays in length")
            if np.any(counts < 0):
                raise ValueError("counts must be non-negative")
            object.__setattr__(self, "counts", counts)

    @property
    def n_points(self) -> int:
        return len(self.delays)


def expected_curve(config: ScanConfig) -> HomCurve:
    """Noiseless expected coincidences per delay point (rate x trials)."""
    grid = FrequencyGrid.for_pulse(
        config.pulse, n_points=config.grid_points, span_factor=config.grid_span_factor
    )
    spec = gaussian_spectral_amplitude(config.pulse, grid)
    delays = np.asarray(config.delays, dtype=float)
    g2 = config.pulse.source_g2
    eta = config.detector_efficiency
    rate = coincidence_rate_general(
        spec, spec, config.arm_a, config.arm_b, delays, eta, eta, g2, g2
    )
    return HomCurve(
        delays=delays,
        expected=rate * config.trials,
        metadata={"seed": config.rng_seed, "trials": config.trials},
    )


def sample_counts(curve: HomCurve, seed: Optional[int] = None) -> HomCurve:
    """Draw Poisson counts for every point of the curve.

    Each point uses its own substream spawned from the seed, so counts are
    reproducible independent of evaluation order or parallel generation.
    A None seed draws fresh entropy; the seed actually used is recorded in
    the returned metadata.
    """
    if np.any(curve.expected < 0):
        raise ValueError("expected coincidence rates must be non-negative")
    root = np.random.SeedSequence(seed)
    recorded = seed if seed is not None else int(root.entropy)
    children = root.spawn(curve.n_points)
    counts = np.fromiter(
        (
            np.random.Generator(np.random.PCG64(child)).poisson(lam)
            for child, lam in zip(children, curve.expected)
        ),
        dtype=np.int64,
        count=curve.n_points,
    )
    metadata = dict(curve.metadata)
    metadata["seed"] = recorded
    return HomCurve(delays=curve.delays, expected=curve.expected, counts=counts, metadata=metadata)


def jitter_convolved_profile(profile: TemporalProfile, jitter_fwhm: float) -> TemporalProfile:
    """Convolve a temporal profile with the Gaussian detection-jitter response.

    For Gaussian inputs the output FWHM obeys w_out^2 = w_in^2 + jitter^2.
    jitter_fwhm = 0 returns the profile unchanged.
    """
    if jitter_fwhm < 0:
        raise ValueError(f"jitter_fwhm must be >= 0, got {jitter_fwhm}")
    if jitter_fwhm == 0.0:
        return profile
    dt = profile.time_step
    sigma = jitter_fwhm * _SIGMA_PER_FWHM
    half_width = max(int(math.ceil(6.0 * sigma / dt)), 1)
    k = np.arange(-half_width, half_width + 1) * dt
    kernel = np.exp(-0.5 * (k / sigma) ** 2)
    kernel /= kernel.sum()  # discrete unit mass conserves photon number
    n = profile.intensity.size
    m = kernel.size
    nfft = n + m - 1
    conv = np.fft.irfft(
        np.fft.rfft(profile.intensity, nfft) * np.fft.rfft(kernel, nfft), nfft
    )
    smeared = conv[half_width : half_width + n]
    # convolution of non-negative inputs; clip FFT round-off
    return TemporalProfile(times=profile.times, intensity=np.maximum(smeared, 0.0))


def singles_rates(config: ScanConfig) -> tuple[float, float]:
    """Expected singles per detector over the integration time.

    eta (N_A + N_B) / 2 per trial at each detector: a balanced splitter sends
    half of each arm's light to each detector regardless of delay, so singles
    carry no interference signature.
    """
    n_per_arm = config.pulse.mean_photon_number
    per_trial = config.detector_efficiency * (n_per_arm + n_per_arm) / 2.0
    s = per_trial * config.trials
    return (s, s)
