"""Acceptance gate.

Each criterion runs at its stated tolerance and prints one pass/fail line;
run with ``pytest tests/test_acceptance.py -v -s`` to see the lines, or
execute this file directly.
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

import homsim.cli as cli
from homsim import (
    ArmConfig,
    DipParameters,
    DispersiveElement,
    FrequencyGrid,
    GaussianPulse,
    apply_dispersion,
    coincidence_probability_gaussian,
    coincidence_probability_numeric,
    coincidence_rate_general,
    carrier_frequency,
    dip_fwhm,
    dispersion_from_dip,
    gaussian_spectral_amplitude,
    jitter_convolved_profile,
    monte_carlo_fit,
    pulse_width_from_dip,
    sample_counts,
    term_decomposition,
    to_temporal_profile,
)
from homsim.config import EXPERIMENT_SCHEMA
from homsim.units import FWHM_FACTOR

from conftest import PAPER_WAVELENGTH, random_gaussian_spectrum

T0_PAPER = 0.732 / FWHM_FACTOR


def _report(criterion: str, ok: bool, detail: str) -> None:
    print(f"[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def _run_cli(args: list[str]) -> int:
    return cli.main(args)


def _fit_preset(tmp_path: Path, preset: str, tag: str) -> dict:
    exp = tmp_path / f"{tag}.json"
    curve = tmp_path / f"{tag}.curve.txt"
    report = tmp_path / f"{tag}.fit.json"
    assert _run_cli(["presets", preset, "--out", str(exp)]) == 0
    assert _run_cli(["simulate", str(exp), "--out", str(curve)]) == 0
    assert _run_cli(["fit", str(curve), "--out", str(report)]) == 0
    return json.loads(report.read_text())


def test_criterion_1_balanced_width_reproduction(tmp_path):
    start = time.perf_counter()
    report = _fit_preset(tmp_path, "balanced-no-module", "c1")
    elapsed = time.perf_counter() - start
    fwhm = report["dip_fwhm_ps"]
    rel = abs(fwhm - 1.035) / 1.035
    _report(
        "1",
        rel < 5e-3 and elapsed < 1.0,
        f"fitted dip FWHM {fwhm:.6f} ps vs 1.035 ps (rel {rel:.2e}), {elapsed:.2f} s",
    )


def test_criterion_2_dispersion_cancellation(tmp_path):
    start = time.perf_counter()
    # closed form: one 50 km module of 17.1 ps/(nm km) in both arms
    module = DispersiveElement.from_dispersion_parameter(50000.0, 17.1, PAPER_WAVELENGTH)
    bare = DipParameters.from_arms(ArmConfig(), ArmConfig(), T0_PAPER)
    loaded = DipParameters.from_arms(
        ArmConfig((module,)), ArmConfig((module,)), T0_PAPER
    )
    closed_rel = abs(dip_fwhm(loaded) - dip_fwhm(bare)) / dip_fwhm(bare)

    # quadrature oracle through the full pipeline
    fit_bare = _fit_preset(tmp_path, "balanced-no-module", "c2_bare")
    fit_loaded = _fit_preset(tmp_path, "balanced-50km-common", "c2_loaded")
    quad_rel = abs(fit_loaded["dip_fwhm_ps"] - fit_bare["dip_fwhm_ps"]) / fit_bare["dip_fwhm_ps"]
    elapsed = time.perf_counter() - start
    _report(
        "2",
        closed_rel < 1e-6 and quad_rel < 1e-4 and elapsed < 10.0,
        f"width change: closed {closed_rel:.2e} (<1e-6), quadrature {quad_rel:.2e} (<1e-4), {elapsed:.2f} s",
    )


def test_criterion_3_pulse_width_inversion():
    width = pulse_width_from_dip(1.035)
    rel = abs(width - 0.732) / 0.732
    _report("3", rel < 5e-3, f"pulse width {width:.6f} ps vs 0.732 ps (rel {rel:.2e})")


def test_criterion_4_dispersion_extraction(tmp_path):
    start = time.perf_counter()

    # paper-number point check: d = 4.123 ps, T0 from 0.732 ps, 80 m, 1565 nm
    est = dispersion_from_dip(
        4.123, T0_PAPER, 80.0, PAPER_WAVELENGTH,
        fwhm_d_sigma=0.124, t0_sigma=0.006 / FWHM_FACTOR, seed=404,
    )
    point_rel = abs(est.dispersion - 15.04) / 15.04

    # 50 synthetic experiments with known dispersion, recovered through the CLI
    rng = np.random.default_rng(20250808)
    hits = 0
    n_seeds = 50
    for k in range(n_seeds):
        d_true = float(rng.uniform(14.0, 17.0))
        doc = {
            "schema": EXPERIMENT_SCHEMA,
            "source": {"pulse_fwhm_ps": 0.732, "mean_photon_number_per_arm": 0.015},
            "arm_a": {"elements": [{"length_m": 80.0, "dispersion_ps_per_nm_km": d_true}]},
            "arm_b": {"elements": []},
            "scan": {"seed": 9000 + k, "integration_time_s": 6000.0},
        }
        exp = tmp_path / f"c4_{k}.json"
        exp.write_text(json.dumps(doc))
        curve = tmp_path / f"c4_{k}.curve.txt"
        out = tmp_path / f"c4_{k}.disp.json"
        assert _run_cli(["synth", str(exp), "--out", str(curve)]) == 0
        code = _run_cli(
            ["extract-dispersion", str(curve),
             "--t0-fwhm", "0.732", "--t0-fwhm-sigma", "0.006",
             "--length", "80", "--wavelength", "1565", "--out", str(out)]
        )
        assert code == 0
        report = json.loads(out.read_text())
        if abs(report["dispersion_ps_per_nm_km"] - d_true) <= report["dispersion_sigma_ps_per_nm_km"]:
            hits += 1
    elapsed = time.perf_counter() - start
    _report(
        "4",
        point_rel < 0.10 and hits >= 45 and elapsed < 60.0,
        f"paper numbers give D {est.dispersion:.3f} (rel {point_rel:.2%} of 15.04); "
        f"coverage {hits}/{n_seeds} at 1 combined sigma; {elapsed:.1f} s",
    )


def test_criterion_5_oracle_equivalence():
    start = time.perf_counter()
    pulse = GaussianPulse.from_fwhm(0.732)
    spec = gaussian_spectral_amplitude(pulse, FrequencyGrid.for_pulse(pulse))
    worst = 0.0
    for alpha in (0.0, 0.5, 1.49, 10.0):
        arm_a = ArmConfig((DispersiveElement(1000.0, beta2=alpha),))
        params = DipParameters(0.0, alpha, pulse.t0_width)
        d = dip_fwhm(params)
        taus = np.linspace(-5.0 * d, 5.0 * d, 50)
        numeric = coincidence_probability_numeric(spec, spec, arm_a, ArmConfig(), taus)
        closed = coincidence_probability_gaussian(params, taus)
        worst = max(worst, float(np.max(np.abs(numeric - closed))))
    elapsed = time.perf_counter() - start
    _report(
        "5",
        worst < 1e-6 and elapsed < 10.0,
        f"max |P_quadrature - P_closed| = {worst:.2e} over 200 samples (<1e-6), {elapsed:.2f} s",
    )


def test_criterion_6_term_decomposition():
    rng = np.random.default_rng(606)
    grid = FrequencyGrid(n_points=1024, span=40.0)
    worst_rel = 0.0
    sevens_equal = True
    for _ in range(100):
        spec_a = random_gaussian_spectrum(rng, grid)
        spec_b = random_gaussian_spectrum(rng, grid)
        arm_a = ArmConfig((DispersiveElement(
            rng.uniform(0, 100), beta1=rng.uniform(-1, 1), beta2=rng.uniform(-30, 30)),))
        arm_b = ArmConfig((DispersiveElement(
            rng.uniform(0, 100), beta1=rng.uniform(-1, 1), beta2=rng.uniform(-30, 30)),))
        tau = float(rng.uniform(-10, 10))
        eta_c, eta_d = rng.uniform(0.1, 1.0, size=2)
        g2_a, g2_b = rng.uniform(0.0, 2.0, size=2)
        terms = term_decomposition(spec_a, spec_b, arm_a, arm_b, tau, eta_c, eta_d,
                                   average_oscillating=True, g2_a=g2_a, g2_b=g2_b)
        rate = coincidence_rate_general(spec_a, spec_b, arm_a, arm_b, tau,
                                        eta_c, eta_d, g2_a, g2_b)
        worst_rel = max(worst_rel, abs(terms.total - rate) / abs(rate))
        sevens_equal &= terms.exchange_ab == terms.exchange_ba

    # oscillating pair against the cos(2 omega0 tau) envelope, averaging off
    pulse = GaussianPulse.from_fwhm(0.732, mean_photon_number=1.0)
    spec = gaussian_spectral_amplitude(pulse, FrequencyGrid.for_pulse(pulse))
    omega = spec.grid.omega
    omega0 = carrier_frequency(PAPER_WAVELENGTH)
    envelope_ok = True
    worst_env = 0.0
    for tau in np.linspace(0.0, 0.004, 23):  # a few optical cycles
        terms = term_decomposition(spec, spec, ArmConfig(), ArmConfig(), float(tau),
                                   average_oscillating=False)
        pair = (terms.osc_ab + terms.osc_ba).real
        k_oracle = np.trapezoid(np.abs(spec.values) ** 2 * np.exp(1j * omega * tau), omega)
        expected = -0.5 * math.cos(2.0 * omega0 * float(tau)) * k_oracle.real**2
        worst_env = max(worst_env, abs(pair - expected))
        envelope_ok &= abs(pair - expected) < 1e-9
    _report(
        "6",
        worst_rel < 1e-9 and sevens_equal and envelope_ok,
        f"sum-vs-rate max rel {worst_rel:.2e} (<1e-9) on 100 configs; exchange terms equal; "
        f"oscillating envelope max dev {worst_env:.2e}",
    )


def test_criterion_7_broadening_sanity():
    start = time.perf_counter()
    pulse = GaussianPulse.from_fwhm(0.732)
    module = DispersiveElement.from_dispersion_parameter(50000.0, 17.1, PAPER_WAVELENGTH)
    # the broadened pulse must fit the conjugate time window: 2^17 points
    grid = FrequencyGrid.for_pulse(pulse, n_points=2**17)
    dispersed = apply_dispersion(gaussian_spectral_amplitude(pulse, grid), [module])
    profile = to_temporal_profile(dispersed)
    smeared = jitter_convolved_profile(profile, 270.0)
    width_ns = smeared.fwhm() / 1000.0
    elapsed = time.perf_counter() - start
    _report(
        "7",
        3.3 <= width_ns <= 4.3 and elapsed < 5.0,
        f"50 km broadened width with 270 ps jitter: {width_ns:.3f} ns in [3.3, 4.3], {elapsed:.2f} s",
    )


def test_criterion_8_statistical_machinery(tmp_path):
    # Monte-Carlo sigma scales as 1/sqrt(counts) across a 4x integration sweep
    pulse = GaussianPulse.from_fwhm(0.732, mean_photon_number=0.015)
    from homsim import ScanConfig, expected_curve

    sigmas = {}
    for t_int in (10.0, 40.0):
        values = []
        for k in range(4):
            config = ScanConfig(pulse=pulse, integration_time=t_int)
            sampled = sample_counts(expected_curve(config), seed=800 + k)
            values.append(monte_carlo_fit(sampled, trials=400, seed=k).fwhm_sigma)
        sigmas[t_int] = float(np.mean(values))
    ratio = sigmas[40.0] / sigmas[10.0]
    scaling_ok = 0.4 <= ratio <= 0.6

    # fixed seeds give byte-identical CLI outputs end to end
    exp = tmp_path / "c8.json"
    assert _run_cli(["presets", "balanced-no-module", "--out", str(exp)]) == 0
    files = []
    for tag in ("x", "y"):
        workdir = tmp_path / f"c8_{tag}"
        workdir.mkdir()
        curve = workdir / "scan.curve.txt"
        fit = workdir / "scan.fit.json"
        assert _run_cli(["synth", str(exp), "--seed", "31415", "--out", str(curve)]) == 0
        assert _run_cli(["fit", str(curve), "--seed", "27182", "--out", str(fit)]) == 0
        files.append((curve.read_bytes(), fit.read_bytes()))
    identical = files[0] == files[1]
    _report(
        "8",
        scaling_ok and identical,
        f"sigma(4T)/sigma(T) = {ratio:.3f} in [0.4, 0.6]; CLI outputs byte-identical: {identical}",
    )


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v", "-s"]))
