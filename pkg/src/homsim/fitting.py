"""Dip-parameter recovery from noisy HOM curves.

The dip model is y(tau) = B [1 - V exp(-(tau - c)^2 / (2 sigma^2))]; the fit
parameterizes sigma (FWHM = 2 sqrt(2 ln 2) sigma derived afterwards) to keep
the Jacobian well scaled.  Uncertainties come from Monte-Carlo resampling:
every point is redrawn Poisson around its observed count and refit; the
per-parameter spread over trials is the reported 1-sigma.

The physics inversions live here too: the balanced-dispersion pulse width
d / sqrt(2), and the second-order dispersion coefficient of an unbalanced
element from the dip width with Monte-Carlo error propagation through the
strongly nonlinear inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DipNotFoundError, FitConvergenceError, MonteCarloError
from .experiment import HomCurve
from .hom import extract_alpha_from_fwhm
from .units import beta2_to_dispersion_parameter

__all__ = [
    "FitResult",
    "DispersionEstimate",
    "gaussian_dip_model",
    "fit_gaussian_dip",
    "monte_carlo_fit",
    "pulse_width_from_dip",
    "dispersion_from_dip",
]

SIGMA_TO_FWHM = 2.0 * math.sqrt(2.0 * math.log(2.0))

_MAX_ITER = 200
_REL_STEP_TOL = 1e-10
_LAMBDA_INIT = 1e-3
_LAMBDA_UP = 10.0
_LAMBDA_DOWN = 0.3
_LAMBDA_MAX = 1e14
_MAX_MC_FAILURE_RATE = 0.05


def gaussian_dip_model(theta: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Dip model B (1 - V g), g = exp(-(x-c)^2 / (2 sigma^2)); theta = (B, V, c, sigma)."""
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    b, v, c, s = (theta[:, k : k + 1] for k in range(4))
    g = np.exp(-((x[None, :] - c) ** 2) / (2.0 * s**2))
    y = b * (1.0 - v * g)
    return y[0] if theta.shape[0] == 1 else y


def _model_jacobian(theta: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Model values and analytic Jacobian for a batch of parameter vectors."""
    b, v, c, s = (theta[:, k : k + 1] for k in range(4))
    u = x[None, :] - c
    g = np.exp(-(u**2) / (2.0 * s**2))
    y = b * (1.0 - v * g)
    jac = np.empty(y.shape + (4,))
    jac[..., 0] = 1.0 - v * g
    jac[..., 1] = -b * g
    jac[..., 2] = -b * v * g * u / s**2
    jac[..., 3] = -b * v * g * u**2 / s**3
    return y, jac


def _lm_fit_batch(
    x: np.ndarray,
    y: np.ndarray,
    theta0: np.ndarray,
    max_iter: int = _MAX_ITER,
    rel_step_tol: float = _REL_STEP_TOL,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Damped least squares over a batch of datasets sharing one x grid.

    Each batch element carries its own damping factor and converges
    independently, so batched execution is identical to fitting one by one.
    Returns (theta, converged, n_iterations, cost).
    """
    theta = np.array(theta0, dtype=float, copy=True)
    n_batch = theta.shape[0]
    lam = np.full(n_batch, _LAMBDA_INIT)
    converged = np.zeros(n_batch, dtype=bool)
    n_iter = np.zeros(n_batch, dtype=int)
    eye = np.eye(4)

    ym, jac = _model_jacobian(theta, x)
    r = ym - y
    cost = np.einsum("tp,tp->t", r, r)

    for _ in range(max_iter):
        # damping grown past the cap means no step can improve the cost:
        # the iterate is a stationary point, i.e. converged
        converged |= ~converged & (lam >= _LAMBDA_MAX)
        active = ~converged
        if not active.any():
            break
        jtj = np.einsum("tpi,tpj->tij", jac, jac)
        grad = np.einsum("tpi,tp->ti", jac, r)
        # Marquardt scaling plus a per-parameter ridge: keeps the system
        # positive definite even when a parameter decouples (flat data,
        # V -> 0) without distorting well-curved directions
        diag = np.einsum("tii->ti", jtj)
        ridge = lam[:, None] * diag + 1e-14 * (1.0 + diag)
        damped = jtj + ridge[:, :, None] * eye
        step = -np.linalg.solve(damped, grad[..., None])[..., 0]
        step = np.where(np.isfinite(step), step, 0.0)
        theta_try = theta + step
        # keep |sigma| positive to avoid division blow-ups
        theta_try[:, 3] = np.where(np.abs(theta_try[:, 3]) < 1e-12, 1e-12, theta_try[:, 3])
        ym_try, jac_try = _model_jacobian(theta_try, x)
        r_try = ym_try - y
        cost_try = np.einsum("tp,tp->t", r_try, r_try)
        cost_try = np.where(np.isfinite(cost_try), cost_try, np.inf)

        improved = cost_try <= cost
        accept = active & improved
        reject = active & ~improved

        theta[accept] = theta_try[accept]
        r[accept] = r_try[accept]
        jac[accept] = jac_try[accept]
        cost[accept] = cost_try[accept]
        lam[accept] = np.maximum(lam[accept] * _LAMBDA_DOWN, 1e-14)
        lam[reject] *= _LAMBDA_UP

        # relative step in the curvature metric (robust to parameters whose
        # true value is zero, e.g. a dip centered at the origin)
        weight = np.sqrt(diag)
        num = np.linalg.norm(weight * step, axis=1)
        den = np.linalg.norm(weight * theta, axis=1)
        rel_step = num / (den + 1e-300)
        converged |= accept & (rel_step < rel_step_tol)
        n_iter[active] += 1

    converged |= lam >= _LAMBDA_MAX
    return theta, converged, n_iter, cost


def _self_initialize(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Spec'd self-starting guess: (max, 1 - min/max, argmin, span/6)."""
    top = float(np.max(y))
    if top <= 0:
        raise DipNotFoundError("curve has no positive values; nothing to fit")
    return np.array(
        [top, 1.0 - float(np.min(y)) / top, float(x[int(np.argmin(y))]), (x[-1] - x[0]) / 6.0]
    )


@dataclass(frozen=True)
class FitResult:
    """Fitted dip parameters with 1-sigma uncertainties.

    visibility is the dip depth over the fitted baseline.  Uncertainties come
    from the least-squares covariance for a plain fit and from the trial
    spread for a Monte-Carlo fit (n_mc_trials > 0).  mc_degenerate marks
    results whose spread is undefined (single trial or no counts to resample).
    """

    baseline: float
    visibility: float
    center: float
    fwhm: float
    baseline_sigma: float
    visibility_sigma: float
    center_sigma: float
    fwhm_sigma: float
    n_mc_trials: int
    mc_failures: int
    iterations: int
    residual_norm: float
    mc_degenerate: bool = False

    def __post_init__(self) -> None:
        if not self.fwhm > 0:
            raise ValueError(f"fwhm must be positive, got {self.fwhm}")
        for name in ("baseline_sigma", "visibility_sigma", "center_sigma", "fwhm_sigma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def dip_depth(self) -> float:
        """Absolute dip depth in counts: baseline * visibility."""
        return self.baseline * self.visibility


def _fit_curve_values(y: np.ndarray, x: np.ndarray, theta0: np.ndarray) -> tuple:
    theta, ok, n_iter, cost = _lm_fit_batch(x, y[None, :], theta0[None, :])
    return theta[0], bool(ok[0]), int(n_iter[0]), float(cost[0])


def fit_gaussian_dip(curve: HomCurve, initial_guess: Optional[np.ndarray] = None) -> FitResult:
    """Least-squares Gaussian-dip fit of a HOM curve.

    Fits counts when present, the noiseless expectation otherwise.
    Self-initializes unless an explicit (B, V, c, sigma) guess is given.
    Raises FitConvergenceError at the iteration cap and DipNotFoundError when
    the fitted visibility is not significant (V < 3 sigma_V) or unphysical.
    """
    x = np.asarray(curve.delays, dtype=float)
    y = np.asarray(curve.counts if curve.counts is not None else curve.expected, dtype=float)
    if len(x) < 6:
        raise ValueError(f"need at least 6 points to fit, got {len(x)}")
    if np.any(y < 0):
        raise ValueError("curve values must be non-negative")
    theta0 = (
        np.asarray(initial_guess, dtype=float) if initial_guess is not None else _self_initialize(x, y)
    )
    theta, converged, n_iter, cost = _fit_curve_values(y, x, theta0)
    b, v, c, s = theta
    s = abs(s)

    # covariance of the parameters from the residual scatter
    _, jac = _model_jacobian(theta[None, :], x)
    jtj = jac[0].T @ jac[0]
    dof = max(len(x) - 4, 1)
    resid_var = cost / dof
    try:
        cov = resid_var * np.linalg.inv(jtj)
        sigmas = np.sqrt(np.maximum(np.diag(cov), 0.0))
    except np.linalg.LinAlgError:
        sigmas = np.full(4, np.inf)

    # dip diagnostics first: data without a significant dip reads as
    # "no dip", not as an optimizer failure, converged or not
    if b <= 0 or not np.isfinite(theta).all():
        raise DipNotFoundError(f"pathological fit: baseline {b:.4g}")
    # a hair above 1 is round-off on a full-depth dip, not an unphysical fit
    if v < 0 or v > 1 + max(3.0 * sigmas[1], 1e-9):
        raise DipNotFoundError(f"fitted visibility {v:.4g} outside [0, 1]")
    v = min(v, 1.0)
    if v < 3.0 * sigmas[1]:
        raise DipNotFoundError(
            f"dip not significant: visibility {v:.4g} < 3 x sigma {sigmas[1]:.4g}"
        )
    if not converged:
        raise FitConvergenceError(
            f"least-squares did not converge within {_MAX_ITER} iterations "
            f"(residual norm {math.sqrt(cost):.4g})"
        )

    return FitResult(
        baseline=float(b),
        visibility=float(v),
        center=float(c),
        fwhm=float(SIGMA_TO_FWHM * s),
        baseline_sigma=float(sigmas[0]),
        visibility_sigma=float(sigmas[1]),
        center_sigma=float(sigmas[2]),
        fwhm_sigma=float(SIGMA_TO_FWHM * sigmas[3]),
        n_mc_trials=0,
        mc_failures=0,
        iterations=n_iter,
        residual_norm=math.sqrt(cost),
    )


def monte_carlo_fit(
    curve: HomCurve, trials: int = 1000, seed: Optional[int] = None
) -> FitResult:
    """Monte-Carlo refit: per-parameter mean and spread over resampled trials.

    Every trial redraws each point Poisson(count) and refits; trials draw
    from independent substreams spawned off the seed, so results match
    sequential execution regardless of scheduling.  A curve without counts
    has nothing to resample: the fit is returned with zero spread and the
    mc_degenerate flag set.  Trial failure rates above 5% abort.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    base = fit_gaussian_dip(curve)

    if curve.counts is None or trials == 1:
        return FitResult(
            baseline=base.baseline,
            visibility=base.visibility,
            center=base.center,
            fwhm=base.fwhm,
            baseline_sigma=0.0,
            visibility_sigma=0.0,
            center_sigma=0.0,
            fwhm_sigma=0.0,
            n_mc_trials=trials,
            mc_failures=0,
            iterations=base.iterations,
            residual_norm=base.residual_norm,
            mc_degenerate=True,
        )

    x = np.asarray(curve.delays, dtype=float)
    counts = np.asarray(curve.counts, dtype=float)
    children = np.random.SeedSequence(seed).spawn(trials)
    resampled = np.empty((trials, len(x)))
    for i, child in enumerate(children):
        resampled[i] = np.random.Generator(np.random.PCG64(child)).poisson(counts)

    theta0 = np.tile(
        np.array([base.baseline, base.visibility, base.center, base.fwhm / SIGMA_TO_FWHM]),
        (trials, 1),
    )
    theta, ok, _, _ = _lm_fit_batch(x, resampled, theta0)
    theta[:, 3] = np.abs(theta[:, 3])
    physical = (
        ok
        & np.isfinite(theta).all(axis=1)
        & (theta[:, 0] > 0)
        & (theta[:, 1] >= 0)
        & (theta[:, 1] <= 1 + 1e-9)
        & (theta[:, 3] > 0)
    )
    failures = int(trials - physical.sum())
    if failures > _MAX_MC_FAILURE_RATE * trials:
        raise MonteCarloError(
            f"{failures}/{trials} Monte-Carlo trials failed to produce a physical fit"
        )
    good = theta[physical]
    means = good.mean(axis=0)
    spreads = good.std(axis=0, ddof=1)

    return FitResult(
        baseline=float(means[0]),
        visibility=float(means[1]),
        center=float(means[2]),
        fwhm=float(SIGMA_TO_FWHM * means[3]),
        baseline_sigma=float(spreads[0]),
        visibility_sigma=float(spreads[1]),
        center_sigma=float(spreads[2]),
        fwhm_sigma=float(SIGMA_TO_FWHM * spreads[3]),
        n_mc_trials=trials,
        mc_failures=failures,
        iterations=base.iterations,
        residual_norm=base.residual_norm,
    )


def pulse_width_from_dip(fwhm_d: float) -> float:
    """Source intensity FWHM from a balanced-dispersion dip width: d / sqrt(2)."""
    if not fwhm_d > 0:
        raise ValueError(f"dip FWHM must be positive, got {fwhm_d}")
    return fwhm_d / math.sqrt(2.0)


@dataclass(frozen=True)
class DispersionEstimate:
    """Second-order dispersion of the unbalanced element, with uncertainties.

    All values are magnitudes: the dip width is blind to the sign of the
    dispersion difference.  dispersion_sigma combines the dip-width and
    pulse-width uncertainties; the two single-source components are reported
    separately.  near_boundary flags widths within one sigma of the
    dispersion-free floor, where the inversion is strongly nonlinear.
    """

    alpha: float
    alpha_sigma: float
    beta2: float
    beta2_sigma: float
    dispersion: float
    dispersion_sigma: float
    dispersion_sigma_from_width: float
    dispersion_sigma_from_t0: float
    near_boundary: bool
    n_mc_trials: int
    fwhm_d: float
    fwhm_d_sigma: float
    t0: float
    t0_sigma: float
    length: float
    wavelength: float


def dispersion_from_dip(
    fwhm_d: float,
    t0: float,
    length: float,
    wavelength: float,
    fwhm_d_sigma: float = 0.0,
    t0_sigma: float = 0.0,
    mc_trials: int = 10000,
    seed: Optional[int] = None,
) -> DispersionEstimate:
    """Second-order dispersion of one element from the dip it produces.

    alpha = T0 sqrt(d^2 / (2 ln 2) - 4 T0^2), then beta2 = alpha / L and the
    dispersion parameter via the standard conversion.  Uncertainties are
    propagated by resampling (d, T0) as independent Gaussians; draws that
    land below the feasibility floor contribute alpha = 0.
    """
    if not length > 0:
        raise ValueError(f"length must be positive, got {length}")
    if fwhm_d_sigma < 0 or t0_sigma < 0:
        raise ValueError("sigmas must be >= 0")
    alpha = extract_alpha_from_fwhm(fwhm_d, t0)  # raises when infeasible
    length_km = length / 1000.0
    conv = abs(beta2_to_dispersion_parameter(1.0, wavelength))

    floor = 2.0 * math.sqrt(math.log(4.0)) * t0
    near_boundary = (fwhm_d - floor) < fwhm_d_sigma

    def alpha_of(d_draw: np.ndarray, t_draw: np.ndarray) -> np.ndarray:
        t_draw = np.maximum(t_draw, 1e-9)
        radicand = d_draw**2 / (2.0 * math.log(2.0)) - 4.0 * t_draw**2
        return t_draw * np.sqrt(np.maximum(radicand, 0.0))

    if mc_trials >= 2 and (fwhm_d_sigma > 0 or t0_sigma > 0):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        d_draws = fwhm_d + fwhm_d_sigma * rng.standard_normal(mc_trials)
        t_draws = t0 + t0_sigma * rng.standard_normal(mc_trials)
        sigma_alpha = float(np.std(alpha_of(d_draws, t_draws), ddof=1))
        sigma_alpha_width = float(np.std(alpha_of(d_draws, np.full(mc_trials, t0)), ddof=1))
        sigma_alpha_t0 = float(np.std(alpha_of(np.full(mc_trials, fwhm_d), t_draws), ddof=1))
    else:
        sigma_alpha = sigma_alpha_width = sigma_alpha_t0 = 0.0

    return DispersionEstimate(
        alpha=alpha,
        alpha_sigma=sigma_alpha,
        beta2=alpha / length_km,
        beta2_sigma=sigma_alpha / length_km,
        dispersion=conv * alpha / length_km,
        dispersion_sigma=conv * sigma_alpha / length_km,
        dispersion_sigma_from_width=conv * sigma_alpha_width / length_km,
        dispersion_sigma_from_t0=conv * sigma_alpha_t0 / length_km,
        near_boundary=near_boundary,
        n_mc_trials=mc_trials,
        fwhm_d=fwhm_d,
        fwhm_d_sigma=fwhm_d_sigma,
        t0=t0,
        t0_sigma=t0_sigma,
        length=length,
        wavelength=wavelength,
    )
