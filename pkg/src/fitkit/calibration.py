"""Pulse-area and prism-gap calibration fits."""

import logging
import math
from collections.abc import Sequence

import numpy as np
from lmfit import Parameters

from src.fitkit.minimize import is_converged, least_squares, standard_error
from src.fitkit.schemas import FitResult
from src.model.errors import FitError

logger = logging.getLogger(__name__)

DEFAULT_STEP_SIZE = 35e-9


def _area_residual(params: Parameters, tau: np.ndarray, y: np.ndarray) -> np.ndarray:
    p = params.valuesdict()
    return p["amplitude"] * np.sin(p["rabi"] * tau / 2) ** 2 - y


def fit_pi_pulse(
    durations: Sequence[float] | np.ndarray,
    amplitudes: Sequence[float] | np.ndarray,
) -> FitResult:
    """Fit echo amplitude against second-pulse duration to A·sin²(Ωτ/2).

    The scan must bracket the maximum: the largest sample has to sit strictly inside the
    duration range. τ_π = π/Ω; the raw argmax is reported in ``diagnostics``.

    Args:
        durations: Second-pulse durations (s)
        amplitudes: Echo peak amplitudes

    Returns:
        FitResult with ``amplitude``, ``rabi_frequency`` (rad/s) and ``tau_pi`` (s)

    Raises:
        FitError: On fewer than four points or a maximum at the edge of the scan
    """
    tau = np.asarray(durations, dtype=float)
    y = np.asarray(amplitudes, dtype=float)
    if tau.ndim != 1 or tau.shape != y.shape or tau.size < 4:
        raise FitError("need at least four (duration, amplitude) pairs of equal length")
    if not (np.all(np.isfinite(tau)) and np.all(np.isfinite(y))):
        raise FitError("series contains non-finite values")
    order = np.argsort(tau)
    tau, y = tau[order], y[order]

    peak = int(np.argmax(y))
    if peak in (0, tau.size - 1):
        raise FitError(
            f"no interior maximum: largest amplitude at τ={tau[peak]:.4g} s, the scan edge"
        )

    t_scale, y_scale = float(tau.max()), float(np.max(np.abs(y)))
    params = Parameters()
    params.add("amplitude", value=1.0, min=0.0)
    params.add("rabi", value=math.pi / tau[peak] * t_scale, min=0.0)

    result = least_squares(_area_residual, params, (tau / t_scale, y / y_scale), "pi_pulse")
    rabi = result.params["rabi"].value / t_scale
    converged = is_converged(result)
    errors = None
    if converged:
        rabi_error = standard_error(result, "rabi") / t_scale
        errors = {
            "amplitude": standard_error(result, "amplitude") * y_scale,
            "rabi_frequency": rabi_error,
            "tau_pi": math.pi * rabi_error / rabi**2,
        }

    logger.info(f"π-pulse fit: τ_π={math.pi / rabi:.4g} s, Ω={rabi:.4g} rad/s")
    return FitResult(
        model_name="pi_pulse",
        parameters={
            "amplitude": result.params["amplitude"].value * y_scale,
            "rabi_frequency": rabi,
            "tau_pi": math.pi / rabi,
        },
        units={"amplitude": "a.u.", "rabi_frequency": "rad/s", "tau_pi": "s"},
        standard_errors=errors,
        residual_norm=math.sqrt(result.chisqr) * y_scale,
        converged=converged,
        n_iterations=result.nfev,
        diagnostics={"argmax_duration": float(tau[peak])},
    )


def fit_heating_quadratic(
    t2_values: Sequence[float] | np.ndarray,
    distances: Sequence[float] | np.ndarray | None = None,
    positioner_steps: Sequence[float] | np.ndarray | None = None,
    step_size: float = DEFAULT_STEP_SIZE,
) -> FitResult:
    """Ordinary least squares for T₂(d) = a·d² + b·d + c.

    Distances are given directly or as prism-positioner steps times ``step_size``.

    Raises:
        FitError: On fewer than three distinct distances or a rank-deficient design
    """
    if (distances is None) == (positioner_steps is None):
        raise FitError("give exactly one of distances or positioner_steps")
    if distances is None:
        distances = np.asarray(positioner_steps, dtype=float) * step_size
    d = np.asarray(distances, dtype=float)
    y = np.asarray(t2_values, dtype=float)
    if d.ndim != 1 or d.shape != y.shape:
        raise FitError("distances and T2 values must be 1-D arrays of equal length")
    if np.unique(d).size < 3:
        raise FitError(f"need at least 3 distinct distances, got {np.unique(d).size}")

    # columns scaled to order one
    d_scale = float(np.max(np.abs(d))) or 1.0
    x = d / d_scale
    design = np.column_stack([x**2, x, np.ones_like(x)])
    scaled, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 3:
        raise FitError(f"rank-deficient design matrix (rank {rank})")

    a, b, c = scaled[0] / d_scale**2, scaled[1] / d_scale, scaled[2]
    fitted = design @ scaled
    residual = y - fitted
    ss_res = float(residual @ residual)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot

    dof = max(d.size - 3, 1)
    covariance = ss_res / dof * np.linalg.inv(design.T @ design)
    sigma = np.sqrt(np.diag(covariance)) / np.array([d_scale**2, d_scale, 1.0])

    slope = 2 * a * d + b
    monotone = bool(np.all(slope > 0))

    logger.info(f"Heating quadratic: R²={r_squared:.4f}, monotone increasing={monotone}")
    return FitResult(
        model_name="heating_quadratic",
        parameters={"a": float(a), "b": float(b), "c": float(c)},
        units={"a": "s/m^2", "b": "s/m", "c": "s"},
        standard_errors={"a": float(sigma[0]), "b": float(sigma[1]), "c": float(sigma[2])},
        residual_norm=math.sqrt(ss_res),
        converged=True,
        n_iterations=1,
        diagnostics={"r_squared": r_squared, "monotone_increasing": monotone},
    )
