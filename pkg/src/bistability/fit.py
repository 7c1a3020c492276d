"""Coupling-strength estimate from transmission sweeps."""

import logging
import math
from collections.abc import Sequence

import numpy as np
from lmfit import Parameters

from src.bistability.model import transmission
from src.bistability.schemas import BistabilityFit, BistabilityParams
from src.bistability.sweep import follow_branch
from src.cqed.schemas import CouplingEstimate
from src.fitkit.minimize import is_converged, least_squares, standard_error, stop_diagnostics
from src.fitkit.schemas import FitResult
from src.model.errors import FitError
from src.model.schemas import SweepTrace
from src.model.units import to_over_2pi

logger = logging.getLogger(__name__)

FREE_PARAMETERS = ("g", "n_atoms", "drive_calibration", "external_loss")
UNITS = {"g": "rad/s", "n_atoms": "", "drive_calibration": "1/W", "external_loss": ""}
# relative finite-difference step, well above the root-polishing tolerance
JACOBIAN_EPSFCN = 1e-10


def model_transmission(params: BistabilityParams, trace: SweepTrace) -> np.ndarray:
    """Model transmission at the trace's own detunings, in the trace's sweep order."""
    us, _ = follow_branch(params, trace.drive_intensity, trace.laser_detunings)
    return transmission(us, trace.drive_intensity, params)


def fit_bistability(
    traces: Sequence[SweepTrace],
    params: BistabilityParams,
    free: Sequence[str] = ("g",),
) -> BistabilityFit:
    """Least-squares fit of model sweeps to measured or simulated traces.

    Every free parameter is fitted as a scale factor on its value in ``params``; the rest
    stay fixed. Each trace is re-simulated by branch continuation at its own detunings
    and drive, so forward and reverse traces are both usable.

    Args:
        traces: One or more sweep traces with a positive drive intensity
        params: Starting values for the free parameters and the fixed ones
        free: Names of the parameters to fit, by default only g

    Returns:
        BistabilityFit with a ``bistability_fit`` coupling estimate; a non-converged fit
        returns its best point flagged ``not_converged``

    Raises:
        FitError: Without traces, on a trace without drive, or on an unknown parameter
    """
    if not traces:
        raise FitError("fit_bistability needs at least one trace")
    if any(t.drive_intensity <= 0 for t in traces):
        raise FitError("every trace must carry its positive drive intensity")
    unknown = sorted(set(free) - set(FREE_PARAMETERS))
    if unknown:
        raise FitError(f"cannot fit {unknown}; free parameters are {FREE_PARAMETERS}")

    data = np.concatenate([t.transmission for t in traces])
    initial = {name: getattr(params, name) for name in free}

    def trial_params(scales: dict[str, float]) -> BistabilityParams:
        return params.model_copy(
            update={name: scales[f"{name}_scale"] * initial[name] for name in free}
        )

    def residual(p: Parameters) -> np.ndarray:
        trial = trial_params(p.valuesdict())
        return np.concatenate([model_transmission(trial, t) for t in traces]) - data

    if not free:
        misfit = float(np.linalg.norm(residual(Parameters())))
        # nothing varied: g is reported exactly, with zero spread
        return _package(params, params, ["g"], {"g": 0.0}, misfit, True, 0, [], traces)

    lm_params = Parameters()
    for name in free:
        lm_params.add(f"{name}_scale", value=1.0, min=1e-3)
    result = least_squares(residual, lm_params, label="bistability", epsfcn=JACOBIAN_EPSFCN)

    fitted = trial_params(result.params.valuesdict())
    converged = is_converged(result)
    errors = (
        {name: standard_error(result, f"{name}_scale") * initial[name] for name in free}
        if converged
        else None
    )
    flags = [] if converged else ["not_converged"]
    stopped = {} if converged else stop_diagnostics(result)
    return _package(
        params,
        fitted,
        list(free),
        errors,
        math.sqrt(result.chisqr),
        converged,
        result.nfev,
        flags,
        traces,
        stopped,
    )


def _package(
    initial: BistabilityParams,
    fitted: BistabilityParams,
    names: list[str],
    errors: dict[str, float] | None,
    residual_norm: float,
    converged: bool,
    n_iterations: int,
    flags: list[str],
    traces: Sequence[SweepTrace],
    stopped: dict[str, float | bool | str] | None = None,
) -> BistabilityFit:
    n_samples = sum(t.laser_detunings.size for t in traces)
    fit = FitResult(
        model_name="bistability",
        parameters={name: getattr(fitted, name) for name in names},
        units={name: UNITS[name] for name in names},
        standard_errors=errors,
        residual_norm=residual_norm,
        converged=converged,
        n_iterations=n_iterations,
        flags=flags,
        diagnostics={
            "rms_residual": residual_norm / math.sqrt(n_samples),
            "n_traces": float(len(traces)),
            "initial_g": initial.g,
            **(stopped or {}),
        },
    )
    estimate = CouplingEstimate(
        g=fitted.g,
        method="bistability_fit",
        inputs={
            "n_atoms": fitted.n_atoms,
            "kappa": fitted.kappa,
            "gamma_h": fitted.gamma_h,
            "residual_norm": residual_norm,
        },
    )
    logger.info(
        f"Bistability fit: g = 2pi x {to_over_2pi(fitted.g):.4g} Hz "
        f"(converged={converged}, residual={residual_norm:.3g})"
    )
    return BistabilityFit(estimate=estimate, fit=fit)
