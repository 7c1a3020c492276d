"""Exponential decay fits for echo and spectral-hole series.

Delays and signals are rescaled to order one before fitting (time by the longest delay,
signal by its largest magnitude) and mapped back afterwards, so the same tolerances work
for microsecond coherence times and second-long hole lifetimes.
"""

import logging
import math
from collections.abc import Sequence

import numpy as np
from lmfit import Parameters
from lmfit.minimizer import MinimizerResult

from src.fitkit.minimize import is_converged, least_squares, standard_error, stop_diagnostics
from src.fitkit.schemas import DecayModel, FitResult, HoleFitMode
from src.model.errors import FitError

logger = logging.getLogger(__name__)

# physical constant = factor / k for a decay A·e^{−k·t}
DECAY_CONSTANTS: dict[str, tuple[str, float]] = {
    "amp_2pe": ("t2", 2.0),
    "int_2pe": ("t2", 4.0),
    "pop_3pe": ("t1", 1.0),
    "hole": ("t_h", 1.0),
}

MIN_DECAY_POINTS = 4
MIN_HOLE_POINTS = 8
DISTINCT_FRACTION = 0.05
MIN_COMPONENT_FRACTION = 0.01
CONDITION_LIMIT = 1e8
FALLBACK_FLAG = "single_exponential_fallback"


def validate_series(
    delays: Sequence[float] | np.ndarray,
    signal: Sequence[float] | np.ndarray,
    min_points: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Check a (delay, signal) series and return it as float arrays.

    Raises:
        FitError: On too few points, negative or non-finite delays, non-finite or
            all-zero signal
    """
    t = np.asarray(delays, dtype=float)
    y = np.asarray(signal, dtype=float)
    if t.ndim != 1 or t.shape != y.shape:
        raise FitError("delays and signal must be 1-D arrays of equal length")
    if t.size < min_points:
        raise FitError(f"insufficient points: need at least {min_points}, got {t.size}")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(y))):
        raise FitError("series contains non-finite values")
    if np.any(t < 0):
        raise FitError("delays must be non-negative")
    if np.all(y == 0):
        raise FitError("signal is identically zero")
    return t, y


def log_linear_start(t: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """(amplitude, rate) from a straight-line fit of ln y on the positive samples."""
    if t.size == 0:
        raise FitError("no samples to start an exponential fit from")
    positive = y > 0
    if positive.sum() >= 2 and np.ptp(t[positive]) > 0:
        slope, intercept = np.polyfit(t[positive], np.log(y[positive]), 1)
        if slope < 0:
            return float(math.exp(intercept)), float(-slope)
    span = float(np.ptp(t)) or 1.0
    return float(np.max(np.abs(y))), 1.0 / span


def _scales(t: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    t_scale = float(t.max()) if t.max() > 0 else 1.0
    return t_scale, float(np.max(np.abs(y)))


def _exponential_residual(params: Parameters, t: np.ndarray, y: np.ndarray) -> np.ndarray:
    p = params.valuesdict()
    return p["amplitude"] * np.exp(-p["rate"] * t) + p["floor"] - y


def fit_decay(
    delays: Sequence[float] | np.ndarray,
    signal: Sequence[float] | np.ndarray,
    model: DecayModel,
    init: dict[str, float] | None = None,
    floor: bool = False,
) -> FitResult:
    """Fit A·e^{−k·t} (+ B) and map k to the model's physical constant.

    amp_2pe gives T2 = 2/k, int_2pe T2 = 4/k, pop_3pe T1 = 1/k and hole T_h = 1/k.

    Args:
        delays: Swept delay per point (s)
        signal: Echo amplitude, intensity or retrieved amplitude
        model: Decay law
        init: Optional starting values (``amplitude``, ``rate`` or the physical constant)
        floor: Fit an additive floor B

    Returns:
        FitResult with ``amplitude``, ``rate``, the physical constant and ``floor``

    Raises:
        FitError: On invalid input series

    Example:
        >>> t = np.linspace(10e-6, 100e-6, 10)
        >>> round(fit_decay(t, np.exp(-2 * t / 68e-6), "amp_2pe")["t2"] * 1e6, 3)
        68.0
    """
    if model not in DECAY_CONSTANTS:
        raise FitError(f"unknown decay model: {model}")
    name, factor = DECAY_CONSTANTS[model]
    t, y = validate_series(delays, signal, MIN_DECAY_POINTS)
    t_scale, y_scale = _scales(t, y)

    amplitude, rate = log_linear_start(t, y)
    init = init or {}
    amplitude = init.get("amplitude", amplitude)
    rate = init.get("rate", factor / init[name] if name in init else rate)

    params = Parameters()
    params.add("amplitude", value=amplitude / y_scale)
    params.add("rate", value=rate * t_scale, min=0.0)
    params.add("floor", value=init.get("floor", 0.0) / y_scale, vary=floor)

    result = least_squares(_exponential_residual, params, (t / t_scale, y / y_scale), model)
    k = result.params["rate"].value / t_scale
    if not k > 0:
        raise FitError(f"{model}: fitted rate is not positive; the series does not decay")

    values = {
        "amplitude": result.params["amplitude"].value * y_scale,
        "rate": k,
        name: factor / k,
        "floor": result.params["floor"].value * y_scale,
    }
    converged = is_converged(result)
    errors = None
    diagnostics = {} if converged else stop_diagnostics(result)
    if converged:
        rate_error = standard_error(result, "rate") / t_scale
        errors = {
            "amplitude": standard_error(result, "amplitude") * y_scale,
            "rate": rate_error,
            name: factor * rate_error / k**2,
            "floor": standard_error(result, "floor") * y_scale if floor else 0.0,
        }

    logger.info(f"Fitted {model}: {name}={values[name]:.6g} s over {t.size} points")
    return FitResult(
        model_name=model,
        parameters=values,
        units={"amplitude": "a.u.", "rate": "1/s", name: "s", "floor": "a.u."},
        standard_errors=errors,
        residual_norm=math.sqrt(result.chisqr) * y_scale,
        converged=converged,
        n_iterations=result.nfev,
        diagnostics=diagnostics,
    )


def _piecewise_model(p: dict[str, float], t: np.ndarray, breakpoint: float) -> np.ndarray:
    early = p["amplitude"] * np.exp(-p["rate_fast"] * t)
    knee = p["amplitude"] * math.exp(-p["rate_fast"] * breakpoint)
    late = knee * np.exp(-p["rate_slow"] * (t - breakpoint))
    return np.where(t <= breakpoint, early, late)


def _piecewise_residual(
    params: Parameters, t: np.ndarray, y: np.ndarray, breakpoint: float
) -> np.ndarray:
    return _piecewise_model(params.valuesdict(), t, breakpoint) - y


def _sum_residual(params: Parameters, t: np.ndarray, y: np.ndarray) -> np.ndarray:
    p = params.valuesdict()
    return (
        p["amplitude_fast"] * np.exp(-p["rate_fast"] * t)
        + p["amplitude_slow"] * np.exp(-p["rate_slow"] * t)
        - y
    )


def _fit_piecewise(t: np.ndarray, y: np.ndarray, breakpoint: float) -> MinimizerResult:
    early, late = t <= breakpoint, t >= breakpoint
    amplitude, rate_fast = log_linear_start(t[early], y[early])
    _, rate_slow = log_linear_start(t[late], y[late])

    params = Parameters()
    params.add("amplitude", value=amplitude)
    params.add("rate_fast", value=rate_fast, min=0.0)
    params.add("rate_slow", value=rate_slow, min=0.0)
    return least_squares(_piecewise_residual, params, (t, y, breakpoint), "hole_piecewise")


def _fit_sum(t: np.ndarray, y: np.ndarray) -> MinimizerResult:
    third = max(t.size // 3, 2)
    amplitude_slow, rate_slow = log_linear_start(t[-third:], y[-third:])
    remainder = y[:third] - amplitude_slow * np.exp(-rate_slow * t[:third])
    amplitude_fast, rate_fast = log_linear_start(t[:third], remainder)
    if rate_fast <= rate_slow:
        amplitude_fast, rate_fast = max(y[0] - amplitude_slow, 0.1 * y[0]), 3.0 * rate_slow

    params = Parameters()
    params.add("amplitude_fast", value=amplitude_fast, min=0.0)
    params.add("rate_fast", value=rate_fast, min=0.0)
    params.add("amplitude_slow", value=amplitude_slow, min=0.0)
    params.add("rate_slow", value=rate_slow, min=0.0)
    return least_squares(_sum_residual, params, (t, y), "hole_sum")


def _ill_conditioned(result: MinimizerResult) -> bool:
    if not is_converged(result):
        return True
    sigma = np.sqrt(np.diag(result.covar))
    if np.any(sigma == 0):
        # an exact fit leaves a zero covariance
        return result.chisqr > 0
    correlation = result.covar / np.outer(sigma, sigma)
    return bool(np.linalg.cond(correlation) > CONDITION_LIMIT)


def _fallback(t: np.ndarray, y: np.ndarray, reason: str) -> FitResult:
    logger.warning(f"Two-stage hole fit falls back to a single exponential: {reason}")
    single = fit_decay(t, y, "hole")
    return single.model_copy(
        update={"model_name": "hole_two_stage", "flags": [FALLBACK_FLAG]}
    )


def fit_two_stage_hole(
    delays: Sequence[float] | np.ndarray,
    signal: Sequence[float] | np.ndarray,
    breakpoint: float | None = None,
    mode: HoleFitMode = "piecewise",
) -> FitResult:
    """Two hole-lifetime regimes from one retrieval-amplitude series.

    ``piecewise`` fits one exponential up to a breakpoint and a second one after it,
    continuous at the breakpoint; without a given breakpoint every interior sample with
    at least three points on each side is tried and the lowest residual wins. ``sum``
    fits A₁e^{−t/T_fast} + A₂e^{−t/T_slow}. Indistinguishable regimes fall back to a
    single exponential, flagged ``single_exponential_fallback`` and reporting ``t_h``.

    Returns:
        FitResult with ``t_h_fast`` < ``t_h_slow`` (plus ``breakpoint`` when piecewise)

    Raises:
        FitError: On fewer than eight points, an invalid series, or a given breakpoint
            with fewer than two samples on either side
    """
    t, y = validate_series(delays, signal, MIN_HOLE_POINTS)
    order = np.argsort(t)
    t, y = t[order], y[order]
    t_scale, y_scale = _scales(t, y)
    ts, ys = t / t_scale, y / y_scale

    if mode == "sum":
        result = _fit_sum(ts, ys)
        fitted_break = None
    else:
        if breakpoint is not None:
            n_early, n_late = int(np.sum(t <= breakpoint)), int(np.sum(t >= breakpoint))
            if min(n_early, n_late) < 2:
                raise FitError(
                    f"breakpoint {breakpoint:.4g} s leaves {n_early} sample(s) before and "
                    f"{n_late} after it; each side needs at least 2"
                )
            candidates = [breakpoint / t_scale]
        else:
            candidates = list(ts[2:-2])
        fits = [(_fit_piecewise(ts, ys, b), b) for b in candidates]
        result, fitted_break = min(fits, key=lambda pair: pair[0].chisqr)

    if _ill_conditioned(result):
        return _fallback(t, y, "covariance ill-conditioned or missing")

    rates = tuple(result.params[n].value / t_scale for n in ("rate_fast", "rate_slow"))
    if min(rates) <= 0:
        return _fallback(t, y, "a fitted rate is not positive")
    lifetimes = sorted(1.0 / k for k in rates)
    if (lifetimes[1] - lifetimes[0]) / lifetimes[1] < DISTINCT_FRACTION:
        return _fallback(t, y, f"lifetimes {lifetimes[0]:.4g} s and {lifetimes[1]:.4g} s coincide")
    if mode == "sum":
        weights = [result.params[n].value for n in ("amplitude_fast", "amplitude_slow")]
        if min(weights) < MIN_COMPONENT_FRACTION * sum(weights):
            return _fallback(t, y, "one component carries no amplitude")

    flags = []
    if rates[0] < rates[1]:
        flags.append("regimes_reordered")

    errors = {}
    for label, name in (("rate_fast", "t_h_fast"), ("rate_slow", "t_h_slow")):
        k = result.params[label].value / t_scale
        errors[name] = standard_error(result, label) / t_scale / k**2
    if rates[0] < rates[1]:
        errors = {"t_h_fast": errors["t_h_slow"], "t_h_slow": errors["t_h_fast"]}

    values = {"t_h_fast": lifetimes[0], "t_h_slow": lifetimes[1]}
    units = {"t_h_fast": "s", "t_h_slow": "s"}
    if mode == "sum":
        amplitudes = [w * y_scale for w in weights]
        if rates[0] < rates[1]:
            amplitudes.reverse()
        values.update(amplitude_fast=amplitudes[0], amplitude_slow=amplitudes[1])
        units.update(amplitude_fast="a.u.", amplitude_slow="a.u.")
    else:
        values.update(amplitude=result.params["amplitude"].value * y_scale)
        values.update(breakpoint=fitted_break * t_scale)
        units.update(amplitude="a.u.", breakpoint="s")

    logger.info(
        f"Two-stage hole fit ({mode}): T_fast={lifetimes[0]:.4g} s, T_slow={lifetimes[1]:.4g} s"
    )
    return FitResult(
        model_name="hole_two_stage",
        parameters=values,
        units=units,
        standard_errors=errors,
        residual_norm=math.sqrt(result.chisqr) * y_scale,
        converged=True,
        n_iterations=result.nfev,
        flags=flags,
    )
