"""Shared lmfit driver.

Every nonlinear fit goes through ``least_squares``: Levenberg-Marquardt from
``lmfit.Minimizer.leastsq`` with a relative step tolerance of ``STEP_TOLERANCE`` and at
most ``MAX_ITERATIONS`` Jacobian updates.
"""

import logging
from collections.abc import Callable

import numpy as np
from lmfit import Minimizer, Parameters
from lmfit.minimizer import MinimizerResult

logger = logging.getLogger(__name__)

STEP_TOLERANCE = 1e-9
MAX_ITERATIONS = 200


def least_squares(
    residual: Callable[..., np.ndarray],
    params: Parameters,
    args: tuple = (),
    label: str = "fit",
    epsfcn: float | None = None,
) -> MinimizerResult:
    """Minimise ‖residual(params, *args)‖² from the given starting point.

    Args:
        residual: Function returning model − data
        params: Starting values and bounds
        args: Extra positional arguments for the residual
        label: Name used in log messages
        epsfcn: Squared relative step of the finite-difference Jacobian; MINPACK default
            when None

    Returns:
        lmfit result; check ``is_converged`` before trusting the errors
    """
    n_free = sum(1 for p in params.values() if p.vary)
    minimizer = Minimizer(residual, params, fcn_args=args)
    result = minimizer.leastsq(
        xtol=STEP_TOLERANCE,
        ftol=STEP_TOLERANCE,
        max_nfev=MAX_ITERATIONS * (n_free + 1),
        epsfcn=epsfcn,
    )
    logger.debug(
        f"{label}: success={result.success}, nfev={result.nfev}, "
        f"chisqr={result.chisqr:.6g}, errorbars={result.errorbars}"
    )
    if not is_converged(result):
        logger.warning(f"{label}: optimiser stopped without convergence ({result.message})")
    return result


def is_converged(result: MinimizerResult) -> bool:
    """True when the optimiser succeeded and the Jacobian gave a covariance matrix."""
    return bool(result.success and result.covar is not None)


def standard_error(result: MinimizerResult, name: str) -> float:
    """One-sigma error of a parameter, 0.0 when lmfit could not estimate it."""
    stderr = result.params[name].stderr
    return float(stderr) if stderr is not None else 0.0


def stop_diagnostics(result: MinimizerResult) -> dict[str, float | bool | str]:
    """Why and where the optimiser stopped, for results that did not converge."""
    return {
        "success": bool(result.success),
        "message": str(result.message),
        "nfev": float(result.nfev),
        "errorbars": bool(result.errorbars),
    }
