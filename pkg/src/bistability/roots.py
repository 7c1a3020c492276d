"""Roots of the implicit steady-state equation |y|² = u·M(u)."""

import logging
import math
from collections.abc import Callable

import numpy as np
from scipy.optimize import brentq

from src.bistability.model import bracket_modulus, modulus_bound
from src.bistability.schemas import BistabilityParams, OutputRoots
from src.model.errors import PreconditionError, RootResolutionError

logger = logging.getLogger(__name__)

INITIAL_GRID_POINTS = 513
MAX_GRID_POINTS = 2**17 + 1
ROOT_RTOL = 1e-10
# widens [Y/M_max, Y] so roots on the bounds stay strictly inside
BOUND_MARGIN = 1e-9


def _root_bounds(
    drive: float, params: BistabilityParams, laser_frequency: float
) -> tuple[float, float]:
    lower = drive / modulus_bound(params, laser_frequency) * (1.0 - BOUND_MARGIN)
    upper = drive * (1.0 + BOUND_MARGIN)
    return lower, upper


def _sign_changes(values: np.ndarray) -> np.ndarray:
    signs = np.sign(values)
    return np.flatnonzero(signs[:-1] * signs[1:] < 0)


def _bracket_roots(
    residual: Callable[[np.ndarray], np.ndarray], lower: float, upper: float, n: int
) -> tuple[np.ndarray, np.ndarray]:
    grid = np.geomspace(lower, upper, n)
    return grid, _sign_changes(residual(grid))


def solve_output(
    drive: float,
    laser_frequency: float,
    params: BistabilityParams,
    branch_hint: float | None = None,
) -> OutputRoots:
    """Every non-negative intracavity intensity u with u·M(u) = |y|².

    All roots lie in [|y|²/M_max, |y|²] because 1 <= M(u) <= M_max. A logarithmic grid over
    that interval is refined from ``INITIAL_GRID_POINTS`` until two successive grids see
    the same number of sign changes; each bracket is then polished with Brent's method to
    a relative tolerance of ``ROOT_RTOL``.

    Args:
        drive: Normalised input intensity |y|²
        laser_frequency: ω_l (rad/s)
        params: Model parameters
        branch_hint: Previously occupied u; the nearest root in log space is flagged

    Returns:
        OutputRoots sorted ascending

    Raises:
        PreconditionError: If the drive is negative
        RootResolutionError: If the root count does not settle before ``MAX_GRID_POINTS``
    """
    if not drive >= 0:
        raise PreconditionError(f"drive intensity |y|^2 must be >= 0, got {drive!r}")
    if drive == 0:
        followed = None if branch_hint is None else 0
        return OutputRoots(roots=[0.0], drive_intensity=0.0, followed=followed)

    def residual(u):
        return u * bracket_modulus(u, params, laser_frequency) - drive

    lower, upper = _root_bounds(drive, params, laser_frequency)
    n = INITIAL_GRID_POINTS
    grid, brackets = _bracket_roots(residual, lower, upper, n)
    while True:
        if 2 * n - 1 > MAX_GRID_POINTS:
            raise RootResolutionError(
                f"grid refinement exhausted at {n} points: root count still changing "
                f"(|y|^2={drive:.6g}, omega_l={laser_frequency:.6g})"
            )
        # 2n − 1 points keep every previous grid point
        n = 2 * n - 1
        finer_grid, finer_brackets = _bracket_roots(residual, lower, upper, n)
        settled = finer_brackets.size == brackets.size
        grid, brackets = finer_grid, finer_brackets
        if settled:
            break

    roots = [
        brentq(residual, grid[i], grid[i + 1], xtol=ROOT_RTOL * grid[i], rtol=ROOT_RTOL)
        for i in brackets
    ]

    followed = None
    if branch_hint is not None and branch_hint > 0:
        followed = int(np.argmin([abs(math.log(u / branch_hint)) for u in roots]))
    return OutputRoots(roots=roots, drive_intensity=drive, followed=followed, grid_points=n)


def count_roots_bruteforce(
    drive: float,
    laser_frequency: float,
    params: BistabilityParams,
    n_grid: int = 200_001,
) -> int:
    """Number of sign changes of u·M(u) − |y|² on one dense logarithmic grid."""
    if drive == 0:
        return 1
    lower, upper = _root_bounds(drive, params, laser_frequency)
    u = np.geomspace(lower, upper, n_grid)
    return int(_sign_changes(u * bracket_modulus(u, params, laser_frequency) - drive).size)


def bistable_drive_window(
    params: BistabilityParams,
    laser_frequency: float,
    u_range: tuple[float, float] = (1e-6, 1e9),
    n_grid: int = 200_001,
) -> tuple[float, float] | None:
    """Drive interval with three steady states at a fixed laser frequency.

    The input-output curve |y|²(u) = u·M(u) has a local maximum and a local minimum
    exactly when the response is bistable; the window lies between their values.

    Returns:
        (|y|² at the local minimum, |y|² at the local maximum), or None without a window
    """
    u = np.geomspace(*u_range, n_grid)
    drive = u * bracket_modulus(u, params, laser_frequency)
    slope_sign = np.sign(np.diff(drive))
    turns = np.flatnonzero(slope_sign[:-1] != slope_sign[1:]) + 1
    if turns.size < 2:
        return None
    upper, lower = float(drive[turns[0]]), float(drive[turns[1]])
    logger.debug(f"Bistable window at omega_l={laser_frequency:.6g}: [{lower:.6g}, {upper:.6g}]")
    return lower, upper
