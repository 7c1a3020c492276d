"""Laser sweeps across the coupled cavity-ion resonance with branch continuation.

A sweep steps the laser monotonically and, at every step, stays on the stable steady
state nearest (in log u) to the one occupied before. When that branch ends the sweep
falls onto the only surviving root, which is the hysteretic jump; the jump edge is then
located by bisection so that the trace resolves it within ``REFINE_FRACTION`` of the span.
"""

import logging
import math
from collections.abc import Sequence

import numpy as np

from src.bistability.model import drive_from_power, transmission
from src.bistability.roots import solve_output
from src.bistability.schemas import BistabilityParams, OutputRoots
from src.model.errors import PreconditionError
from src.model.schemas import SweepDirection, SweepTrace

logger = logging.getLogger(__name__)

REFINE_FRACTION = 1e-3
JUMP_RATIO = 2.0
HYSTERESIS_THRESHOLD = 1e-6

Sample = tuple[float, float, int]


def sweep_grid(params: BistabilityParams, span: float, n_points: int) -> np.ndarray:
    """Ascending laser detunings ω_l − ω_c over [−span, span].

    ``n_points`` evenly spaced detunings cover the span. With atoms present two more sets
    of ``n_points`` are centred on ω_a: one over the power-broadened absorption, ±C·γ_h,
    and one over the bistable window, ±2√C·γ_h.
    """
    if not (math.isfinite(span) and span > 0):
        raise PreconditionError(f"span must be finite and > 0, got {span!r}")
    if n_points < 2:
        raise PreconditionError("a sweep needs at least two points")
    parts = [np.linspace(-span, span, n_points)]
    c = params.cooperativity
    if c > 0:
        centre = params.omega_a - params.omega_c
        for half_width in (c * params.gamma_h, 2.0 * math.sqrt(c) * params.gamma_h):
            window = np.linspace(centre - half_width, centre + half_width, n_points)
            parts.append(window[np.abs(window) <= span])
    return np.unique(np.concatenate(parts))


def _select(roots: OutputRoots, previous: float | None) -> float:
    stable = roots.stable
    if previous is None or previous <= 0:
        return stable[0]
    return min(stable, key=lambda u: abs(math.log(u / previous)))


def _is_jump(previous: float, previous_count: int, u: float, count: int) -> bool:
    branch_ended = previous_count >= 3 and count < 3
    return branch_ended and abs(math.log(u / previous)) > math.log(JUMP_RATIO)


def follow_branch(
    params: BistabilityParams, drive: float, laser_detunings: Sequence[float] | np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Continue the occupied steady state through the given ordered detunings.

    Returns:
        (u at every detuning, number of roots at every detuning)
    """
    us = np.empty(len(laser_detunings))
    counts = np.empty(len(laser_detunings), dtype=np.int64)
    previous = None
    for i, delta in enumerate(laser_detunings):
        roots = solve_output(drive, params.omega_c + delta, params, branch_hint=previous)
        previous = _select(roots, previous)
        us[i], counts[i] = previous, roots.count
    return us, counts


def _locate_jump(
    params: BistabilityParams,
    drive: float,
    start: float,
    stop: float,
    u_start: float,
    tolerance: float,
) -> list[Sample]:
    before: list[Sample] = []
    after: list[Sample] = []
    lo, hi, u_lo = start, stop, u_start
    while abs(hi - lo) > tolerance:
        mid = 0.5 * (lo + hi)
        roots = solve_output(drive, params.omega_c + mid, params, branch_hint=u_lo)
        u = _select(roots, u_lo)
        if roots.count >= 3:
            before.append((mid, u, roots.count))
            lo, u_lo = mid, u
        else:
            after.append((mid, u, roots.count))
            hi = mid
    # bisection visits the post-jump side from the far end inwards
    return before + after[::-1]


def sweep(
    params: BistabilityParams,
    power: float,
    span: float,
    direction: SweepDirection = "forward",
    n_points: int = 2001,
    refine: bool = True,
) -> SweepTrace:
    """Transmission while the laser is swept across ω_c ± span.

    Args:
        params: Model parameters
        power: Laser power in front of the coupler (W), mapped to |y|² by ``drive_from_power``
        span: Half width of the sweep around ω_c (rad/s)
        direction: ``forward`` steps the laser upwards, ``reverse`` downwards
        n_points: Base grid size, see ``sweep_grid``
        refine: Bisect every detected jump down to ``REFINE_FRACTION``·span

    Returns:
        SweepTrace with detunings ω_l − ω_c, transmission and root count per point

    Raises:
        PreconditionError: On a non-positive drive or an invalid span
        RootResolutionError: Propagated from ``solve_output``
    """
    drive = drive_from_power(power, params)
    if drive <= 0:
        raise PreconditionError("a sweep needs a positive drive intensity")
    if direction not in ("forward", "reverse"):
        raise PreconditionError(f"direction must be forward or reverse, got {direction!r}")

    grid = sweep_grid(params, span, n_points)
    if direction == "reverse":
        grid = grid[::-1]
    tolerance = REFINE_FRACTION * span
    logger.info(
        f"Sweeping {direction} at {power * 1e6:.4g} uW (|y|^2={drive:.6g}, "
        f"C={params.cooperativity:.4g}); saturation uses gamma_2 = gamma_h"
    )

    samples: list[Sample] = []
    previous: float | None = None
    previous_count = 0
    jumps = 0
    for delta in grid:
        roots = solve_output(drive, params.omega_c + delta, params, branch_hint=previous)
        u = _select(roots, previous)
        if previous is not None and _is_jump(previous, previous_count, u, roots.count):
            jumps += 1
            if refine:
                samples.extend(
                    _locate_jump(params, drive, samples[-1][0], delta, previous, tolerance)
                )
        samples.append((delta, u, roots.count))
        previous, previous_count = u, roots.count

    detunings = np.array([s[0] for s in samples])
    us = np.array([s[1] for s in samples])
    counts = np.array([s[2] for s in samples], dtype=np.int64)
    detected = transmission(us, drive, params)

    logger.debug(f"{direction} sweep: {detunings.size} points, {jumps} jump(s)")
    return SweepTrace(
        laser_detunings=detunings,
        transmission=detected,
        direction=direction,
        branch_count=counts,
        drive_intensity=drive,
        metadata={
            "power": power,
            "span": span,
            "cooperativity": params.cooperativity,
            "jumps": jumps,
            "refined_points": int(detunings.size - grid.size),
            "coherence_rate_assumption": "gamma_2 = gamma_h",
        },
    )


def hysteresis_width(forward: SweepTrace, reverse: SweepTrace) -> float:
    """Detuning range (rad/s) over which forward and reverse transmissions differ.

    Only detunings sampled by both sweeps are compared; each differing sample counts with
    its local grid spacing.
    """
    shared, i_fwd, i_rev = np.intersect1d(
        forward.laser_detunings, reverse.laser_detunings, return_indices=True
    )
    if shared.size < 2:
        return 0.0
    differ = np.abs(forward.transmission[i_fwd] - reverse.transmission[i_rev])
    spacing = np.gradient(shared)
    return float(np.sum(spacing[differ > HYSTERESIS_THRESHOLD]))
