"""Acceptance checks embedded in experiment configs.

A check is keyed ``<step>.<output>``. Only checks whose step took part in the run are
evaluated; a skipped step leaves its checks undecided (``passed=None``), which does
not fail the run.
"""

import logging
import math
from collections.abc import Mapping, Sequence

from src.model.config import AcceptanceCheck
from src.scenarios.schemas import CheckOutcome, OutputValue, StepRecord

logger = logging.getLogger(__name__)


def describe(check: AcceptanceCheck) -> str:
    """Human-readable criterion, e.g. ``2.15e+05 ± 1%``."""
    if check.expect is not None:
        return f"== {check.expect}"
    if check.target is not None:
        parts = []
        if check.rel_tol is not None:
            parts.append(f"{check.rel_tol:.3g} rel")
        if check.abs_tol is not None:
            parts.append(f"{check.abs_tol:.3g} abs")
        return f"{check.target:.6g} ± {' or '.join(parts)}"
    low = "-inf" if check.min is None else f"{check.min:.6g}"
    high = "inf" if check.max is None else f"{check.max:.6g}"
    return f"in [{low}, {high}]"


def check_value(check: AcceptanceCheck, value: OutputValue) -> bool:
    """Whether ``value`` satisfies ``check``; non-numeric values fail numeric checks."""
    if check.expect is not None:
        return isinstance(value, bool) and value is check.expect
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return False
    if not math.isfinite(value):
        return False
    if check.target is not None:
        error = abs(value - check.target)
        within_abs = check.abs_tol is not None and error <= check.abs_tol
        within_rel = check.rel_tol is not None and error <= check.rel_tol * abs(check.target)
        return within_abs or within_rel
    if check.min is not None and value < check.min:
        return False
    return not (check.max is not None and value > check.max)


def evaluate_checks(
    checks: Mapping[str, AcceptanceCheck], steps: Sequence[StepRecord]
) -> list[CheckOutcome]:
    """Evaluate every check whose step appears in ``steps``.

    Args:
        checks: Acceptance block of the config
        steps: Step records of the run

    Returns:
        Outcomes sorted by key
    """
    records = {s.name: s for s in steps}
    outcomes = []
    for key in sorted(checks):
        step_name, _, output = key.partition(".")
        record = records.get(step_name)
        if record is None:
            continue
        check = checks[key]
        criterion = describe(check)
        if record.status != "ok":
            outcomes.append(CheckOutcome(key=key, passed=None, criterion=criterion))
            continue
        if output not in record.outputs:
            logger.warning(f"Acceptance key {key}: step {step_name} has no output {output!r}")
            outcomes.append(CheckOutcome(key=key, passed=False, criterion=criterion))
            continue
        value = record.outputs[output]
        passed = check_value(check, value)
        if not passed:
            logger.warning(f"Acceptance check failed: {key} = {value!r}, expected {criterion}")
        outcomes.append(CheckOutcome(key=key, passed=passed, value=value, criterion=criterion))
    return outcomes
