"""Unit conventions.

Everything inside the lab is SI with angular frequencies in rad/s. Units only appear at
the edges: pint parses quantities written in config files, and ``format_over_2pi`` turns
a rate into the "2π × f" form used in reports.
"""

import math
from typing import Annotated, Any

import pint
from pydantic import BeforeValidator, Field

ureg = pint.UnitRegistry()

AngularRate = Annotated[float, Field(description="angular frequency, rad/s")]


def to_over_2pi(rate: float) -> float:
    """Convert an angular rate to ordinary frequency.

    Args:
        rate: Angular frequency in rad/s (detunings may be negative)

    Returns:
        rate / (2π) in Hz
    """
    return rate / (2.0 * math.pi)


def from_over_2pi(frequency_hz: float) -> float:
    """Convert an ordinary frequency in Hz to an angular rate in rad/s."""
    return 2.0 * math.pi * frequency_hz


def format_over_2pi(rate: float, unit: str = "kHz", digits: int = 4) -> str:
    """Render a rate the way it is quoted in tables, e.g. ``2π × 1.73 kHz``."""
    quantity = ureg.Quantity(to_over_2pi(rate), "Hz").to(unit)
    return f"2π × {quantity.magnitude:.{digits}g} {unit}"


def parse_quantity(value: Any, si_unit: str) -> float:
    """Parse a config value into an SI float.

    Numbers (and numeric strings) are taken as already being in SI units. Other strings
    go through pint, so ``"605.977 nm"``, ``"68 us"`` or ``"2*pi*123 MHz"`` all work.

    Args:
        value: Raw value from the config file
        si_unit: Target unit understood by pint (``"m"``, ``"s"``, ``"1/s"``, ...)

    Returns:
        Magnitude in ``si_unit``

    Raises:
        ValueError: If the string cannot be parsed or has the wrong dimension
    """
    if isinstance(value, bool):
        raise ValueError(f"expected a quantity in {si_unit}, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ValueError(f"expected a number or a quantity string, got {type(value).__name__}")

    text = value.strip().replace("π", "pi").replace("×", "*")
    try:
        return float(text)
    except ValueError:
        pass

    try:
        quantity = ureg.Quantity(text)
        return float(quantity.to(si_unit).magnitude)
    except pint.DimensionalityError as e:
        raise ValueError(f"'{value}' is not convertible to {si_unit}") from e
    except (pint.errors.PintError, SyntaxError, AttributeError, TypeError) as e:
        raise ValueError(f"cannot parse quantity '{value}'") from e


def _si(unit: str) -> BeforeValidator:
    return BeforeValidator(lambda v: parse_quantity(v, unit))


# Config field types: accept SI numbers or pint strings, store SI floats.
Length = Annotated[float, _si("m")]
Duration = Annotated[float, _si("s")]
Rate = Annotated[float, _si("1/s")]
Power = Annotated[float, _si("W")]
Volume = Annotated[float, _si("m**3")]
DipoleMoment = Annotated[float, _si("C*m")]
Dimensionless = Annotated[float, _si("dimensionless")]
Angle = Annotated[float, _si("rad")]
