"""Exact numeric plumbing: decimal text at the boundaries, rationals inside.

Configured decimals must reproduce exactly in computed scores, so values
never pass through binary floats. JSON is parsed with floats mapped to
Decimal, and all arithmetic runs on fractions.Fraction.
"""

from __future__ import annotations

import json
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Union

AttrValue = Union[Fraction, str, bool]

NUMERIC = "numeric"
TEXT = "text"
BOOLEAN = "boolean"
VALUE_KINDS = (NUMERIC, TEXT, BOOLEAN)

# Non-terminating rationals are rendered rounded to this many places.
DISPLAY_PLACES = 12


def kind_of(value: AttrValue) -> str:
    # bool first: bool is a subclass of int and compares equal to 0/1
    if isinstance(value, bool):
        return BOOLEAN
    if isinstance(value, Fraction):
        return NUMERIC
    if isinstance(value, str):
        return TEXT
    raise TypeError(f"not an attribute value: {value!r}")


def parse_decimal(text: str) -> Fraction:
    """Parse a decimal string into an exact Fraction. Rejects NaN/infinity."""
    try:
        d = Decimal(text)
    except (InvalidOperation, ValueError):
        raise ValueError(f"not a decimal: {text!r}") from None
    if not d.is_finite():
        raise ValueError(f"not a finite decimal: {text!r}")
    return Fraction(d)


def to_fraction(value) -> Fraction:
    """Convert an int, Decimal, decimal string or Fraction to a Fraction."""
    if isinstance(value, bool):
        raise ValueError("boolean is not numeric")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ValueError(f"not a finite decimal: {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        return parse_decimal(value)
    raise ValueError(f"not numeric: {value!r}")


def decimal_text(value: Fraction) -> str:
    """Canonical decimal rendering: exact and trailing-zero-free when the
    value terminates, otherwise rounded half-even to DISPLAY_PLACES."""
    num, den = value.numerator, value.denominator
    d = den
    exp2 = exp5 = 0
    while d % 2 == 0:
        d //= 2
        exp2 += 1
    while d % 5 == 0:
        d //= 5
        exp5 += 1
    if d != 1:
        scale = 10**DISPLAY_PLACES
        return decimal_text(Fraction(round(value * scale), scale))
    places = max(exp2, exp5)
    scaled = num * 10**places // den
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled))
    if places == 0:
        return sign + digits
    digits = digits.rjust(places + 1, "0")
    whole, frac = digits[:-places], digits[-places:]
    frac = frac.rstrip("0")
    return sign + whole + ("." + frac if frac else "")


def fixed_text(value: Fraction, places: int = 6) -> str:
    """Fixed-point rendering, round-half-even, trailing zeros kept."""
    scaled = round(value * 10**places)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(places + 1, "0")
    return sign + digits[:-places] + "." + digits[-places:]


def decode_attr_value(obj) -> AttrValue:
    """Decode one attribute value from parsed JSON.

    Numbers (int or Decimal via parse_float) become Fractions, strings stay
    text, booleans stay booleans. A {"decimal": "..."} object carries an
    exact non-integer numeric.
    """
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, Decimal):
        return to_fraction(obj)
    if isinstance(obj, str):
        return obj
    if isinstance(obj, dict) and set(obj) == {"decimal"} and isinstance(obj.get("decimal"), str):
        return parse_decimal(obj["decimal"])
    raise ValueError(f"not an attribute value: {obj!r}")


def encode_attr_value(value: AttrValue):
    """Encode an attribute value for response payloads. Numerics become
    canonical decimal strings so exactness survives any JSON client."""
    if isinstance(value, bool):
        return value
    if isinstance(value, Fraction):
        return decimal_text(value)
    if isinstance(value, str):
        return value
    raise TypeError(f"not an attribute value: {value!r}")


def _reject_constant(text: str):
    raise ValueError(f"non-finite number not allowed: {text}")


def json_loads_exact(text):
    """json.loads with floats parsed as Decimal and NaN/Infinity rejected."""
    return json.loads(text, parse_float=Decimal, parse_constant=_reject_constant)
