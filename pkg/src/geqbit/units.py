"""Quantity strings with explicit unit suffixes, e.g. ``0.44T`` or ``1e10cm-3``.

Bare numbers are rejected for dimensioned quantities; conversion to SI happens
here and nowhere else.
"""

from __future__ import annotations

import math
import re

__all__ = ["UnitError", "parse_quantity", "PER_CM3", "to_per_cm3", "from_per_cm3", "hz_to_rad", "rad_to_hz"]

PER_CM3 = 1e6  # m^-3 per cm^-3


class UnitError(ValueError):
    pass


# dimension -> {suffix: factor to SI}
_UNITS: dict[str, dict[str, float]] = {
    "field": {"T": 1.0, "mT": 1e-3},
    "temperature": {"K": 1.0, "mK": 1e-3},
    "density": {"cm-3": PER_CM3, "m-3": 1.0},
    "frequency": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9},
    "rate": {"s-1": 1.0, "/s": 1.0, "ms-1": 1e3},
    "length": {"m": 1.0, "um": 1e-6, "nm": 1e-9, "pm": 1e-12},
    "volume": {"m3": 1.0, "cm3": 1e-6, "um3": 1e-18, "nm3": 1e-27},
}

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_PATTERN = re.compile(rf"^\s*({_NUM})\s*([A-Za-z/][A-Za-z0-9/\-]*)\s*$")


def parse_quantity(text: str, dimension: str) -> float:
    """Return the SI value of ``text``, which must carry a unit of ``dimension``.

    Frequencies come back in ordinary Hz; callers convert to rad/s.

    >>> parse_quantity("0.44T", "field")
    0.44
    >>> parse_quantity("1e10cm-3", "density")
    1e+16
    """
    table = _UNITS[dimension]
    m = _PATTERN.match(str(text))
    if m is None:
        raise UnitError(f"{text!r}: expected a number followed by one of {sorted(table)}")
    value, suffix = float(m.group(1)), m.group(2)
    if suffix not in table:
        raise UnitError(f"{text!r}: unit {suffix!r} is not a {dimension} unit (use one of {sorted(table)})")
    out = value * table[suffix]
    if not math.isfinite(out):
        raise UnitError(f"{text!r}: not finite")
    return out


def to_per_cm3(n_si: float) -> float:
    return n_si / PER_CM3


def from_per_cm3(n_cgs: float) -> float:
    return n_cgs * PER_CM3


def hz_to_rad(f: float) -> float:
    return 2.0 * math.pi * f


def rad_to_hz(omega: float) -> float:
    return omega / (2.0 * math.pi)
