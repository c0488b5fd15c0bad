import math

import pytest

from geqbit.units import UnitError, hz_to_rad, parse_quantity, rad_to_hz


@pytest.mark.parametrize(
    "text, dim, expected",
    [
        ("0.44T", "field", 0.44),
        ("440mT", "field", 0.44),
        ("0.35K", "temperature", 0.35),
        ("1e10cm-3", "density", 1e16),
        ("4.4e28m-3", "density", 4.4e28),
        ("3GHz", "frequency", 3e9),
        ("6.3MHz", "frequency", 6.3e6),
        ("-100MHz", "frequency", -1e8),
        ("0.6ms", "time", 6e-4),
        ("2/s", "rate", 2.0),
        ("1e-21m3", "volume", 1e-21),
        ("1e6nm3", "volume", 1e-21),
    ],
)
def test_parse(text, dim, expected):
    assert parse_quantity(text, dim) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("text, dim", [("0.44", "field"), ("0.44K", "field"), ("abcT", "field"), ("3 Ghz", "frequency")])
def test_rejects_bare_or_wrong_units(text, dim):
    with pytest.raises(UnitError):
        parse_quantity(text, dim)


def test_angular_round_trip():
    assert rad_to_hz(hz_to_rad(3e9)) == pytest.approx(3e9, rel=1e-15)
    assert hz_to_rad(1.0) == 2 * math.pi
