import xml.etree.ElementTree as ET

import pytest

from geqbit.svgplot import loglog_svg

NS = "{http://www.w3.org/2000/svg}"


def test_structure_and_overlap():
    x = [1e10, 1e12, 1e14]
    svg = loglog_svg(x, {"a": [1e-12, 1e-10, 1e-8], "b": [1e-12, 1e-10, 1e-8], "c <&>": [2e-12, 2e-10, 2e-8]},
                     title="t", vlines={"9N": 1e12})
    root = ET.fromstring(svg)
    lines = [p for p in root.iter(f"{NS}polyline")]
    assert [p.get("data-name") for p in lines] == ["a", "b", "c <&>"]
    assert lines[0].get("stroke-dasharray") is None
    assert lines[1].get("stroke-dasharray") == "6,3"
    assert lines[0].get("points") == lines[1].get("points")
    markers = [e for e in root.iter(f"{NS}line") if e.get("class") == "marker"]
    assert len(markers) == 1 and markers[0].get("stroke-dasharray")


def test_slope_one_is_diagonal_in_decade_units():
    svg = loglog_svg([1.0, 10.0, 100.0], {"s": [1.0, 10.0, 100.0]}, width=400, height=400)
    pts = ET.fromstring(svg).find(f"{NS}polyline").get("points").split()
    xy = [tuple(map(float, p.split(","))) for p in pts]
    dx = xy[1][0] - xy[0][0]
    assert dx == pytest.approx(xy[2][0] - xy[1][0], abs=0.02)
    assert xy[1][1] < xy[0][1]


def test_deterministic_and_rejections():
    args = ([1, 10], {"s": [1, 2]})
    assert loglog_svg(*args) == loglog_svg(*args)
    with pytest.raises(ValueError):
        loglog_svg([0, 1], {"s": [1, 2]})
    with pytest.raises(ValueError):
        loglog_svg([1, 2], {})
    with pytest.raises(ValueError):
        loglog_svg([1, 2], {"s": [0, 0]})
