import math

import pytest
from hypothesis import given, strategies as st

from pointdata import load_inh_sitemap
from pointdata.core import Dataset
from pointdata.sitemap import (
    MissingCoordinates,
    SiteMap,
    UnknownPoint,
    check_separations,
    point_distance,
)


def test_planar_distance():
    site = SiteMap("m", points={"A": (0, 0), "B": (3, 4)})
    assert point_distance(site, "A", "B") == 5.0
    assert point_distance(site, "A", "A") == 0.0


def test_3d_distance_and_mixed_heights():
    site = SiteMap("m", points={"A": (0, 0, 0), "B": (1, 2, 2), "C": (1, 2)})
    assert point_distance(site, "A", "B") == pytest.approx(3.0)
    assert point_distance(site, "A", "C") == pytest.approx(math.sqrt(5))


def test_unknown_and_placeholder_points():
    site = SiteMap("m", points={"A": (0, 0), "B": None})
    with pytest.raises(UnknownPoint):
        point_distance(site, "A", "Z")
    with pytest.raises(MissingCoordinates):
        point_distance(site, "A", "B")


def test_non_finite_coordinates_rejected():
    with pytest.raises(ValueError):
        SiteMap("m", points={"A": (0, math.nan)})


def test_duplicate_names_rejected():
    with pytest.raises(ValueError):
        SiteMap.from_dict({"map_id": "m", "points": [{"name": "A", "x_m": 0, "y_m": 0}] * 2})


def test_json_round_trip():
    site = SiteMap("m", "InH", {"TX1": (0.0, 0.0, 2.5), "RX1": (24.6, 0.0), "RX2": None})
    assert SiteMap.from_dict(site.to_dict()) == site


points = st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(-50, 50))


@given(a=points, b=points, c=points)
def test_symmetry_and_triangle_inequality(a, b, c):
    site = SiteMap("m", points={"a": a, "b": b, "c": c})
    ab, bc, ac = (point_distance(site, *p) for p in (("a", "b"), ("b", "c"), ("a", "c")))
    assert ab == point_distance(site, "b", "a")
    assert ac <= ab + bc + 1e-9


def _first_record(inh):
    return Dataset(inh.metadata, inh.records[:1])


def test_consistent_map(inh):
    site = SiteMap("m", points={"TX1": (0, 0), "RX1": (24.6, 0)})
    result = check_separations(_first_record(inh), site, 0.5)
    assert result.ok and result.checked == 1 and not result.unresolved


def test_displaced_point(inh):
    site = SiteMap("m", points={"TX1": (0, 0), "RX1": (30, 0)})
    (m,) = check_separations(_first_record(inh), site).mismatches
    assert m.error_m == pytest.approx(5.4)
    assert check_separations(_first_record(inh), site, math.inf).ok


def test_unresolvable_rx(inh):
    site = SiteMap("m", points={"TX1": (0, 0)})
    result = check_separations(_first_record(inh), site)
    assert result.mismatches == ()
    assert result.unresolved[0].missing == ("RX1",)


def test_tx_scoped_rx_names(inh):
    site = SiteMap("m", points={"TX1": (0, 0), "RX1": (99, 0), "TX1/RX1": (0, 24.6)})
    assert check_separations(_first_record(inh), site).ok


def test_placeholder_map_resolves_nothing(inh):
    site = load_inh_sitemap()
    assert set(site.points) == {f"TX{i}" for i in range(1, 5)} | {f"RX{i}" for i in range(1, 7)}
    result = check_separations(inh, site)
    assert result.checked == 0 and len(result.unresolved) == 40 and result.ok
