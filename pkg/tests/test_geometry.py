"""Geodesic primitives: known distances, projection, sub-path extraction.

Expected values are either textbook sphere arcs (radius 6,371,000 m) or
frozen outputs of independent hand computations noted inline.
"""

import math

import numpy as np
import pytest

from stopspacing.errors import InvalidRange
from stopspacing.geometry import (
    EARTH_RADIUS_M,
    METERS_PER_DEGREE,
    GeoPoint,
    Path,
    great_circle_distance,
    min_distances_to_path,
    path_length,
    point_to_path_distance,
    project_point_onto_path,
    substring_path,
)


class TestGreatCircle:
    def test_one_degree_longitude_at_equator(self):
        # arc = R * pi / 180 = 111,194.92664... m
        d = great_circle_distance(GeoPoint(0.0, 0.0), GeoPoint(0.0, 1.0))
        assert d == pytest.approx(111194.93, abs=0.01)

    def test_one_degree_latitude_anywhere(self):
        for lon in (0.0, 17.5, -121.2):
            d = great_circle_distance(GeoPoint(10.0, lon), GeoPoint(11.0, lon))
            assert d == pytest.approx(METERS_PER_DEGREE, abs=1e-6)

    def test_antipodal_half_circumference(self):
        d = great_circle_distance(GeoPoint(0.0, 0.0), GeoPoint(0.0, 180.0))
        assert d == pytest.approx(math.pi * EARTH_RADIUS_M, abs=1.0)

    def test_zero_distance(self):
        assert great_circle_distance(GeoPoint(42.0, -71.0), GeoPoint(42.0, -71.0)) == 0.0

    def test_symmetry(self):
        a, b = GeoPoint(48.8566, 2.3522), GeoPoint(40.7128, -74.0060)
        assert great_circle_distance(a, b) == pytest.approx(
            great_circle_distance(b, a), rel=1e-12
        )

    def test_known_city_pair(self):
        # Paris <-> New York on this sphere: 5,837,240.904 m, frozen from an
        # independent spherical-law-of-cosines computation on R=6371 km.
        d = great_circle_distance(GeoPoint(48.8566, 2.3522), GeoPoint(40.7128, -74.0060))
        assert d == pytest.approx(5837240.904, abs=0.5)

    def test_coordinate_validation(self):
        with pytest.raises(ValueError):
            GeoPoint(91.0, 0.0)
        with pytest.raises(ValueError):
            GeoPoint(0.0, 180.5)


class TestPath:
    def test_length_sums_edges(self):
        p = Path([0.0, 0.0, 0.0], [0.0, 0.5, 1.0])
        assert path_length(p) == pytest.approx(METERS_PER_DEGREE, rel=1e-12)
        assert p.cumulative_m[0] == 0.0
        assert np.all(np.diff(p.cumulative_m) >= 0)

    def test_needs_two_points(self):
        with pytest.raises(ValueError):
            Path([0.0], [0.0])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Path([0.0, 95.0], [0.0, 0.0])

    def test_arrays_are_read_only(self):
        p = Path([0.0, 1.0], [0.0, 1.0])
        with pytest.raises(ValueError):
            p.lats[0] = 5.0


class TestPointToPath:
    def test_point_on_path_is_zero(self):
        p = Path([0.0, 0.0], [0.0, 1.0])
        assert point_to_path_distance(p, GeoPoint(0.0, 0.5)) == pytest.approx(0.0, abs=1e-6)

    def test_perpendicular_offset(self):
        # 0.001 deg latitude north of an equatorial edge = 111.19 m
        p = Path([0.0, 0.0], [0.0, 1.0])
        d = point_to_path_distance(p, GeoPoint(0.001, 0.5))
        assert d == pytest.approx(0.001 * METERS_PER_DEGREE, rel=1e-6)

    def test_beyond_endpoint_clamps(self):
        p = Path([0.0, 0.0], [0.0, 1.0])
        d = point_to_path_distance(p, GeoPoint(0.0, 1.001))
        assert d == pytest.approx(0.001 * METERS_PER_DEGREE, rel=1e-4)

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(7)
        p = Path(rng.uniform(40.0, 40.01, 6), rng.uniform(-74.01, -74.0, 6))
        lats = rng.uniform(40.0, 40.01, 50)
        lons = rng.uniform(-74.01, -74.0, 50)
        batch = min_distances_to_path(p, lats, lons)
        for i in range(lats.size):
            single = point_to_path_distance(p, GeoPoint(lats[i], lons[i]))
            assert batch[i] == single  # bit-identical, same code path


class TestProjection:
    def test_projection_lands_at_expected_distance(self):
        p = Path([0.0, 0.0], [0.0, 1.0])
        pos = project_point_onto_path(p, GeoPoint(0.0, 0.25))
        assert pos.distance_along_m == pytest.approx(0.25 * METERS_PER_DEGREE, rel=1e-9)
        assert pos.offset_m == pytest.approx(0.0, abs=1e-6)

    def test_monotone_floor_picks_second_pass(self):
        # out-and-back over the same street: same point appears twice
        p = Path([0.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        first = project_point_onto_path(p, GeoPoint(0.0, 0.2))
        assert first.distance_along_m == pytest.approx(0.2 * METERS_PER_DEGREE, rel=1e-9)
        second = project_point_onto_path(
            p, GeoPoint(0.0, 0.2), min_distance_along_m=p.length_m / 2.0
        )
        assert second.distance_along_m == pytest.approx(1.8 * METERS_PER_DEGREE, rel=1e-9)

    def test_tie_goes_to_smallest_distance_along(self):
        p = Path([0.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        pos = project_point_onto_path(p, GeoPoint(0.0, 0.5))
        assert pos.distance_along_m == pytest.approx(0.5 * METERS_PER_DEGREE, rel=1e-9)


class TestSubstring:
    def test_whole_path_round_trip(self):
        p = Path([0.0, 0.1, 0.3], [0.0, 0.2, 0.25])
        sub = substring_path(p, 0.0, p.length_m)
        assert np.allclose(sub.lats, p.lats, atol=1e-12)
        assert np.allclose(sub.lons, p.lons, atol=1e-12)

    def test_vertex_cut_preserves_coordinates_exactly(self):
        p = Path([0.0, 0.1, 0.3], [0.0, 0.2, 0.25])
        at_vertex = float(p.cumulative_m[1])
        sub = substring_path(p, at_vertex, p.length_m)
        assert sub.lats[0] == p.lats[1] and sub.lons[0] == p.lons[1]

    def test_cut_length_matches_requested(self):
        p = Path([0.0, 0.0], [0.0, 1.0])
        third = p.length_m / 3.0
        sub = substring_path(p, third, 2.0 * third)
        assert sub.length_m == pytest.approx(third, rel=1e-9)

    def test_additivity_on_random_paths(self):
        rng = np.random.default_rng(20250801)
        for _ in range(200):
            n = rng.integers(2, 9)
            lat0 = rng.uniform(-60.0, 60.0)
            lon0 = rng.uniform(-179.0, 179.0)
            p = Path(
                lat0 + np.cumsum(rng.uniform(-0.01, 0.01, n)),
                lon0 + np.cumsum(rng.uniform(-0.01, 0.01, n)),
            )
            if p.length_m == 0.0:
                continue
            a, b, c = np.sort(rng.uniform(0.0, p.length_m, 3))
            left = substring_path(p, a, b).length_m
            right = substring_path(p, b, c).length_m
            whole = substring_path(p, a, c).length_m
            assert left + right == pytest.approx(whole, rel=1e-6, abs=1e-6)

    def test_invalid_ranges(self):
        p = Path([0.0, 0.0], [0.0, 1.0])
        with pytest.raises(InvalidRange):
            substring_path(p, -5.0, 10.0)
        with pytest.raises(InvalidRange):
            substring_path(p, 0.0, p.length_m + 5.0)
        with pytest.raises(InvalidRange):
            substring_path(p, 100.0, 50.0)
