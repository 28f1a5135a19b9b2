"""Shared fixtures: synthetic feeds with hand-computable ground truth."""

import pytest

from stopspacing import synthetic
from stopspacing.feed import parse_feed
from stopspacing.segments import extract_segments
from stopspacing.service_calendar import busiest_day
from stopspacing.synthetic import metric_to_lonlat, write_feed


@pytest.fixture(scope="session")
def two_route_zip(tmp_path_factory):
    dest = tmp_path_factory.mktemp("feeds") / "two_route.zip"
    return synthetic.build_two_route_feed(dest)


@pytest.fixture(scope="session")
def two_route_feed(two_route_zip):
    return parse_feed(two_route_zip)


@pytest.fixture(scope="session")
def two_route_table(two_route_feed):
    day, _ = busiest_day(two_route_feed)
    return extract_segments(two_route_feed, day)


@pytest.fixture(scope="session")
def load_map_path(tmp_path_factory):
    dest = tmp_path_factory.mktemp("loads") / "loads.csv"
    return synthetic.write_load_map(dest)


@pytest.fixture(scope="session")
def signals_path(tmp_path_factory):
    dest = tmp_path_factory.mktemp("signals") / "signals.csv"
    return synthetic.write_signals(dest)


def grid_tables():
    """Shapeless out-and-back route; straight-line fallback segments.

    Stops A(0,0) B(600,0) C(600,500) in planar meters; trips A->B->C
    (direction 0) and C->B->A (direction 1), one departure each, running on
    two dates defined purely through calendar_dates additions.
    """
    coords = {"A": (0.0, 0.0), "B": (600.0, 0.0), "C": (600.0, 500.0)}
    stops = []
    for stop_id, (x, y) in sorted(coords.items()):
        lon, lat = metric_to_lonlat(x, y)
        stops.append(
            {"stop_id": stop_id, "stop_name": stop_id,
             "stop_lat": f"{lat:.10f}", "stop_lon": f"{lon:.10f}"}
        )
    return {
        "stops": stops,
        "routes": [{"route_id": "blue", "route_short_name": "B", "route_type": 3}],
        "trips": [
            {"route_id": "blue", "service_id": "wk", "trip_id": "out",
             "direction_id": 0},
            {"route_id": "blue", "service_id": "wk", "trip_id": "back",
             "direction_id": 1},
        ],
        "stop_times": (
            synthetic.stop_time_rows("out", ["A", "B", "C"], 7 * 3600)
            + synthetic.stop_time_rows("back", ["C", "B", "A"], 8 * 3600)
        ),
        "calendar_dates": [
            {"service_id": "wk", "date": "20250810", "exception_type": 1},
            {"service_id": "wk", "date": "20250811", "exception_type": 1},
        ],
    }


@pytest.fixture(scope="session")
def grid_zip(tmp_path_factory):
    dest = tmp_path_factory.mktemp("feeds") / "grid.zip"
    return write_feed(dest, grid_tables())


def seeded_tables():
    """Single route whose shape and stop_times carry shape_dist_traveled.

    Distances are in kilometers (a different unit than the geometry) to
    check that seeding only uses them for interpolation, never as lengths.
    Segment lengths: E-F 700 m (300 + 400), F-G 500 m.
    """
    shape_m = [(0.0, 0.0), (300.0, 0.0), (300.0, 400.0), (800.0, 400.0)]
    stops_m = {"E": (0.0, 0.0), "F": (300.0, 400.0), "G": (800.0, 400.0)}
    cumulative_km = [0.0, 0.3, 0.7, 1.2]
    shapes = []
    for i, ((x, y), km) in enumerate(zip(shape_m, cumulative_km), start=1):
        lon, lat = metric_to_lonlat(x, y)
        shapes.append(
            {"shape_id": "zig", "shape_pt_lat": f"{lat:.10f}",
             "shape_pt_lon": f"{lon:.10f}", "shape_pt_sequence": i,
             "shape_dist_traveled": f"{km:g}"}
        )
    stops = []
    for stop_id, (x, y) in sorted(stops_m.items()):
        lon, lat = metric_to_lonlat(x, y)
        stops.append(
            {"stop_id": stop_id, "stop_name": stop_id,
             "stop_lat": f"{lat:.10f}", "stop_lon": f"{lon:.10f}"}
        )
    stop_times = []
    for trip_no in range(3):
        trip_id = f"red_{trip_no}"
        for seq, (stop_id, km) in enumerate([("E", 0.0), ("F", 0.7), ("G", 1.2)], start=1):
            t = synthetic.fmt_time(6 * 3600 + trip_no * 1800 + seq * 120)
            stop_times.append(
                {"trip_id": trip_id, "arrival_time": t, "departure_time": t,
                 "stop_id": stop_id, "stop_sequence": seq,
                 "shape_dist_traveled": f"{km:g}"}
            )
    return {
        "stops": stops,
        "routes": [{"route_id": "red", "route_short_name": "R", "route_type": 3}],
        "trips": [
            {"route_id": "red", "service_id": "mon", "trip_id": f"red_{i}",
             "direction_id": 0, "shape_id": "zig"}
            for i in range(3)
        ],
        "stop_times": stop_times,
        "shapes": shapes,
        "calendar": [
            {"service_id": "mon",
             "monday": 1, "tuesday": 0, "wednesday": 0, "thursday": 0,
             "friday": 0, "saturday": 0, "sunday": 0,
             "start_date": "20250505", "end_date": "20250505"}
        ],
    }


@pytest.fixture(scope="session")
def seeded_zip(tmp_path_factory):
    dest = tmp_path_factory.mktemp("feeds") / "seeded.zip"
    return write_feed(dest, seeded_tables())


def long_segment_tables():
    """One 500 m segment plus one 20,900 m segment (threshold test bed)."""
    coords = {"A": (0.0, 0.0), "B": (500.0, 0.0), "C": (21400.0, 0.0)}
    stops = []
    for stop_id, (x, y) in sorted(coords.items()):
        lon, lat = metric_to_lonlat(x, y)
        stops.append(
            {"stop_id": stop_id, "stop_name": stop_id,
             "stop_lat": f"{lat:.10f}", "stop_lon": f"{lon:.10f}"}
        )
    return {
        "stops": stops,
        "routes": [{"route_id": "x", "route_short_name": "X", "route_type": 3}],
        "trips": [{"route_id": "x", "service_id": "day", "trip_id": "x1",
                   "direction_id": 0}],
        "stop_times": synthetic.stop_time_rows("x1", ["A", "B", "C"], 6 * 3600),
        "calendar_dates": [
            {"service_id": "day", "date": "20250601", "exception_type": 1}
        ],
    }


@pytest.fixture(scope="session")
def long_segment_zip(tmp_path_factory):
    dest = tmp_path_factory.mktemp("feeds") / "long_segment.zip"
    return write_feed(dest, long_segment_tables())
