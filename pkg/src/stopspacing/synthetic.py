"""Synthetic GTFS fixtures with hand-computable expected values.

The flagship network is a two-route system laid out in planar meters near
the equator and converted to degrees, so segment lengths are known exactly
by construction:

* Orange (route_type 3): a loop serving stops 1 -> 2 -> 3 -> 4 -> 1 over
  segments of 200 / 250 / 800 / 900 m, with a 250 m depot lead-in and
  lead-out on the shape (deadhead that must be excluded).  Runs every
  600 s from 06:00 to 26:00 -> 120 trips/day.
* Green (route_type 700, an extended bus type): 5 -> 3 -> 4 -> 1 over
  1000 / 800 / 900 m, sharing the 3->4 and 4->1 paths with Orange.  Runs
  every 600 s from 06:00 to 16:00 -> 60 trips/day.
* A ferry route (route_type 4) over stops 1 -> 5 that must be ignored.

Expected segment table: 5 unique segments, 7 (segment, route, direction)
rows, 660 traversals, and weighted means

    segment 630.0, route 4850/7, traversal 420000/660, load 35500/85 m

with loads 30/30/10/10/5 on segments 1-2 / 2-3 / 3-4 / 4-1 / 5-3.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
import os
import zipfile
from dataclasses import dataclass
from pathlib import Path

from .geometry import METERS_PER_DEGREE


def fmt_time(seconds: int) -> str:
    """Seconds since midnight to HH:MM:SS; hours may exceed 24."""
    return f"{seconds // 3600:02d}:{seconds % 3600 // 60:02d}:{seconds % 60:02d}"


def metric_to_lonlat(x_m: float, y_m: float) -> tuple[float, float]:
    """Planar meters (x east, y north) to (lon, lat) degrees near (0, 0)."""
    return x_m / METERS_PER_DEGREE, y_m / METERS_PER_DEGREE


def dogleg_waypoint(
    a: tuple[float, float], b: tuple[float, float], leg_m: float
) -> tuple[float, float]:
    """Point W with |a-W| = |W-b| = leg_m, offset to the left of a->b.

    Bends a straight hop into two equal legs so the path length between two
    stops can be dialed to any value >= the straight-line distance.
    """
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    straight = math.hypot(dx, dy)
    if 2 * leg_m < straight:
        raise ValueError(f"legs of {leg_m} m cannot span {straight} m")
    half = straight / 2.0
    offset = math.sqrt(leg_m * leg_m - half * half)
    ux, uy = dx / straight, dy / straight
    return (ax + bx) / 2.0 - uy * offset, (ay + by) / 2.0 + ux * offset


def write_feed(dest: str | os.PathLike, tables: dict[str, list[dict]]) -> Path:
    """Write GTFS tables to ``dest`` (a .zip file or a directory).

    Column order is the union of row keys in first-seen order.
    """
    dest = Path(dest)

    def render(rows: list[dict]) -> str:
        columns: list[str] = []
        for row in rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([row.get(col, "") for col in columns])
        return buffer.getvalue()

    if dest.suffix == ".zip":
        dest.parent.mkdir(parents=True, exist_ok=True)
        with zipfile.ZipFile(dest, "w", zipfile.ZIP_DEFLATED) as archive:
            for name, rows in tables.items():
                archive.writestr(f"{name}.txt", render(rows))
    else:
        dest.mkdir(parents=True, exist_ok=True)
        for name, rows in tables.items():
            (dest / f"{name}.txt").write_text(render(rows), encoding="utf-8")
    return dest


# --- the two-route network -------------------------------------------------

# stop positions in planar meters
_STOPS_M = {
    "s1": (0.0, 0.0),
    "s2": (200.0, 0.0),
    "s3": (450.0, 0.0),
    "s4": (200.0, -700.0),
    "s5": (1450.0, 0.0),
}
_DEPOT_M = (-250.0, 0.0)

# dogleg waypoints giving the 3->4 stretch 800 m and 4->1 stretch 900 m
_W34 = dogleg_waypoint(_STOPS_M["s3"], _STOPS_M["s4"], 400.0)
_W41 = dogleg_waypoint(_STOPS_M["s4"], _STOPS_M["s1"], 450.0)

SERVICE_START = dt.date(2025, 8, 1)
SERVICE_END = dt.date(2025, 8, 31)


@dataclass(frozen=True)
class TwoRouteExpectations:
    """Hand-enumerated ground truth for the two-route network."""

    busiest_day: dt.date = SERVICE_START  # every day ties; earliest wins
    n_unique_segments: int = 5
    n_rows: int = 7
    n_traversals: int = 660  # 120 Orange trips x 4 segments + 60 Green x 3
    total_service_km: float = 420.0
    segment_mean_m: float = 630.0  # (200+250+800+900+1000) / 5
    route_mean_m: float = 4850.0 / 7.0  # 3->4 and 4->1 carry two routes
    traversal_mean_m: float = 420000.0 / 660.0
    load_mean_m: float = 35500.0 / 85.0

    @property
    def segment_lengths_m(self) -> dict[tuple[str, str], float]:
        return dict(_SEGMENT_LENGTHS)

    @property
    def loads(self) -> dict[tuple[str, str], float]:
        return dict(_LOADS)

    @property
    def traversals_per_segment(self) -> dict[tuple[str, str], int]:
        return {
            ("s1", "s2"): 120,
            ("s2", "s3"): 120,
            ("s3", "s4"): 180,
            ("s4", "s1"): 180,
            ("s5", "s3"): 60,
        }


_SEGMENT_LENGTHS = {
    ("s1", "s2"): 200.0,
    ("s2", "s3"): 250.0,
    ("s3", "s4"): 800.0,
    ("s4", "s1"): 900.0,
    ("s5", "s3"): 1000.0,
}

_LOADS = {
    ("s1", "s2"): 30.0,
    ("s2", "s3"): 30.0,
    ("s3", "s4"): 10.0,
    ("s4", "s1"): 10.0,
    ("s5", "s3"): 5.0,
}

TWO_ROUTE = TwoRouteExpectations()


def shape_rows(shape_id: str, points_m: list[tuple[float, float]]) -> list[dict]:
    rows = []
    for i, (x, y) in enumerate(points_m, start=1):
        lon, lat = metric_to_lonlat(x, y)
        rows.append(
            {
                "shape_id": shape_id,
                "shape_pt_lat": f"{lat:.10f}",
                "shape_pt_lon": f"{lon:.10f}",
                "shape_pt_sequence": i,
            }
        )
    return rows


def stop_time_rows(trip_id: str, stop_ids: list[str], start_s: int) -> list[dict]:
    rows = []
    for i, stop_id in enumerate(stop_ids):
        t = fmt_time(start_s + 60 * i)
        rows.append(
            {
                "trip_id": trip_id,
                "arrival_time": t,
                "departure_time": t,
                "stop_id": stop_id,
                "stop_sequence": i + 1,
            }
        )
    return rows


def two_route_tables() -> dict[str, list[dict]]:
    """GTFS tables for the two-route network (see module docstring)."""
    stops = []
    for stop_id, (x, y) in sorted(_STOPS_M.items()):
        lon, lat = metric_to_lonlat(x, y)
        stops.append(
            {
                "stop_id": stop_id,
                "stop_name": f"Stop {stop_id[1]}",
                "stop_lat": f"{lat:.10f}",
                "stop_lon": f"{lon:.10f}",
            }
        )

    routes = [
        {"route_id": "orange", "route_short_name": "O", "route_type": 3},
        {"route_id": "green", "route_short_name": "G", "route_type": 700},
        {"route_id": "ferry", "route_short_name": "F", "route_type": 4},
    ]

    # Orange loops 1->2->3->4->1 with a depot lead-in/out on the shape only
    orange_shape = [
        _DEPOT_M,
        _STOPS_M["s1"],
        _STOPS_M["s3"],  # straight through s2
        _W34,
        _STOPS_M["s4"],
        _W41,
        _STOPS_M["s1"],
        _DEPOT_M,
    ]
    green_shape = [
        _STOPS_M["s5"],
        _STOPS_M["s3"],
        _W34,
        _STOPS_M["s4"],
        _W41,
        _STOPS_M["s1"],
    ]
    shapes = shape_rows("shp_orange", orange_shape) + shape_rows(
        "shp_green", green_shape
    )

    trips = [
        {
            "route_id": "orange",
            "service_id": "daily",
            "trip_id": "orange_loop",
            "direction_id": 0,
            "shape_id": "shp_orange",
        },
        {
            "route_id": "green",
            "service_id": "daily",
            "trip_id": "green_inbound",
            "direction_id": 0,
            "shape_id": "shp_green",
        },
        {
            "route_id": "ferry",
            "service_id": "daily",
            "trip_id": "ferry_crossing",
            "direction_id": 0,
        },
    ]

    stop_times = (
        stop_time_rows("orange_loop", ["s1", "s2", "s3", "s4", "s1"], 6 * 3600)
        + stop_time_rows("green_inbound", ["s5", "s3", "s4", "s1"], 6 * 3600)
        + stop_time_rows("ferry_crossing", ["s1", "s5"], 9 * 3600)
    )

    calendar = [
        {
            "service_id": "daily",
            "monday": 1, "tuesday": 1, "wednesday": 1, "thursday": 1,
            "friday": 1, "saturday": 1, "sunday": 1,
            "start_date": SERVICE_START.strftime("%Y%m%d"),
            "end_date": SERVICE_END.strftime("%Y%m%d"),
        }
    ]

    frequencies = [
        {
            "trip_id": "orange_loop",
            "start_time": fmt_time(6 * 3600),
            "end_time": fmt_time(26 * 3600),  # past-midnight service
            "headway_secs": 600,
        },
        {
            "trip_id": "green_inbound",
            "start_time": fmt_time(6 * 3600),
            "end_time": fmt_time(16 * 3600),
            "headway_secs": 600,
        },
    ]

    return {
        "stops": stops,
        "routes": routes,
        "trips": trips,
        "stop_times": stop_times,
        "shapes": shapes,
        "calendar": calendar,
        "frequencies": frequencies,
    }


def build_two_route_feed(dest: str | os.PathLike) -> Path:
    """Write the two-route network as a feed zip or directory."""
    return write_feed(dest, two_route_tables())


def write_load_map(dest: str | os.PathLike, loads=None) -> Path:
    """Write a load map file (stop_id1,stop_id2,avg_load) for the network."""
    loads = _LOADS if loads is None else loads
    dest = Path(dest)
    with open(dest, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["stop_id1", "stop_id2", "avg_load"])
        for (a, b), value in sorted(loads.items()):
            writer.writerow([a, b, f"{value:g}"])
    return dest


def two_route_signals_m() -> list[tuple[float, float]]:
    """Signal positions in planar meters: on-path hits plus near misses.

    Expected counts with a 5.5 m buffer: s1-s2 2, s2-s3 0, s3-s4 2,
    s4-s1 1, s5-s3 1.  Offsets are 0, 3, or 4 m (inside) vs 10 m (outside),
    well clear of the 5.5 m boundary.  Traversal-weighted mean count is
    840/660, so the geometric fit lands on p = 660/1500 = 0.44 exactly.
    """
    mid34 = ((_W34[0] + _STOPS_M["s4"][0]) / 2, (_W34[1] + _STOPS_M["s4"][1]) / 2)
    return [
        (100.0, 0.0),  # on s1-s2
        (100.0, 3.0),  # 3 m off s1-s2: inside the buffer
        (_W34[0], _W34[1]),  # exactly the 3->4 waypoint
        mid34,  # on the second 3->4 leg
        (_W41[0], _W41[1]),  # exactly the 4->1 waypoint
        (900.0, 4.0),  # 4 m off s5-s3: inside the buffer
        (1200.0, 10.0),  # 10 m off s5-s3: outside
    ]


def write_signals(dest: str | os.PathLike, points_m=None) -> Path:
    """Write planar-meter signal positions as a lat,lon file."""
    points_m = two_route_signals_m() if points_m is None else points_m
    dest = Path(dest)
    with open(dest, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["lat", "lon"])
        for x, y in points_m:
            lon, lat = metric_to_lonlat(x, y)
            writer.writerow([f"{lat:.10f}", f"{lon:.10f}"])
    return dest
