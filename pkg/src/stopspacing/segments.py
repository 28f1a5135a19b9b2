"""Break route shapes into inter-stop segments and tabulate traversals.

Each active trip's stops are snapped onto its shape with a monotone
constraint (every stop snaps at or after the previous one, which keeps loop
routes honest), the shape is cut at the snapped positions, and the cuts are
aggregated into one row per (segment, route, direction) with traversal
counts.  Shape portions before the first stop or after the last one, i.e.
out-of-service travel to and from depots, never enter any segment.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .diagnostics import Diagnostics
from .feed import FeedBundle, StopTime, Trip
from .geometry import GeoPoint, Path, PathPosition, _project, substring_path
from .service_calendar import active_services, trip_departures

#: Snap residuals beyond this are flagged (never fatal): the stop is likely
#: misplaced or the shape does not serve it.
SNAP_RESIDUAL_WARN_M = 100.0

#: Half-width of the search window around a shape_dist_traveled seed.
SEED_WINDOW_M = 500.0

#: Identity rule constants: geometries match when coordinates agree after
#: rounding to this many decimal degrees and lengths differ by less than
#: this many meters.
IDENTITY_COORD_DECIMALS = 6
IDENTITY_LENGTH_TOLERANCE_M = 1.0


@dataclass(frozen=True)
class Segment:
    """A unique inter-stop edge: stop pair plus one concrete geometry."""

    segment_id: str
    stop_id1: str
    stop_id2: str
    path: Path
    spacing_m: float


@dataclass(frozen=True)
class SegmentRow:
    """One (segment, route, direction) combination with its traversal count."""

    segment_id: str
    stop_id1: str
    stop_id2: str
    route_id: str
    direction_id: int
    traversals: int
    distance_m: float
    path: Path


@dataclass
class SegmentTable:
    rows: list[SegmentRow]
    measurement_date: dt.date
    feed_id: str

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_traversals(self) -> int:
        return sum(r.traversals for r in self.rows)

    @property
    def n_routes(self) -> int:
        return len({r.route_id for r in self.rows})

    def unique_segments(self) -> list[Segment]:
        """Distinct segments in id order (each id appears in >= 1 row)."""
        seen: dict[str, Segment] = {}
        for row in self.rows:
            if row.segment_id not in seen:
                seen[row.segment_id] = Segment(
                    row.segment_id, row.stop_id1, row.stop_id2, row.path, row.distance_m
                )
        return [seen[k] for k in sorted(seen)]

    def total_service_km(self) -> float:
        """Traversal-weighted distance over all rows, in kilometers."""
        return sum(r.traversals * r.distance_m for r in self.rows) / 1000.0


def _geometry_key(path: Path) -> bytes:
    # + 0.0 normalizes any -0.0 produced by rounding
    lats = np.round(path.lats, IDENTITY_COORD_DECIMALS) + 0.0
    lons = np.round(path.lons, IDENTITY_COORD_DECIMALS) + 0.0
    return lats.tobytes() + lons.tobytes()


@dataclass
class _Identity:
    segment_id: str
    stop_id1: str
    stop_id2: str
    path: Path
    distance_m: float
    key: bytes


class _IdentityRegistry:
    """Assigns segment ids, suffixing distinct geometries in first-seen order."""

    def __init__(self):
        self._by_pair: dict[tuple[str, str], list[_Identity]] = {}

    def resolve(self, stop_id1: str, stop_id2: str, path: Path, key: bytes | None = None) -> _Identity:
        if key is None:
            key = _geometry_key(path)
        candidates = self._by_pair.setdefault((stop_id1, stop_id2), [])
        for ident in candidates:
            if ident.key == key and abs(ident.distance_m - path.length_m) < IDENTITY_LENGTH_TOLERANCE_M:
                return ident
        suffix = "" if not candidates else f"-{len(candidates) + 1}"
        ident = _Identity(
            segment_id=f"{stop_id1}-{stop_id2}{suffix}",
            stop_id1=stop_id1,
            stop_id2=stop_id2,
            path=path,
            distance_m=path.length_m,
            key=key,
        )
        candidates.append(ident)
        return ident


def assign_segment_ids(stop_id1: str, stop_id2: str, paths: Iterable[Path]) -> list[str]:
    """Segment ids for candidate paths sharing a stop pair.

    Paths that agree after rounding to 6 decimal degrees (and within 1 m of
    length) share an id; distinct geometries get ``-2``, ``-3``, ... in the
    order first seen.
    """
    registry = _IdentityRegistry()
    return [registry.resolve(stop_id1, stop_id2, p).segment_id for p in paths]


def snap_trip_stops(
    shape: Path,
    stops: Sequence[GeoPoint],
    seeds: Sequence[float] | None = None,
    diagnostics: Diagnostics | None = None,
) -> list[PathPosition]:
    """Snap an ordered stop list onto a shape, monotone by construction.

    Stop ``i`` searches from stop ``i-1``'s snapped position onward.  When
    ``seeds`` (expected distances along the shape, e.g. interpolated from
    shape_dist_traveled) are given, the search is first confined to a window
    around the seed and widened again if the fit is poor.  Residuals over
    100 m are flagged in ``diagnostics`` but never abort.
    """
    if len(stops) < 2:
        raise ValueError("need at least two stops to snap")
    if seeds is not None and len(seeds) != len(stops):
        raise ValueError("seeds must match stops in length")

    positions: list[PathPosition] = []
    floor = 0.0
    for i, stop in enumerate(stops):
        pos = None
        if seeds is not None:
            lo = max(floor, seeds[i] - SEED_WINDOW_M)
            hi = min(shape.length_m, seeds[i] + SEED_WINDOW_M)
            if lo <= hi:
                pos = _project(shape, stop.lat, stop.lon, lo, hi)
                if pos.offset_m > SNAP_RESIDUAL_WARN_M:
                    unwindowed = _project(shape, stop.lat, stop.lon, floor, None)
                    if unwindowed.offset_m < pos.offset_m:
                        pos = unwindowed
        if pos is None:
            pos = _project(shape, stop.lat, stop.lon, floor, None)
        if diagnostics is not None and pos.offset_m > SNAP_RESIDUAL_WARN_M:
            diagnostics.add_flag(f"snap residual > {SNAP_RESIDUAL_WARN_M:.0f} m")
        positions.append(pos)
        floor = pos.distance_along_m
    return positions


def _seed_distances(feed: FeedBundle, trip: Trip, stop_times: Sequence[StopTime], shape: Path):
    """Map stop_times' shape_dist_traveled onto shape meters, if usable.

    Works in the feed's own distance units (whatever they are) by
    interpolating against the shape's shape_dist_traveled column, so unit
    mismatches cancel out.  Returns None when the data is absent or
    inconsistent.
    """
    if any(st.shape_dist_traveled is None for st in stop_times):
        return None
    stop_sdt = [st.shape_dist_traveled for st in stop_times]
    if any(b < a for a, b in zip(stop_sdt, stop_sdt[1:])):
        return None
    shape_pts = feed.shapes.get(trip.shape_id or "")
    if not shape_pts or any(p.shape_dist_traveled is None for p in shape_pts):
        return None
    shape_sdt = np.array([p.shape_dist_traveled for p in shape_pts])
    if np.any(np.diff(shape_sdt) <= 0):
        return None
    return np.interp(stop_sdt, shape_sdt, shape.cumulative_m)


def extract_segments(
    feed: FeedBundle, date: dt.date, diagnostics: Diagnostics | None = None
) -> SegmentTable:
    """Build the (segment x route x direction) traversal table for one date.

    Only bus routes count.  Each active trip is frequency-expanded, its
    consecutive stop pairs become segment traversals, and identical
    geometries are merged under one segment id so ``distance_m`` is
    bit-equal across rows sharing an id.  Trips with no usable shape fall
    back to straight stop-to-stop paths and are flagged.
    """
    diag = diagnostics if diagnostics is not None else Diagnostics()
    active = active_services(feed, date)
    registry = _IdentityRegistry()
    counts: dict[tuple[str, str, int], int] = {}
    idents: dict[str, _Identity] = {}
    # pieces are cached per (shape, stop pattern); many trips share both
    piece_cache: dict = {}

    for trip_id in sorted(feed.trips):
        trip = feed.trips[trip_id]
        if trip.service_id not in active:
            continue
        route = feed.routes[trip.route_id]
        if not route.is_bus:
            continue
        stop_times = feed.stop_times.get(trip_id, ())
        if len(stop_times) < 2:
            diag.add_drop("trips", "fewer than 2 stop_times")
            continue

        cache_key = (
            trip.shape_id,
            tuple(st.stop_id for st in stop_times),
            tuple(st.shape_dist_traveled for st in stop_times),
        )
        pieces = piece_cache.get(cache_key)
        if pieces is None:
            pieces = _trip_pieces(feed, trip, stop_times, diag)
            piece_cache[cache_key] = pieces

        departures = trip_departures(feed, trip_id)
        for stop_id1, stop_id2, path, key in pieces:
            ident = registry.resolve(stop_id1, stop_id2, path, key)
            idents[ident.segment_id] = ident
            row_key = (ident.segment_id, trip.route_id, trip.direction_id)
            counts[row_key] = counts.get(row_key, 0) + departures

    rows = []
    for (segment_id, route_id, direction_id) in sorted(counts):
        ident = idents[segment_id]
        rows.append(
            SegmentRow(
                segment_id=segment_id,
                stop_id1=ident.stop_id1,
                stop_id2=ident.stop_id2,
                route_id=route_id,
                direction_id=direction_id,
                traversals=counts[(segment_id, route_id, direction_id)],
                distance_m=ident.distance_m,
                path=ident.path,
            )
        )
    return SegmentTable(rows=rows, measurement_date=date, feed_id=feed.source)


def _trip_pieces(feed, trip, stop_times, diag):
    """Cut one trip into (stop_id1, stop_id2, path, geometry_key) pieces."""
    stop_points = [feed.stop_point(st.stop_id) for st in stop_times]
    shape = feed.shape_path(trip.shape_id) if trip.shape_id else None

    pieces = []
    if shape is None:
        diag.add_flag("trip without usable shape (straight-line fallback)")
        for i in range(len(stop_times) - 1):
            a, b = stop_points[i], stop_points[i + 1]
            path = Path([a.lat, b.lat], [a.lon, b.lon])
            pieces.append((stop_times[i].stop_id, stop_times[i + 1].stop_id, path))
    else:
        seeds = _seed_distances(feed, trip, stop_times, shape)
        positions = snap_trip_stops(shape, stop_points, seeds, diag)
        for i in range(len(positions) - 1):
            path = substring_path(
                shape, positions[i].distance_along_m, positions[i + 1].distance_along_m
            )
            pieces.append((stop_times[i].stop_id, stop_times[i + 1].stop_id, path))

    kept = []
    for stop_id1, stop_id2, path in pieces:
        if stop_id1 == stop_id2 and path.length_m < 1.0:
            # duplicated stop_time, not a spacing
            diag.add_drop("segments", "zero-length degenerate segment")
            continue
        kept.append((stop_id1, stop_id2, path, _geometry_key(path)))
    return kept
