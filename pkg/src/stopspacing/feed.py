"""Parse a GTFS feed (zip archive or directory) into typed in-memory tables.

Parsing is deliberately forgiving: delimited text is read per RFC 4180 with
a UTF-8 BOM tolerated, unknown columns are ignored, and rows that fail type
checks or referential integrity are dropped and counted in the bundle's
diagnostics rather than aborting the whole feed.  Hard failures are limited
to a missing required file, a required file where most rows are unreadable,
and a feed with no service information at all.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import zipfile
from dataclasses import dataclass, field
from pathlib import Path as FsPath

from .diagnostics import Diagnostics
from .errors import MalformedRow, MissingRequiredFile, NoServiceInfo
from .geometry import GeoPoint, Path

REQUIRED_FILES = ("stops", "routes", "trips", "stop_times")
OPTIONAL_FILES = ("shapes", "calendar", "calendar_dates", "frequencies")

#: GTFS route_type codes treated as bus service (basic code 3 plus the
#: extended 700-series bus codes).
BUS_ROUTE_TYPES = frozenset([3, *range(700, 800)])


@dataclass(frozen=True)
class Stop:
    stop_id: str
    lat: float
    lon: float

    @property
    def point(self) -> GeoPoint:
        return GeoPoint(self.lat, self.lon)


@dataclass(frozen=True)
class Route:
    route_id: str
    route_type: int

    @property
    def is_bus(self) -> bool:
        return self.route_type in BUS_ROUTE_TYPES


@dataclass(frozen=True)
class Trip:
    trip_id: str
    route_id: str
    service_id: str
    shape_id: str | None = None
    direction_id: int = 0


@dataclass(frozen=True)
class StopTime:
    trip_id: str
    stop_id: str
    stop_sequence: int
    shape_dist_traveled: float | None = None


@dataclass(frozen=True)
class ShapePoint:
    shape_id: str
    lat: float
    lon: float
    shape_pt_sequence: int
    shape_dist_traveled: float | None = None


@dataclass(frozen=True)
class ServiceWindow:
    """One calendar.txt row: weekday flags over a date range."""

    service_id: str
    weekdays: tuple[bool, bool, bool, bool, bool, bool, bool]  # Mon..Sun
    start_date: dt.date
    end_date: dt.date


@dataclass(frozen=True)
class ServiceException:
    """One calendar_dates.txt row; ``added`` False means service removed."""

    service_id: str
    date: dt.date
    added: bool


@dataclass(frozen=True)
class FrequencySpan:
    trip_id: str
    start_time: int  # seconds since service-day midnight
    end_time: int
    headway_secs: int
    exact_times: bool = False


@dataclass
class FeedBundle:
    """Typed, referentially consistent view of one GTFS feed.

    Treat as immutable after :func:`parse_feed` returns; it is safe to share
    across threads.
    """

    stops: dict[str, Stop]
    routes: dict[str, Route]
    trips: dict[str, Trip]
    stop_times: dict[str, tuple[StopTime, ...]]  # trip_id -> ordered by stop_sequence
    shapes: dict[str, tuple[ShapePoint, ...]]  # shape_id -> ordered by shape_pt_sequence
    calendar: tuple[ServiceWindow, ...]
    calendar_dates: tuple[ServiceException, ...]
    frequencies: dict[str, tuple[FrequencySpan, ...]]
    source: str
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    def stop_point(self, stop_id: str) -> GeoPoint:
        return self.stops[stop_id].point

    def shape_path(self, shape_id: str) -> Path | None:
        """Polyline for a shape, or None when absent or degenerate."""
        pts = self.shapes.get(shape_id)
        if pts is None or len(pts) < 2:
            return None
        return Path([p.lat for p in pts], [p.lon for p in pts])


def parse_gtfs_date(text: str) -> dt.date:
    """Parse a GTFS YYYYMMDD date string."""
    text = text.strip()
    if len(text) != 8 or not text.isdigit():
        raise ValueError(f"bad GTFS date: {text!r}")
    return dt.date(int(text[:4]), int(text[4:6]), int(text[6:8]))


def parse_gtfs_time(text: str) -> int:
    """Parse a GTFS HH:MM:SS time into seconds; hours may exceed 24."""
    parts = text.strip().split(":")
    if len(parts) != 3:
        raise ValueError(f"bad GTFS time: {text!r}")
    h, m, s = (int(p) for p in parts)
    if m < 0 or m > 59 or s < 0 or s > 59 or h < 0:
        raise ValueError(f"bad GTFS time: {text!r}")
    return h * 3600 + m * 60 + s


def _required(row: dict, key: str) -> str:
    value = (row.get(key) or "").strip()
    if not value:
        raise ValueError(f"missing {key}")
    return value


def _optional(row: dict, key: str) -> str | None:
    value = (row.get(key) or "").strip()
    return value or None


def _coord(row: dict, lat_key: str, lon_key: str) -> tuple[float, float]:
    lat = float(_required(row, lat_key))
    lon = float(_required(row, lon_key))
    if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
        raise ValueError(f"coordinates out of range: ({lat}, {lon})")
    return lat, lon


def _optional_float(row: dict, key: str) -> float | None:
    raw = _optional(row, key)
    if raw is None:
        return None
    try:
        value = float(raw)
    except ValueError:
        return None
    return value if value >= 0.0 else None


class _FeedSource:
    """Uniform access to the text tables of a feed directory or zip."""

    def __init__(self, source):
        self.path = FsPath(source)
        if not self.path.exists():
            raise FileNotFoundError(f"feed source does not exist: {self.path}")
        self._zip = None
        if self.path.is_file():
            try:
                self._zip = zipfile.ZipFile(self.path)
            except zipfile.BadZipFile as exc:
                raise MalformedRow(f"{self.path} is not a zip archive") from exc
            self._members = {}
            for name in sorted(self._zip.namelist(), key=lambda n: (n.count("/"), n)):
                base = name.rsplit("/", 1)[-1]
                self._members.setdefault(base, name)

    @property
    def name(self) -> str:
        return self.path.stem if self.path.is_file() else self.path.name

    def open(self, table: str) -> io.TextIOBase | None:
        filename = table + ".txt"
        if self._zip is not None:
            member = self._members.get(filename)
            if member is None:
                return None
            return io.TextIOWrapper(self._zip.open(member), encoding="utf-8-sig", newline="")
        file_path = self.path / filename
        if not file_path.exists():
            return None
        return open(file_path, encoding="utf-8-sig", newline="")

    def close(self):
        if self._zip is not None:
            self._zip.close()


def _read_table(source: _FeedSource, table: str, convert, diagnostics: Diagnostics, required: bool):
    """Read one table, converting rows and counting the ones that fail."""
    handle = source.open(table)
    if handle is None:
        if required:
            raise MissingRequiredFile(table + ".txt")
        return None
    rows, bad = [], 0
    with handle:
        for row in csv.DictReader(handle):
            try:
                rows.append(convert(row))
            except (ValueError, TypeError):
                bad += 1
    if bad:
        diagnostics.add_drop(table, "unparseable row", bad)
        if required and bad > (bad + len(rows)) / 2:
            raise MalformedRow(
                f"{table}: {bad} of {bad + len(rows)} rows failed to parse"
            )
    return rows


def parse_feed(source) -> FeedBundle:
    """Parse a GTFS zip archive or directory into a :class:`FeedBundle`.

    Deterministic: identical input bytes produce an identical bundle.  Rows
    violating type or referential constraints are dropped and tallied in
    ``bundle.diagnostics``.
    """
    feed_source = _FeedSource(source)
    try:
        return _parse(feed_source)
    finally:
        feed_source.close()


def _parse(source: _FeedSource) -> FeedBundle:
    diag = Diagnostics()

    def stop_row(row):
        lat, lon = _coord(row, "stop_lat", "stop_lon")
        return Stop(_required(row, "stop_id"), lat, lon)

    def route_row(row):
        return Route(_required(row, "route_id"), int(_required(row, "route_type")))

    def trip_row(row):
        direction = _optional(row, "direction_id")
        return Trip(
            trip_id=_required(row, "trip_id"),
            route_id=_required(row, "route_id"),
            service_id=_required(row, "service_id"),
            shape_id=_optional(row, "shape_id"),
            direction_id=1 if direction == "1" else 0,
        )

    def stop_time_row(row):
        seq = int(_required(row, "stop_sequence"))
        if seq < 0:
            raise ValueError("negative stop_sequence")
        return StopTime(
            trip_id=_required(row, "trip_id"),
            stop_id=_required(row, "stop_id"),
            stop_sequence=seq,
            shape_dist_traveled=_optional_float(row, "shape_dist_traveled"),
        )

    def shape_row(row):
        lat, lon = _coord(row, "shape_pt_lat", "shape_pt_lon")
        return ShapePoint(
            shape_id=_required(row, "shape_id"),
            lat=lat,
            lon=lon,
            shape_pt_sequence=int(_required(row, "shape_pt_sequence")),
            shape_dist_traveled=_optional_float(row, "shape_dist_traveled"),
        )

    def calendar_row(row):
        flags = []
        for day in ("monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"):
            flag = _required(row, day)
            if flag not in ("0", "1"):
                raise ValueError(f"bad weekday flag {flag!r}")
            flags.append(flag == "1")
        return ServiceWindow(
            service_id=_required(row, "service_id"),
            weekdays=tuple(flags),
            start_date=parse_gtfs_date(_required(row, "start_date")),
            end_date=parse_gtfs_date(_required(row, "end_date")),
        )

    def calendar_date_row(row):
        kind = _required(row, "exception_type")
        if kind not in ("1", "2"):
            raise ValueError(f"bad exception_type {kind!r}")
        return ServiceException(
            service_id=_required(row, "service_id"),
            date=parse_gtfs_date(_required(row, "date")),
            added=kind == "1",
        )

    def frequency_row(row):
        start = parse_gtfs_time(_required(row, "start_time"))
        end = parse_gtfs_time(_required(row, "end_time"))
        headway = int(_required(row, "headway_secs"))
        if headway <= 0 or end <= start:
            raise ValueError("bad frequency span")
        return FrequencySpan(
            trip_id=_required(row, "trip_id"),
            start_time=start,
            end_time=end,
            headway_secs=headway,
            exact_times=_optional(row, "exact_times") == "1",
        )

    stop_rows = _read_table(source, "stops", stop_row, diag, required=True)
    route_rows = _read_table(source, "routes", route_row, diag, required=True)
    trip_rows = _read_table(source, "trips", trip_row, diag, required=True)
    stop_time_rows = _read_table(source, "stop_times", stop_time_row, diag, required=True)
    shape_rows = _read_table(source, "shapes", shape_row, diag, required=False)
    calendar_rows = _read_table(source, "calendar", calendar_row, diag, required=False)
    calendar_date_rows = _read_table(source, "calendar_dates", calendar_date_row, diag, required=False)
    frequency_rows = _read_table(source, "frequencies", frequency_row, diag, required=False)

    if calendar_rows is None and calendar_date_rows is None:
        raise NoServiceInfo("feed has neither calendar nor calendar_dates")

    stops = _unique_by(stop_rows, lambda s: s.stop_id, "stops", "duplicate stop_id", diag)
    routes = _unique_by(route_rows, lambda r: r.route_id, "routes", "duplicate route_id", diag)

    trips: dict[str, Trip] = {}
    for trip in trip_rows:
        if trip.route_id not in routes:
            diag.add_drop("trips", "unknown route_id")
        elif trip.trip_id in trips:
            diag.add_drop("trips", "duplicate trip_id")
        else:
            trips[trip.trip_id] = trip

    stop_times: dict[str, list[StopTime]] = {}
    seen_seq: set[tuple[str, int]] = set()
    for st in sorted(stop_time_rows, key=lambda s: (s.trip_id, s.stop_sequence)):
        if st.trip_id not in trips:
            diag.add_drop("stop_times", "unknown trip_id")
        elif st.stop_id not in stops:
            diag.add_drop("stop_times", "unknown stop_id")
        elif (st.trip_id, st.stop_sequence) in seen_seq:
            diag.add_drop("stop_times", "duplicate stop_sequence")
        else:
            seen_seq.add((st.trip_id, st.stop_sequence))
            stop_times.setdefault(st.trip_id, []).append(st)

    shapes: dict[str, list[ShapePoint]] = {}
    if shape_rows:
        seen_pt: set[tuple[str, int]] = set()
        for sp in sorted(shape_rows, key=lambda s: (s.shape_id, s.shape_pt_sequence)):
            if (sp.shape_id, sp.shape_pt_sequence) in seen_pt:
                diag.add_drop("shapes", "duplicate shape_pt_sequence")
            else:
                seen_pt.add((sp.shape_id, sp.shape_pt_sequence))
                shapes.setdefault(sp.shape_id, []).append(sp)

    calendar = []
    for window in calendar_rows or []:
        if window.start_date > window.end_date:
            diag.add_drop("calendar", "start_date after end_date")
        else:
            calendar.append(window)

    frequencies: dict[str, list[FrequencySpan]] = {}
    for span in frequency_rows or []:
        if span.trip_id not in trips:
            diag.add_drop("frequencies", "unknown trip_id")
        else:
            frequencies.setdefault(span.trip_id, []).append(span)

    return FeedBundle(
        stops=stops,
        routes=routes,
        trips=trips,
        stop_times={k: tuple(v) for k, v in stop_times.items()},
        shapes={k: tuple(v) for k, v in shapes.items()},
        calendar=tuple(calendar),
        calendar_dates=tuple(calendar_date_rows or []),
        frequencies={k: tuple(v) for k, v in frequencies.items()},
        source=source.name,
        diagnostics=diag,
    )


def _unique_by(rows, key, table, reason, diag):
    out = {}
    for item in rows:
        k = key(item)
        if k in out:
            diag.add_drop(table, reason)
        else:
            out[k] = item
    return out


def validate_feed(feed: FeedBundle) -> Diagnostics:
    """Pure consistency report over a parsed bundle; never mutates it.

    Flags trips whose shape is missing from the shapes table, shapes too
    short to form a polyline, and any stop with out-of-range coordinates
    (parse-stage filtering should leave none).
    """
    report = Diagnostics()
    for trip in feed.trips.values():
        if trip.shape_id is None:
            report.note(f"trip {trip.trip_id} lacks shape (no shape_id)")
        elif trip.shape_id not in feed.shapes:
            report.note(f"trip {trip.trip_id} lacks shape ({trip.shape_id} not in shapes)")
    for shape_id, pts in feed.shapes.items():
        if len(pts) < 2:
            report.note(f"shape {shape_id} has fewer than 2 points")
    for stop in feed.stops.values():
        if not (-90.0 <= stop.lat <= 90.0 and -180.0 <= stop.lon <= 180.0):
            report.note(f"stop {stop.stop_id} has out-of-range coordinates")
    return report
