"""Resolve which services run on which dates and pick the measurement day.

The measurement interval for spacing statistics is the feed's busiest day:
the service date with the most frequency-expanded trip departures.  A trip
listed in frequencies.txt counts one departure per completed headway
interval (minimum one); every other trip counts once.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

from .errors import NoServiceInfo
from .feed import FeedBundle

#: Upper bound on the scanned continuous date range, to keep malformed
#: feeds with absurd calendar horizons from stalling the scan.
MAX_HORIZON_DAYS = 370


@dataclass(frozen=True)
class DayServiceCount:
    date: dt.date
    active_service_ids: frozenset[str]
    departures: int


def active_services(feed: FeedBundle, date: dt.date) -> set[str]:
    """Service ids running on ``date``.

    A service runs if a calendar window covers the date with that weekday
    enabled and no removal exception exists, or if an added exception names
    the date outright.
    """
    active = set()
    weekday = date.weekday()  # Monday == 0, matching the flag order
    for window in feed.calendar:
        if window.start_date <= date <= window.end_date and window.weekdays[weekday]:
            active.add(window.service_id)
    for exc in feed.calendar_dates:
        if exc.date == date:
            if exc.added:
                active.add(exc.service_id)
            else:
                active.discard(exc.service_id)
    return active


def trip_departures(feed: FeedBundle, trip_id: str) -> int:
    """Departures contributed by one trip on an active day."""
    spans = feed.frequencies.get(trip_id)
    if not spans:
        return 1
    return sum(max(1, (s.end_time - s.start_time) // s.headway_secs) for s in spans)


def day_service_count(feed: FeedBundle, date: dt.date) -> DayServiceCount:
    active = active_services(feed, date)
    count = sum(
        trip_departures(feed, trip.trip_id)
        for trip in feed.trips.values()
        if trip.service_id in active
    )
    return DayServiceCount(date=date, active_service_ids=frozenset(active), departures=count)


def _candidate_dates(feed: FeedBundle) -> list[dt.date]:
    dates: set[dt.date] = {exc.date for exc in feed.calendar_dates}
    if feed.calendar:
        start = min(w.start_date for w in feed.calendar)
        end = max(w.end_date for w in feed.calendar)
        end = min(end, start + dt.timedelta(days=MAX_HORIZON_DAYS - 1))
        day = start
        while day <= end:
            dates.add(day)
            day += dt.timedelta(days=1)
    return sorted(dates)


def busiest_day(feed: FeedBundle) -> tuple[dt.date, int]:
    """Date with the most frequency-expanded trip departures, and its count.

    Ties break toward the earliest date.  Raises :class:`NoServiceInfo` when
    no date in the horizon has any departure.
    """
    if not feed.calendar and not feed.calendar_dates:
        raise NoServiceInfo("feed defines no service days")

    per_service: dict[str, int] = {}
    for trip in feed.trips.values():
        per_service[trip.service_id] = per_service.get(trip.service_id, 0) + trip_departures(
            feed, trip.trip_id
        )

    best_date, best_count = None, 0
    for date in _candidate_dates(feed):
        count = sum(per_service.get(s, 0) for s in active_services(feed, date))
        if count > best_count:
            best_date, best_count = date, count
    if best_date is None:
        raise NoServiceInfo("no date in the service horizon has a departing trip")
    return best_date, best_count
