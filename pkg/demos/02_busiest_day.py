"""
Picking the measurement day
===========================

Statistics describe one service day, and the library picks the day with the
most scheduled bus departures.  Frequency-based trips count as every
departure their headway implies, calendars can add or remove individual
dates, and ties go to the earliest date.
"""

import datetime as dt
import tempfile
from pathlib import Path

from stopspacing import busiest_day, day_service_count, trip_departures
from stopspacing.feed import parse_feed
from stopspacing.synthetic import build_two_route_feed, write_feed

workdir = Path(tempfile.mkdtemp(prefix="stopspacing-demo-"))
feed = parse_feed(build_two_route_feed(workdir / "two_route.zip"))

day, count = busiest_day(feed)
print(f"busiest service day: {day.isoformat()} with {count} departures")

# every day in August is identical here, so the tie breaks to the first
week = [dt.date(2025, 8, 1) + dt.timedelta(days=i) for i in range(7)]
print("\ndepartures across one week:")
for when in week:
    print(f"  {when.isoformat()} ({when.strftime('%a')}): "
          f"{day_service_count(feed, when).departures}")

# a frequencies row expands into floor(window / headway) departures
print("\nper-trip expansion on the busiest day:")
for trip_id in feed.trips:
    print(f"  {trip_id}: {trip_departures(feed, trip_id)}")

# exceptions shift the answer: remove the first Friday, add a Sunday-only
# extra service, and the peak moves
tables = {
    "stops": [
        {"stop_id": "a", "stop_lat": "0.0", "stop_lon": "0.0"},
        {"stop_id": "b", "stop_lat": "0.01", "stop_lon": "0.0"},
    ],
    "routes": [{"route_id": "r", "route_type": 3}],
    "trips": [
        {"route_id": "r", "service_id": "daily", "trip_id": f"t{i}"}
        for i in range(3)
    ],
    "stop_times": [
        {"trip_id": f"t{i}", "arrival_time": "06:00:00",
         "departure_time": "06:00:00", "stop_id": s, "stop_sequence": n}
        for i in range(3)
        for n, s in enumerate(["a", "b"], start=1)
    ],
    "calendar": [
        {"service_id": "daily", "monday": 1, "tuesday": 1, "wednesday": 1,
         "thursday": 1, "friday": 1, "saturday": 0, "sunday": 0,
         "start_date": "20250801", "end_date": "20250831"},
    ],
    "calendar_dates": [
        # double service on one specific Sunday
        {"service_id": "daily", "date": "20250810", "exception_type": 1},
        {"service_id": "extra", "date": "20250810", "exception_type": 1},
    ],
}
tables["trips"] += [{"route_id": "r", "service_id": "extra", "trip_id": "x1"}]
tables["stop_times"] += [
    {"trip_id": "x1", "arrival_time": "07:00:00", "departure_time": "07:00:00",
     "stop_id": s, "stop_sequence": n}
    for n, s in enumerate(["a", "b"], start=1)
]
exceptional = parse_feed(write_feed(workdir / "exceptional.zip", tables))
day2, count2 = busiest_day(exceptional)
print(f"\nwith an added-service exception the peak is {day2.isoformat()} "
      f"({count2} departures, a Sunday)")
