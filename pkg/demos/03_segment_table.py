"""
From schedule to segment table
==============================

A segment is the piece of road a bus travels between two consecutive stops.
This walk-through extracts the segment table from the two-route fixture and
exports it as delimited text and GeoJSON.

Things to watch for in the output:

- the Orange loop's depot pull-out appears in the shape but not in any
  segment (deadhead is cut away before measuring),
- Orange and Green share the road between stops s3/s4 and s4/s1, so those
  rows carry one segment id with two (route, direction) entries,
- lengths come from the shape polyline, not stop-to-stop straight lines.
"""

import tempfile
from pathlib import Path

from stopspacing import (
    busiest_day,
    export_segments_csv,
    export_segments_geojson,
    extract_segments,
    parse_feed,
)
from stopspacing.synthetic import build_two_route_feed

workdir = Path(tempfile.mkdtemp(prefix="stopspacing-demo-"))
feed = parse_feed(build_two_route_feed(workdir / "two_route.zip"))

day, _ = busiest_day(feed)
table = extract_segments(feed, day)

print(f"measured {table.n_rows} rows over {len(table.unique_segments())} "
      f"unique segments on {table.measurement_date.isoformat()}")
print(f"total traversals: {table.n_traversals}")
print(f"total service: {table.total_service_km():.1f} km\n")

print(f"{'segment':10} {'route':8} {'dir':>3} {'trav':>5} {'meters':>9}")
for row in sorted(table.rows, key=lambda r: (r.segment_id, r.route_id)):
    print(f"{row.segment_id:10} {row.route_id:8} {row.direction_id:>3} "
          f"{row.traversals:>5} {row.distance_m:>9.2f}")

# both formats are byte-stable: running this twice writes identical files
csv_path = export_segments_csv(table, workdir / "segments.csv")
geo_path = export_segments_geojson(table, workdir / "segments.geojson")
print(f"\nwrote {csv_path}")
print(f"wrote {geo_path}")

with open(csv_path) as handle:
    print("\nfirst lines of the delimited table:")
    for line in list(handle)[:3]:
        print("  " + line.rstrip()[:100])
