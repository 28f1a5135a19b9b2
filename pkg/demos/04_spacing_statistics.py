"""
Weighted stop spacing statistics
================================

The same network gives different "average stop spacing" depending on what
each segment's spacing is weighted by:

- segment: every unique segment counts once,
- route: a segment counts once per route serving it,
- traversal: weighted by scheduled bus runs over the day,
- load: weighted by traversals times average passengers aboard.

A threshold (default 3 km) drops implausibly long segments, such as
motorway gaps, from the statistics and reports how much weight it removed.
"""

import tempfile
from pathlib import Path

from stopspacing import (
    build_weights,
    busiest_day,
    extract_segments,
    histogram,
    kde,
    parse_feed,
    read_load_map,
    summarize,
    weighted_ecdf,
)
from stopspacing.synthetic import build_two_route_feed, write_load_map

workdir = Path(tempfile.mkdtemp(prefix="stopspacing-demo-"))
feed = parse_feed(build_two_route_feed(workdir / "two_route.zip"))
day, _ = busiest_day(feed)
table = extract_segments(feed, day)
loads = read_load_map(write_load_map(workdir / "loads.csv"))

summary = summarize(table, threshold_m=3000.0, loads=loads)
print("mean spacing by weighting scheme:")
print(f"  segment    {summary.segment_weighted_mean_m:8.1f} m")
print(f"  route      {summary.route_weighted_mean_m:8.1f} m")
print(f"  traversal  {summary.traversal_weighted_mean_m:8.1f} m")
print(f"  load       {summary.load_weighted_mean_m:8.1f} m")

# the full distribution, not just the mean
ws = build_weights(table, "traversal", threshold_m=3000.0)
print("\ntraversal-weighted ECDF steps:")
for spacing, share in weighted_ecdf(ws):
    bar = "#" * round(share * 30)
    print(f"  {spacing:7.1f} m  {share:6.3f}  {bar}")

print("\nhistogram, 250 m bins:")
for left, right, share in histogram(ws, bin_width_m=250.0):
    if share:
        print(f"  [{left:6.0f}, {right:6.0f})  {share:6.3f}")

density = kde(ws, grid_points=256)
peak = max(density, key=lambda p: p[1])
print(f"\nKDE peak: {peak[0]:.0f} m (density {peak[1]:.2e} per m)")

# thresholding in action: cut everything over 850 m and see what share of
# service the excluded segments carried
cut = build_weights(table, "traversal", threshold_m=850.0)
print(f"\nwith an 850 m cutoff {cut.excluded_share:.1%} of the traversal "
      f"weight is excluded; {len(cut.spacings)} segments remain")
