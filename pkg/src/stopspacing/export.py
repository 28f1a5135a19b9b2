"""Serialization of segment tables and derived statistics.

Output is byte-deterministic: fixed column orders, fixed float formats
(6 decimal places for coordinates, 2 for meters), stable row sorts.  Two
runs over the same inputs write identical files.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path

from .errors import EmptyTable
from .segments import SegmentRow, SegmentTable
from .signals import GeometricFit, SignalCountTable
from .stats import SpacingSummary, WeightedSpacings

SEGMENT_COLUMNS = (
    "segment_id",
    "stop_id1",
    "stop_id2",
    "route_id",
    "direction_id",
    "traversals",
    "distance",
    "geometry",
)


def _coord(value: float) -> float:
    # +0.0 turns any rounded -0.0 into 0.0 so formatting never emits "-0.0"
    return round(float(value), 6) + 0.0


def _wkt_linestring(row: SegmentRow) -> str:
    pts = ", ".join(
        f"{_coord(lon):.6f} {_coord(lat):.6f}"
        for lat, lon in zip(row.path.lats, row.path.lons)
    )
    return f"LINESTRING ({pts})"


def _sorted_rows(table: SegmentTable) -> list[SegmentRow]:
    if not table.rows:
        raise EmptyTable("segment table has no rows; nothing to export")
    return sorted(table.rows, key=lambda r: (r.segment_id, r.route_id, r.direction_id))


def export_segments_csv(table: SegmentTable, path: str | os.PathLike) -> Path:
    """Delimited segment table; geometry as WKT LINESTRING (lon lat order)."""
    rows = _sorted_rows(table)
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SEGMENT_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.segment_id,
                    row.stop_id1,
                    row.stop_id2,
                    row.route_id,
                    row.direction_id,
                    row.traversals,
                    f"{row.distance_m:.2f}",
                    _wkt_linestring(row),
                ]
            )
    return path


def export_segments_geojson(table: SegmentTable, path: str | os.PathLike) -> Path:
    """GeoJSON FeatureCollection, one LineString feature per table row."""
    rows = _sorted_rows(table)
    features = []
    for row in rows:
        coordinates = [
            [_coord(lon), _coord(lat)] for lat, lon in zip(row.path.lats, row.path.lons)
        ]
        features.append(
            {
                "type": "Feature",
                "properties": {
                    "segment_id": row.segment_id,
                    "stop_id1": row.stop_id1,
                    "stop_id2": row.stop_id2,
                    "route_id": row.route_id,
                    "direction_id": row.direction_id,
                    "traversals": row.traversals,
                    "distance": round(row.distance_m, 2),
                },
                "geometry": {"type": "LineString", "coordinates": coordinates},
            }
        )
    payload = {"type": "FeatureCollection", "features": features}
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        json.dump(payload, handle, separators=(",", ":"), ensure_ascii=False)
        handle.write("\n")
    return path


def export_segments(
    table: SegmentTable, path: str | os.PathLike, format: str = "csv"
) -> Path:
    if format in ("csv", "delimited"):
        return export_segments_csv(table, path)
    if format == "geojson":
        return export_segments_geojson(table, path)
    raise ValueError(f"unknown export format: {format!r}")


def _write_rows(path: str | os.PathLike, header: list[str], rows) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_summary(summary: SpacingSummary, path: str | os.PathLike) -> Path:
    """Key/value rows; means in meters with 6 decimals."""
    rows: list[list[str]] = [
        ["feed_id", summary.feed_id],
        ["busiest_day", summary.busiest_day.isoformat()],
        ["segment_weighted_mean_m", f"{summary.segment_weighted_mean_m:.6f}"],
        ["route_weighted_mean_m", f"{summary.route_weighted_mean_m:.6f}"],
        ["traversal_weighted_mean_m", f"{summary.traversal_weighted_mean_m:.6f}"],
    ]
    if summary.load_weighted_mean_m is not None:
        rows.append(["load_weighted_mean_m", f"{summary.load_weighted_mean_m:.6f}"])
    rows += [
        ["n_routes", str(summary.n_routes)],
        ["n_segments", str(summary.n_segments)],
        ["n_rows", str(summary.n_rows)],
        ["n_traversals", str(summary.n_traversals)],
        ["total_service_km", f"{summary.total_service_km:.3f}"],
        ["threshold_m", "" if summary.threshold_m is None else f"{summary.threshold_m:.1f}"],
    ]
    for scheme in sorted(summary.excluded_share):
        rows.append([f"excluded_share_{scheme}", f"{summary.excluded_share[scheme]:.9f}"])
    return _write_rows(path, ["key", "value"], rows)


def write_ecdf(step_points: list[tuple[float, float]], path: str | os.PathLike) -> Path:
    return _write_rows(
        path,
        ["spacing_m", "cumulative_share"],
        ([f"{s:.6f}", f"{f:.12f}"] for s, f in step_points),
    )


def write_histogram(
    bins: list[tuple[float, float, float]], path: str | os.PathLike
) -> Path:
    return _write_rows(
        path,
        ["bin_left_m", "bin_right_m", "weight_share"],
        ([f"{a:.6f}", f"{b:.6f}", f"{s:.12f}"] for a, b, s in bins),
    )


def write_kde(points: list[tuple[float, float]], path: str | os.PathLike) -> Path:
    return _write_rows(
        path,
        ["spacing_m", "density_per_m"],
        ([f"{x:.6f}", f"{d:.10e}"] for x, d in points),
    )


def write_signal_counts(counts: SignalCountTable, path: str | os.PathLike) -> Path:
    return _write_rows(
        path,
        ["segment_id", "signal_count"],
        ([seg_id, str(k)] for seg_id, k in counts.items()),
    )


def write_signal_fit(
    fit: GeometricFit,
    observed_shares: list[tuple[int, float]],
    path: str | os.PathLike,
) -> Path:
    """Observed weight share vs fitted geometric pmf for each count value."""
    rows = [
        [str(k), f"{share:.12f}", f"{fit.pmf(k):.12f}"] for k, share in observed_shares
    ]
    return _write_rows(path, ["signal_count", "observed_share", "fitted_pmf"], rows)


def write_weights(ws: WeightedSpacings, path: str | os.PathLike) -> Path:
    """Per-segment (spacing, weight) pairs after thresholding, for audit."""
    return _write_rows(
        path,
        ["spacing_m", "weight"],
        ([f"{s:.6f}", f"{w:.6f}"] for s, w in zip(ws.spacings, ws.weights)),
    )
