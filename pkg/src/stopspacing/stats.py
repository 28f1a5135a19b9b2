"""Weighted stop-spacing statistics over a segment table.

Spacings are weighted one of four ways: every segment equally, by the
number of routes including the segment, by its traversal count, or by an
externally supplied average passenger load.  All statistics honor an upper
spacing threshold (default 3 km) that drops pathological express segments;
the share of weight excluded is always reported.  The mean is
sum(w_i * s_i) / sum(w_i) and the cumulative distribution is
F(s) = sum(w_i * [s_i <= s]) / sum(w_i).
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AllExcluded, DegenerateData, LoadMapMissing, ZeroTotalWeight
from .segments import SegmentTable

DEFAULT_THRESHOLD_M = 3000.0


class WeightingScheme(str, enum.Enum):
    SEGMENT = "segment"
    ROUTE = "route"
    TRAVERSAL = "traversal"
    LOAD = "load"


#: (stop_id1, stop_id2) -> average passengers aboard while traversing.
LoadMap = dict[tuple[str, str], float]


def read_load_map(path) -> LoadMap:
    """Read a load sidecar file: delimited text with stop_id1,stop_id2,avg_load."""
    loads: LoadMap = {}
    with open(path, encoding="utf-8-sig", newline="") as handle:
        for row in csv.DictReader(handle):
            load = float(row["avg_load"])
            if load < 0:
                raise ValueError(f"negative load for {row['stop_id1']},{row['stop_id2']}")
            loads[(row["stop_id1"].strip(), row["stop_id2"].strip())] = load
    return loads


@dataclass
class WeightedSpacings:
    """Per-segment (spacing, weight) pairs after thresholding."""

    spacings: np.ndarray
    weights: np.ndarray
    scheme: WeightingScheme
    threshold_m: float | None
    excluded_share: float
    missing_load_count: int = 0

    @property
    def pairs(self) -> list[tuple[float, float]]:
        return [(float(s), float(w)) for s, w in zip(self.spacings, self.weights)]


def _segment_weights(table: SegmentTable, scheme: WeightingScheme, loads: LoadMap | None):
    """Raw (ids, spacings, weights, missing_load_count) before thresholding."""
    segments = table.unique_segments()
    routes_per_segment: dict[str, set[str]] = {}
    traversals_per_segment: dict[str, int] = {}
    for row in table.rows:
        routes_per_segment.setdefault(row.segment_id, set()).add(row.route_id)
        traversals_per_segment[row.segment_id] = (
            traversals_per_segment.get(row.segment_id, 0) + row.traversals
        )

    missing = 0
    weights = []
    for seg in segments:
        if scheme is WeightingScheme.SEGMENT:
            weights.append(1.0)
        elif scheme is WeightingScheme.ROUTE:
            weights.append(float(len(routes_per_segment[seg.segment_id])))
        elif scheme is WeightingScheme.TRAVERSAL:
            weights.append(float(traversals_per_segment[seg.segment_id]))
        else:
            load = (loads or {}).get((seg.stop_id1, seg.stop_id2))
            if load is None:
                missing += 1
                load = 0.0
            weights.append(float(load))

    ids = [seg.segment_id for seg in segments]
    spacings = np.array([seg.spacing_m for seg in segments], dtype=np.float64)
    return ids, spacings, np.array(weights, dtype=np.float64), missing


def build_weights(
    table: SegmentTable,
    scheme: WeightingScheme | str,
    threshold_m: float | None = DEFAULT_THRESHOLD_M,
    loads: LoadMap | None = None,
) -> WeightedSpacings:
    """Weigh each unique segment per the scheme and apply the threshold.

    Segments with spacing above ``threshold_m`` are removed and their share
    of the total weight is recorded; pass ``threshold_m=None`` to keep
    everything.  Load weighting requires ``loads``; segments absent from the
    map weigh zero and are counted in ``missing_load_count``.
    """
    scheme = WeightingScheme(scheme)
    if not table.rows:
        raise ValueError("empty segment table")
    if threshold_m is not None and threshold_m <= 0:
        raise ValueError("threshold_m must be positive (or None for no threshold)")
    if scheme is WeightingScheme.LOAD and loads is None:
        raise LoadMapMissing("load weighting needs a stop-pair load map")

    _, spacings, weights, missing = _segment_weights(table, scheme, loads)
    total = float(weights.sum())
    if total <= 0.0:
        raise ZeroTotalWeight(f"{scheme.value} weights sum to zero")

    if threshold_m is None:
        keep = np.ones(spacings.size, dtype=bool)
        excluded_share = 0.0
    else:
        keep = spacings <= threshold_m
        if not keep.any():
            raise AllExcluded(f"threshold {threshold_m} m removed all segments")
        excluded_share = float(weights[~keep].sum()) / total

    kept_weights = weights[keep]
    if float(kept_weights.sum()) <= 0.0:
        raise ZeroTotalWeight(f"{scheme.value} weights sum to zero after threshold")
    return WeightedSpacings(
        spacings=spacings[keep],
        weights=kept_weights,
        scheme=scheme,
        threshold_m=threshold_m,
        excluded_share=excluded_share,
        missing_load_count=missing,
    )


def weighted_mean(ws: WeightedSpacings) -> float:
    """sum(w_i * s_i) / sum(w_i)."""
    total = float(ws.weights.sum())
    if total <= 0.0:
        raise ZeroTotalWeight("cannot average with zero total weight")
    return float(np.dot(ws.weights, ws.spacings) / total)


def weighted_ecdf(ws: WeightedSpacings) -> list[tuple[float, float]]:
    """Step points (s, F(s)) of the right-continuous weighted ECDF.

    One point per distinct spacing, in increasing order; the last F value is
    exactly 1.  Evaluate at arbitrary s with :func:`ecdf_evaluate`.
    """
    if float(ws.weights.sum()) <= 0.0:
        raise ZeroTotalWeight("cannot build an ECDF with zero total weight")
    order = np.argsort(ws.spacings, kind="stable")
    s_sorted = ws.spacings[order]
    w_sorted = ws.weights[order]
    values, start = np.unique(s_sorted, return_index=True)
    group_weight = np.add.reduceat(w_sorted, start)
    cumulative = np.cumsum(group_weight)
    # normalizing by the final cumulative (not a re-summation) makes the
    # terminal value exactly 1.0
    shares = cumulative / cumulative[-1]
    return [(float(s), float(f)) for s, f in zip(values, shares)]


def ecdf_evaluate(step_points: list[tuple[float, float]], s: float) -> float:
    """F(s) by step lookup: the share of weight at spacings <= s."""
    values = [p[0] for p in step_points]
    idx = np.searchsorted(values, s, side="right")
    return 0.0 if idx == 0 else step_points[idx - 1][1]


def histogram(
    ws: WeightedSpacings, bin_width_m: float
) -> list[tuple[float, float, float]]:
    """Weight shares over fixed bins [k*w, (k+1)*w) covering [0, threshold].

    Without a threshold the bins cover the data range.  Shares sum to 1 (the
    final bin is closed so the maximum spacing is counted).
    """
    if bin_width_m <= 0:
        raise ValueError("bin_width_m must be positive")
    upper = ws.threshold_m if ws.threshold_m is not None else float(ws.spacings.max())
    n_bins = max(1, math.ceil(upper / bin_width_m - 1e-9))
    edges = bin_width_m * np.arange(n_bins + 1)
    counts, _ = np.histogram(ws.spacings, bins=edges, weights=ws.weights)
    shares = counts / counts.sum()
    return [
        (float(edges[i]), float(edges[i + 1]), float(shares[i])) for i in range(n_bins)
    ]


def silverman_bandwidth(spacings: np.ndarray, weights: np.ndarray) -> float:
    """Silverman bandwidth from the weighted standard deviation.

    Uses the effective sample size n_eff = (sum w)^2 / sum(w^2), giving
    h = sigma_w * (4 / (3 * n_eff))^(1/5).
    """
    total = float(weights.sum())
    mean = float(np.dot(weights, spacings)) / total
    var = float(np.dot(weights, (spacings - mean) ** 2)) / total
    sigma = math.sqrt(var)
    neff = total * total / float(np.dot(weights, weights))
    return sigma * (4.0 / (3.0 * neff)) ** 0.2


def kde(
    ws: WeightedSpacings, grid: np.ndarray | None = None, grid_points: int = 512
) -> list[tuple[float, float]]:
    """Weighted Gaussian kernel density estimate on a grid.

    The default grid spans the data range padded by four bandwidths, wide
    enough that the density integrates to ~1.  Raises
    :class:`DegenerateData` when every spacing is identical.
    """
    if np.unique(ws.spacings).size < 2:
        raise DegenerateData("kernel density estimate needs >= 2 distinct spacings")
    h = silverman_bandwidth(ws.spacings, ws.weights)
    if h <= 0.0:
        raise DegenerateData("zero weighted standard deviation")
    if grid is None:
        lo = float(ws.spacings.min()) - 4.0 * h
        hi = float(ws.spacings.max()) + 4.0 * h
        grid = np.linspace(lo, hi, grid_points)
    else:
        grid = np.asarray(grid, dtype=np.float64)
    w_norm = ws.weights / float(ws.weights.sum())
    z = (grid[:, None] - ws.spacings[None, :]) / h
    density = (w_norm[None, :] * np.exp(-0.5 * z * z)).sum(axis=1) / (
        h * math.sqrt(2.0 * math.pi)
    )
    return [(float(x), float(d)) for x, d in zip(grid, density)]


@dataclass(frozen=True)
class SpacingSummary:
    """Feed-level roll-up of weighted means and service volume."""

    feed_id: str
    busiest_day: dt.date
    segment_weighted_mean_m: float
    route_weighted_mean_m: float
    traversal_weighted_mean_m: float
    load_weighted_mean_m: float | None
    n_routes: int
    n_segments: int
    n_rows: int
    n_traversals: int
    total_service_km: float
    threshold_m: float | None
    excluded_share: dict[str, float] = field(default_factory=dict)


def summarize(
    table: SegmentTable,
    threshold_m: float | None = DEFAULT_THRESHOLD_M,
    loads: LoadMap | None = None,
) -> SpacingSummary:
    """All applicable weighted means plus counts and total service distance.

    The threshold applies to the means and excluded shares only; total
    service km always counts every traversal of every segment.
    """
    if not table.rows:
        raise ValueError("empty segment table")

    means: dict[str, float] = {}
    shares: dict[str, float] = {}
    for scheme in (WeightingScheme.SEGMENT, WeightingScheme.ROUTE, WeightingScheme.TRAVERSAL):
        ws = build_weights(table, scheme, threshold_m)
        means[scheme.value] = weighted_mean(ws)
        shares[scheme.value] = ws.excluded_share
    load_mean = None
    if loads is not None:
        ws = build_weights(table, WeightingScheme.LOAD, threshold_m, loads)
        load_mean = weighted_mean(ws)
        shares[WeightingScheme.LOAD.value] = ws.excluded_share

    return SpacingSummary(
        feed_id=table.feed_id,
        busiest_day=table.measurement_date,
        segment_weighted_mean_m=means["segment"],
        route_weighted_mean_m=means["route"],
        traversal_weighted_mean_m=means["traversal"],
        load_weighted_mean_m=load_mean,
        n_routes=table.n_routes,
        n_segments=len(table.unique_segments()),
        n_rows=table.n_rows,
        n_traversals=table.n_traversals,
        total_service_km=table.total_service_km(),
        threshold_m=threshold_m,
        excluded_share=shares,
    )
