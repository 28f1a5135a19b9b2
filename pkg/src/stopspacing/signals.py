"""Signals-per-segment: an alternative distance metric.

Counts how many traffic signals fall within a small buffer (default 5.5 m)
of each segment's path, then fits a geometric distribution on {0, 1, 2, ...}
to the weighted counts.  The closed-form maximum-likelihood estimate for
that support is p = 1 / (1 + weighted mean count).

Counting runs against a uniform lat/lon grid over the signal points; the
grid only prunes candidates, and the final distance predicate is the same
one the brute-force scan uses, so both strategies return identical counts.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import LoadMapMissing, ZeroTotalWeight
from .geometry import METERS_PER_DEGREE, Path, min_distances_to_path
from .segments import SegmentTable
from .stats import LoadMap, WeightingScheme, _segment_weights

DEFAULT_BUFFER_M = 5.5

#: Grid cell edge in degrees (~550 m); purely a pruning granularity.
_CELL_DEG = 0.005


@dataclass(frozen=True)
class SignalSet:
    """Deduplicated signal coordinates (exact duplicates counted once)."""

    lats: np.ndarray
    lons: np.ndarray
    label: str = ""

    @classmethod
    def from_coordinates(cls, coords, label: str = "") -> "SignalSet":
        pairs = sorted({(float(lat), float(lon)) for lat, lon in coords})
        for lat, lon in pairs:
            if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
                raise ValueError(f"signal coordinates out of range: ({lat}, {lon})")
        lats = np.array([p[0] for p in pairs], dtype=np.float64)
        lons = np.array([p[1] for p in pairs], dtype=np.float64)
        return cls(lats=lats, lons=lons, label=label)

    @classmethod
    def read(cls, path) -> "SignalSet":
        """Read a delimited text file with lat, lon header columns."""
        with open(path, encoding="utf-8-sig", newline="") as handle:
            reader = csv.DictReader(handle)
            fields = {name.strip().lower(): name for name in reader.fieldnames or []}
            if "lat" not in fields or "lon" not in fields:
                raise ValueError(f"{path}: expected lat and lon columns")
            coords = [
                (float(row[fields["lat"]]), float(row[fields["lon"]])) for row in reader
            ]
        return cls.from_coordinates(coords, label=str(path))

    @property
    def size(self) -> int:
        return int(self.lats.size)


@dataclass
class SignalCountTable:
    """Signal count per unique segment, tied back to its segment table."""

    table: SegmentTable
    counts: dict[str, int]
    buffer_m: float

    def items(self) -> list[tuple[str, int]]:
        return sorted(self.counts.items())

    @property
    def max_count(self) -> int:
        return max(self.counts.values(), default=0)


class _SignalGrid:
    def __init__(self, lats: np.ndarray, lons: np.ndarray):
        self._cells: dict[tuple[int, int], list[int]] = {}
        rows = np.floor(lats / _CELL_DEG).astype(np.int64)
        cols = np.floor(lons / _CELL_DEG).astype(np.int64)
        for i, key in enumerate(zip(rows.tolist(), cols.tolist())):
            self._cells.setdefault(key, []).append(i)

    def candidates(self, lat_min, lat_max, lon_min, lon_max) -> np.ndarray:
        row_lo = math.floor(lat_min / _CELL_DEG)
        row_hi = math.floor(lat_max / _CELL_DEG)
        out: list[int] = []
        for lon_range in _split_lon_range(lon_min, lon_max):
            col_lo = math.floor(lon_range[0] / _CELL_DEG)
            col_hi = math.floor(lon_range[1] / _CELL_DEG)
            for row in range(row_lo, row_hi + 1):
                for col in range(col_lo, col_hi + 1):
                    out.extend(self._cells.get((row, col), ()))
        return np.array(sorted(set(out)), dtype=np.int64)


def _split_lon_range(lon_min: float, lon_max: float) -> list[tuple[float, float]]:
    """Split a query range that spills past the antimeridian."""
    ranges = []
    if lon_min < -180.0:
        ranges.append((lon_min + 360.0, 180.0))
        lon_min = -180.0
    if lon_max > 180.0:
        ranges.append((-180.0, lon_max - 360.0))
        lon_max = 180.0
    ranges.append((lon_min, lon_max))
    return ranges


def _segment_bbox(path: Path, buffer_m: float):
    lat_min = float(path.lats.min())
    lat_max = float(path.lats.max())
    margin_lat = 1.5 * buffer_m / METERS_PER_DEGREE
    max_abs_lat = min(89.0, max(abs(lat_min), abs(lat_max)) + margin_lat)
    margin_lon = 1.5 * buffer_m / (METERS_PER_DEGREE * math.cos(math.radians(max_abs_lat)))
    return (
        lat_min - margin_lat,
        lat_max + margin_lat,
        float(path.lons.min()) - margin_lon,
        float(path.lons.max()) + margin_lon,
    )


def signals_per_segment(
    table: SegmentTable,
    signals: SignalSet,
    buffer_m: float = DEFAULT_BUFFER_M,
    use_index: bool = True,
) -> SignalCountTable:
    """Signals within ``buffer_m`` of each unique segment's path.

    A signal near two overlapping segments counts once for each; counts are
    per segment, not globally exclusive.  ``use_index=False`` forces the
    all-pairs scan (same results, slower); it exists so the pruning can be
    audited.
    """
    if buffer_m <= 0:
        raise ValueError("buffer_m must be positive")
    counts: dict[str, int] = {}
    grid = _SignalGrid(signals.lats, signals.lons) if use_index and signals.size else None
    for seg in table.unique_segments():
        if signals.size == 0:
            counts[seg.segment_id] = 0
            continue
        if grid is not None:
            idx = grid.candidates(*_segment_bbox(seg.path, buffer_m))
            if idx.size == 0:
                counts[seg.segment_id] = 0
                continue
            dists = min_distances_to_path(seg.path, signals.lats[idx], signals.lons[idx])
        else:
            dists = min_distances_to_path(seg.path, signals.lats, signals.lons)
        counts[seg.segment_id] = int((dists <= buffer_m).sum())
    return SignalCountTable(table=table, counts=counts, buffer_m=buffer_m)


@dataclass(frozen=True)
class GeometricFit:
    """Geometric distribution on support {0, 1, 2, ...} fit by MLE."""

    p_hat: float
    weighted_mean_count: float
    scheme: WeightingScheme

    def pmf(self, k: int) -> float:
        return self.p_hat * (1.0 - self.p_hat) ** k

    def predicted_pmf(self, max_k: int) -> list[float]:
        return [self.pmf(k) for k in range(max_k + 1)]

    def log_likelihood(self, counts: np.ndarray, weights: np.ndarray, p: float | None = None) -> float:
        p = self.p_hat if p is None else p
        if p >= 1.0:
            # all mass at zero; defined only when every count is zero
            return 0.0 if not np.any(counts > 0) else -math.inf
        return float(np.dot(weights, np.log(p) + counts * np.log(1.0 - p)))


def fit_geometric_mle(
    counts: SignalCountTable,
    scheme: WeightingScheme | str = WeightingScheme.TRAVERSAL,
    loads: LoadMap | None = None,
) -> GeometricFit:
    """Closed-form geometric MLE over scheme-weighted signal counts.

    With mean weighted count m, the likelihood over pmf p*(1-p)^k peaks at
    p = 1/(1+m); all-zero counts give p = 1 exactly.
    """
    scheme = WeightingScheme(scheme)
    if scheme is WeightingScheme.LOAD and loads is None:
        raise LoadMapMissing("load weighting requires a load map")
    ids, _, weights, _ = _segment_weights(counts.table, scheme, loads)
    total = float(weights.sum())
    if total <= 0.0:
        raise ZeroTotalWeight(f"{scheme.value} weights sum to zero")
    k = np.array([counts.counts[i] for i in ids], dtype=np.float64)
    mean_count = float(np.dot(weights, k) / total)
    return GeometricFit(
        p_hat=1.0 / (1.0 + mean_count), weighted_mean_count=mean_count, scheme=scheme
    )


def count_weight_shares(
    counts: SignalCountTable,
    scheme: WeightingScheme | str = WeightingScheme.TRAVERSAL,
    loads: LoadMap | None = None,
) -> list[tuple[int, float]]:
    """Observed weight share of each count value k = 0..max."""
    scheme = WeightingScheme(scheme)
    if scheme is WeightingScheme.LOAD and loads is None:
        raise LoadMapMissing("load weighting requires a load map")
    ids, _, weights, _ = _segment_weights(counts.table, scheme, loads)
    total = float(weights.sum())
    if total <= 0.0:
        raise ZeroTotalWeight(f"{scheme.value} weights sum to zero")
    by_id = dict(zip(ids, weights))
    shares = np.zeros(counts.max_count + 1)
    for seg_id, k in counts.counts.items():
        shares[k] += by_id[seg_id]
    return [(k, float(s / total)) for k, s in enumerate(shares)]
