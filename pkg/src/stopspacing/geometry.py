"""Geodesic primitives over WGS84 coordinates.

All distances are great-circle (haversine) meters on a sphere of radius
6,371,000 m.  Point-to-edge math happens in a local equirectangular plane
centered on the query point, which is accurate to well under a decimeter at
the sub-kilometer scales of inter-stop geometry.  Points along an edge are
interpolated on the great circle (spherical linear interpolation), so a
sub-path cut at distance ``d`` really is ``d`` meters long.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidRange

EARTH_RADIUS_M = 6_371_000.0

#: Meridian arc length of one degree on the working sphere.
METERS_PER_DEGREE = EARTH_RADIUS_M * math.pi / 180.0


@dataclass(frozen=True)
class GeoPoint:
    """A WGS84 coordinate in degrees."""

    lat: float
    lon: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0 and -180.0 <= self.lon <= 180.0):
            raise ValueError(f"coordinates out of range: ({self.lat}, {self.lon})")


@dataclass(frozen=True)
class PathPosition:
    """Where a point landed on a path after projection.

    ``distance_along_m`` is measured from the path start;  ``offset_m`` is the
    residual between the query point and its projection (the snap error).
    """

    segment_index: int
    fraction: float
    distance_along_m: float
    offset_m: float


def _haversine_m(lat1, lon1, lat2, lon2):
    """Great-circle distance in meters; accepts scalars or numpy arrays."""
    phi1 = np.radians(lat1)
    phi2 = np.radians(lat2)
    half_dphi = (phi2 - phi1) / 2.0
    half_dlam = (np.radians(lon2) - np.radians(lon1)) / 2.0
    a = np.sin(half_dphi) ** 2 + np.cos(phi1) * np.cos(phi2) * np.sin(half_dlam) ** 2
    return 2.0 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def great_circle_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Haversine distance in meters between two points."""
    return float(_haversine_m(a.lat, a.lon, b.lat, b.lon))


class Path:
    """An immutable polyline with cumulative great-circle distances.

    ``cumulative_m[i]`` is the distance in meters from the first vertex to
    vertex ``i`` along the polyline; ``cumulative_m[0]`` is 0.
    """

    __slots__ = ("lats", "lons", "cumulative_m")

    def __init__(self, lats: Sequence[float], lons: Sequence[float]):
        lats = np.array(lats, dtype=np.float64)
        lons = np.array(lons, dtype=np.float64)
        if lats.ndim != 1 or lats.shape != lons.shape:
            raise ValueError("lat/lon arrays must be one-dimensional and equal length")
        if lats.size < 2:
            raise ValueError("a path needs at least two points")
        if np.any(np.abs(lats) > 90.0) or np.any(np.abs(lons) > 180.0):
            raise ValueError("path coordinates out of range")
        steps = _haversine_m(lats[:-1], lons[:-1], lats[1:], lons[1:])
        cumulative = np.concatenate(([0.0], np.cumsum(steps)))
        for arr in (lats, lons, cumulative):
            arr.setflags(write=False)
        self.lats = lats
        self.lons = lons
        self.cumulative_m = cumulative

    @classmethod
    def from_points(cls, points: Iterable[GeoPoint]) -> "Path":
        pts = list(points)
        return cls([p.lat for p in pts], [p.lon for p in pts])

    @property
    def points(self) -> list[GeoPoint]:
        return [GeoPoint(float(la), float(lo)) for la, lo in zip(self.lats, self.lons)]

    @property
    def n_points(self) -> int:
        return int(self.lats.size)

    @property
    def length_m(self) -> float:
        return float(self.cumulative_m[-1])

    def __repr__(self):
        return f"Path({self.n_points} points, {self.length_m:.1f} m)"


def path_length(p: Path) -> float:
    """Total polyline length in meters."""
    return p.length_m


def _local_plane_coslat(lats):
    return np.cos(np.radians(lats))


def _wrap_dlon(dlon):
    # map longitude differences into (-180, 180]
    return (np.asarray(dlon) + 180.0) % 360.0 - 180.0


def min_distances_to_path(path: Path, lats, lons) -> np.ndarray:
    """Planar distance from each query point to its nearest path edge.

    Vectorized over query points; each point gets its own equirectangular
    plane so results match :func:`point_to_path_distance` bit for bit.
    """
    lats = np.atleast_1d(np.asarray(lats, dtype=np.float64))
    lons = np.atleast_1d(np.asarray(lons, dtype=np.float64))
    coslat = _local_plane_coslat(lats)[:, None]
    x = np.radians(_wrap_dlon(path.lons[None, :] - lons[:, None])) * coslat * EARTH_RADIUS_M
    y = np.radians(path.lats[None, :] - lats[:, None]) * EARTH_RADIUS_M
    ax, ay = x[:, :-1], y[:, :-1]
    ex, ey = x[:, 1:] - ax, y[:, 1:] - ay
    seg_sq = ex * ex + ey * ey
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(seg_sq > 0.0, -(ax * ex + ay * ey) / seg_sq, 0.0)
    t = np.clip(t, 0.0, 1.0)
    px = ax + t * ex
    py = ay + t * ey
    return np.hypot(px, py).min(axis=1)


def point_to_path_distance(p: Path, q: GeoPoint) -> float:
    """Minimum distance in meters from ``q`` to any edge of ``p``."""
    return float(min_distances_to_path(p, [q.lat], [q.lon])[0])


def project_point_onto_path(
    p: Path, q: GeoPoint, min_distance_along_m: float = 0.0
) -> PathPosition:
    """Snap ``q`` onto ``p``, considering only positions at or past a floor.

    Among every path position whose distance-along is at least
    ``min_distance_along_m``, returns the one closest to ``q``; ties go to the
    smallest distance-along.  The floor is what keeps successive stop snaps
    monotone on looping shapes.
    """
    lo = min(max(min_distance_along_m, 0.0), p.length_m)
    return _project(p, q.lat, q.lon, lo, None)


def _project(path: Path, q_lat: float, q_lon: float, lo: float, hi) -> PathPosition:
    cum = path.cumulative_m
    if hi is None:
        hi = float(cum[-1])
    coslat = math.cos(math.radians(q_lat))
    x = np.radians(_wrap_dlon(path.lons - q_lon)) * coslat * EARTH_RADIUS_M
    y = np.radians(path.lats - q_lat) * EARTH_RADIUS_M
    ax, ay = x[:-1], y[:-1]
    ex, ey = x[1:] - ax, y[1:] - ay
    seg_sq = ex * ex + ey * ey
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(seg_sq > 0.0, -(ax * ex + ay * ey) / seg_sq, 0.0)
    t = np.clip(t, 0.0, 1.0)

    lengths = cum[1:] - cum[:-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        t_lo = np.where(lengths > 0.0, (lo - cum[:-1]) / lengths, 0.0)
        t_hi = np.where(lengths > 0.0, (hi - cum[:-1]) / lengths, 1.0)
    t = np.clip(t, np.clip(t_lo, 0.0, 1.0), np.clip(t_hi, 0.0, 1.0))

    px = ax + t * ex
    py = ay + t * ey
    dist = np.hypot(px, py)
    # edges wholly outside the window cannot host a candidate
    usable = (cum[1:] >= lo) & (cum[:-1] <= hi)
    dist = np.where(usable, dist, np.inf)
    i = int(np.argmin(dist))
    frac = float(t[i])
    return PathPosition(
        segment_index=i,
        fraction=frac,
        distance_along_m=float(cum[i] + frac * lengths[i]),
        offset_m=float(dist[i]),
    )


def _unit_vector(lat: float, lon: float):
    phi = math.radians(lat)
    lam = math.radians(lon)
    cphi = math.cos(phi)
    return np.array([cphi * math.cos(lam), cphi * math.sin(lam), math.sin(phi)])


def _slerp(lat1, lon1, lat2, lon2, t: float) -> tuple[float, float]:
    """Interpolate along the great circle at arc fraction ``t`` in [0, 1]."""
    v1 = _unit_vector(lat1, lon1)
    v2 = _unit_vector(lat2, lon2)
    cross = np.cross(v1, v2)
    sin_omega = float(np.linalg.norm(cross))
    omega = math.atan2(sin_omega, float(np.dot(v1, v2)))
    if sin_omega < 1e-12:
        # coincident (or antipodal, which shapes never are): fall back to linear
        v = (1.0 - t) * v1 + t * v2
    else:
        v = (math.sin((1.0 - t) * omega) * v1 + math.sin(t * omega) * v2) / sin_omega
    lat = math.degrees(math.atan2(v[2], math.hypot(v[0], v[1])))
    lon = math.degrees(math.atan2(v[1], v[0]))
    return lat, lon


def _point_at(path: Path, d: float) -> tuple[float, float]:
    """Coordinates of the path position ``d`` meters from the start.

    Exact vertex coordinates are returned verbatim when ``d`` lands on a
    vertex, so identity substrings reproduce the original points.
    """
    cum = path.cumulative_m
    j = int(np.searchsorted(cum, d, side="left"))
    if j < cum.size and cum[j] == d:
        return float(path.lats[j]), float(path.lons[j])
    i = j - 1
    t = (d - cum[i]) / (cum[i + 1] - cum[i])
    return _slerp(path.lats[i], path.lons[i], path.lats[i + 1], path.lons[i + 1], t)


def substring_path(p: Path, from_m: float, to_m: float) -> Path:
    """Extract the sub-path between two distances along ``p``.

    The result starts at the interpolated point ``from_m`` meters in, ends at
    ``to_m``, keeps every interior vertex, and (up to float rounding) has
    length ``to_m - from_m``.  Raises :class:`InvalidRange` unless
    ``0 <= from_m <= to_m <= path_length(p)`` within a small tolerance.
    """
    total = p.length_m
    eps = 1e-6 * max(1.0, total)
    if not (-eps <= from_m <= to_m <= total + eps):
        raise InvalidRange(
            f"substring [{from_m}, {to_m}] outside path of length {total}"
        )
    from_m = min(max(from_m, 0.0), total)
    to_m = min(max(to_m, 0.0), total)

    start = _point_at(p, from_m)
    end = _point_at(p, to_m)
    cum = p.cumulative_m
    i0 = int(np.searchsorted(cum, from_m, side="right"))
    i1 = int(np.searchsorted(cum, to_m, side="left"))
    lats = [start[0], *p.lats[i0:i1], end[0]]
    lons = [start[1], *p.lons[i0:i1], end[1]]
    return Path(lats, lons)
