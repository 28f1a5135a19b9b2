"""Signals-per-segment counts and the geometric distribution fit."""

import datetime as dt

import numpy as np
import pytest

from stopspacing.errors import LoadMapMissing, ZeroTotalWeight
from stopspacing.geometry import METERS_PER_DEGREE, Path
from stopspacing.segments import SegmentRow, SegmentTable
from stopspacing.signals import (
    SignalSet,
    count_weight_shares,
    fit_geometric_mle,
    signals_per_segment,
)
from stopspacing.synthetic import metric_to_lonlat


def synthetic_table(paths, date=dt.date(2025, 1, 1)):
    """SegmentTable with one row per path; stop ids g<i>/h<i>."""
    rows = []
    for i, path in enumerate(paths):
        rows.append(
            SegmentRow(
                segment_id=f"g{i:04d}-h{i:04d}",
                stop_id1=f"g{i:04d}",
                stop_id2=f"h{i:04d}",
                route_id=f"r{i % 7}",
                direction_id=0,
                traversals=(i % 5) + 1,
                distance_m=path.length_m,
                path=path,
            )
        )
    return SegmentTable(rows=rows, measurement_date=date, feed_id="synthetic")


def random_fixture(rng, n_segments, n_signals, lat0=40.0, lon0=-74.0, extent=0.05):
    paths = []
    for _ in range(n_segments):
        n = int(rng.integers(2, 7))
        lat = lat0 + rng.uniform(0, extent) + np.cumsum(rng.uniform(-0.001, 0.001, n))
        lon = lon0 + rng.uniform(0, extent) + np.cumsum(rng.uniform(-0.001, 0.001, n))
        paths.append(Path(lat, lon))
    table = synthetic_table(paths)
    sig_lats = lat0 + rng.uniform(-0.002, extent + 0.002, n_signals)
    sig_lons = lon0 + rng.uniform(-0.002, extent + 0.002, n_signals)
    signals = SignalSet.from_coordinates(zip(sig_lats, sig_lons))
    return table, signals


class TestSignalSet:
    def test_exact_duplicates_collapse(self):
        s = SignalSet.from_coordinates([(1.0, 2.0), (1.0, 2.0), (3.0, 4.0)])
        assert s.size == 2

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            SignalSet.from_coordinates([(95.0, 0.0)])

    def test_read_csv(self, signals_path):
        s = SignalSet.read(signals_path)
        assert s.size == 7

    def test_read_requires_lat_lon_columns(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("x,y\n1,2\n")
        with pytest.raises(ValueError):
            SignalSet.read(bad)


class TestCounts:
    def test_two_route_expected_counts(self, two_route_table, signals_path):
        signals = SignalSet.read(signals_path)
        counts = signals_per_segment(two_route_table, signals)
        assert counts.counts == {
            "s1-s2": 2, "s2-s3": 0, "s3-s4": 2, "s4-s1": 1, "s5-s3": 1
        }

    def test_brute_force_agrees_on_two_route(self, two_route_table, signals_path):
        signals = SignalSet.read(signals_path)
        fast = signals_per_segment(two_route_table, signals, use_index=True)
        slow = signals_per_segment(two_route_table, signals, use_index=False)
        assert fast.counts == slow.counts

    @pytest.mark.parametrize("buffer_m", [5.5, 60.0, 400.0])
    def test_indexed_equals_brute_force_random(self, buffer_m):
        rng = np.random.default_rng(int(buffer_m * 10))
        table, signals = random_fixture(rng, n_segments=100, n_signals=500)
        fast = signals_per_segment(table, signals, buffer_m=buffer_m, use_index=True)
        slow = signals_per_segment(table, signals, buffer_m=buffer_m, use_index=False)
        assert fast.counts == slow.counts
        if buffer_m >= 60.0:
            assert sum(fast.counts.values()) > 0  # the test actually saw hits

    def test_shared_point_counts_for_both_segments(self):
        lon1, lat1 = metric_to_lonlat(0.0, 0.0)
        lon2, lat2 = metric_to_lonlat(300.0, 0.0)
        lon3, lat3 = metric_to_lonlat(300.0, 400.0)
        p1 = Path([lat1, lat2], [lon1, lon2])
        p2 = Path([lat2, lat3], [lon2, lon3])
        table = synthetic_table([p1, p2])
        signals = SignalSet.from_coordinates([(lat2, lon2)])  # the shared end
        counts = signals_per_segment(table, signals)
        assert list(counts.counts.values()) == [1, 1]

    def test_antimeridian_segment(self):
        # path crossing lon 180; signal just on the other side of the seam
        path = Path([0.0, 0.0], [179.9995, -179.9995])
        table = synthetic_table([path])
        signals = SignalSet.from_coordinates([(0.00001, -179.99985), (0.1, -179.0)])
        fast = signals_per_segment(table, signals, buffer_m=5.5, use_index=True)
        slow = signals_per_segment(table, signals, buffer_m=5.5, use_index=False)
        assert fast.counts == slow.counts
        assert sum(fast.counts.values()) == 1

    def test_empty_signal_set(self, two_route_table):
        counts = signals_per_segment(
            two_route_table, SignalSet.from_coordinates([])
        )
        assert set(counts.counts.values()) == {0}

    def test_rejects_nonpositive_buffer(self, two_route_table, signals_path):
        with pytest.raises(ValueError):
            signals_per_segment(
                two_route_table, SignalSet.read(signals_path), buffer_m=0.0
            )


class TestGeometricFit:
    def test_mean_1_5_gives_p_0_4(self):
        lon1, lat1 = metric_to_lonlat(0.0, 0.0)
        lon2, lat2 = metric_to_lonlat(100.0, 0.0)
        paths = [Path([lat1, lat2], [lon1, lon2]) for _ in range(2)]
        table = synthetic_table(paths)
        counts_table = signals_per_segment(table, SignalSet.from_coordinates([]))
        counts_table.counts = dict(zip(sorted(counts_table.counts), [1, 2]))
        fit = fit_geometric_mle(counts_table, scheme="segment")
        assert fit.weighted_mean_count == 1.5
        assert fit.p_hat == 0.4  # closed form is exact here

    def test_all_zero_counts_give_p_1(self, two_route_table):
        counts = signals_per_segment(
            two_route_table, SignalSet.from_coordinates([])
        )
        fit = fit_geometric_mle(counts, scheme="traversal")
        assert fit.p_hat == 1.0
        assert fit.pmf(0) == 1.0
        assert fit.pmf(3) == 0.0

    def test_two_route_traversal_fit(self, two_route_table, signals_path):
        counts = signals_per_segment(two_route_table, SignalSet.read(signals_path))
        fit = fit_geometric_mle(counts, scheme="traversal")
        # counts (2,0,2,1,1) with traversal weights (120,120,180,180,60):
        # mean = 840/660, p = 660/1500 = 0.44
        assert fit.weighted_mean_count == pytest.approx(840.0 / 660.0, rel=1e-12)
        assert fit.p_hat == pytest.approx(0.44, rel=1e-12)

    def test_pmf_shape(self):
        lon1, lat1 = metric_to_lonlat(0.0, 0.0)
        lon2, lat2 = metric_to_lonlat(100.0, 0.0)
        table = synthetic_table([Path([lat1, lat2], [lon1, lon2])])
        counts = signals_per_segment(table, SignalSet.from_coordinates([]))
        counts.counts = {next(iter(counts.counts)): 3}
        fit = fit_geometric_mle(counts, scheme="segment")
        # p(k) = p (1-p)^k decreasing, partial sums below 1
        pmf = fit.predicted_pmf(10)
        assert all(b < a for a, b in zip(pmf, pmf[1:]))
        assert sum(pmf) < 1.0
        assert fit.pmf(0) == fit.p_hat

    def test_load_scheme_requires_map(self, two_route_table, signals_path):
        counts = signals_per_segment(two_route_table, SignalSet.read(signals_path))
        with pytest.raises(LoadMapMissing):
            fit_geometric_mle(counts, scheme="load")

    def test_observed_shares(self, two_route_table, signals_path):
        counts = signals_per_segment(two_route_table, SignalSet.read(signals_path))
        shares = count_weight_shares(counts, scheme="traversal")
        assert shares == [
            (0, pytest.approx(120.0 / 660.0)),
            (1, pytest.approx(240.0 / 660.0)),
            (2, pytest.approx(300.0 / 660.0)),
        ]
        assert sum(s for _, s in shares) == pytest.approx(1.0, abs=1e-12)
