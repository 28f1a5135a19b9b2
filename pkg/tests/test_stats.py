"""Weighting schemes, threshold truncation, ECDF / histogram / KDE.

Frozen expected values come from hand enumeration (weight tables small
enough to sum on paper) or from independent closed-form evaluations noted
inline.
"""

import datetime as dt

import numpy as np
import pytest

from stopspacing.errors import (
    AllExcluded,
    DegenerateData,
    LoadMapMissing,
    ZeroTotalWeight,
)
from stopspacing.feed import parse_feed
from stopspacing.segments import extract_segments
from stopspacing.service_calendar import busiest_day
from stopspacing.stats import (
    WeightedSpacings,
    WeightingScheme,
    build_weights,
    ecdf_evaluate,
    histogram,
    kde,
    read_load_map,
    silverman_bandwidth,
    summarize,
    weighted_ecdf,
    weighted_mean,
)
from stopspacing.synthetic import TWO_ROUTE


def make_ws(spacings, weights, threshold=None):
    return WeightedSpacings(
        spacings=np.asarray(spacings, dtype=np.float64),
        weights=np.asarray(weights, dtype=np.float64),
        scheme=WeightingScheme.SEGMENT,
        threshold_m=threshold,
        excluded_share=0.0,
        missing_load_count=0,
    )


@pytest.fixture(scope="module")
def long_table(long_segment_zip):
    feed = parse_feed(long_segment_zip)
    day, _ = busiest_day(feed)
    return extract_segments(feed, day)


class TestSchemeWeights:
    def test_segment_weights_are_unit(self, two_route_table):
        ws = build_weights(two_route_table, WeightingScheme.SEGMENT)
        assert np.all(ws.weights == 1.0)
        assert ws.weights.size == TWO_ROUTE.n_unique_segments

    def test_route_weights_count_distinct_routes(self, two_route_table):
        ws = build_weights(two_route_table, "route")
        by_spacing = dict(zip(np.round(ws.spacings), ws.weights))
        # shared 3->4 (800 m) and 4->1 (900 m) carry two routes each
        assert by_spacing[800.0] == 2.0 and by_spacing[900.0] == 2.0
        assert by_spacing[200.0] == 1.0 and by_spacing[1000.0] == 1.0
        assert float(ws.weights.sum()) == 7.0

    def test_traversal_weights(self, two_route_table):
        ws = build_weights(two_route_table, WeightingScheme.TRAVERSAL)
        by_spacing = dict(zip(np.round(ws.spacings), ws.weights))
        assert by_spacing == {
            200.0: 120.0, 250.0: 120.0, 800.0: 180.0, 900.0: 180.0, 1000.0: 60.0
        }

    def test_load_weights(self, two_route_table, load_map_path):
        loads = read_load_map(load_map_path)
        ws = build_weights(two_route_table, "load", loads=loads)
        assert float(ws.weights.sum()) == 85.0
        assert ws.missing_load_count == 0

    def test_load_requires_map(self, two_route_table):
        with pytest.raises(LoadMapMissing):
            build_weights(two_route_table, WeightingScheme.LOAD)

    def test_missing_load_drops_to_zero_weight(self, two_route_table, load_map_path):
        loads = read_load_map(load_map_path)
        del loads[("s5", "s3")]
        ws = build_weights(two_route_table, "load", loads=loads)
        assert ws.missing_load_count == 1
        assert float(ws.weights.sum()) == 80.0

    def test_all_zero_weights_raise(self, two_route_table):
        loads = {pair: 0.0 for pair in TWO_ROUTE.loads}
        with pytest.raises(ZeroTotalWeight):
            build_weights(two_route_table, "load", loads=loads)


class TestWeightedMean:
    def test_hand_example(self):
        # (100*1 + 200*1 + 400*2) / 4 = 275
        assert weighted_mean(make_ws([100, 200, 400], [1, 1, 2])) == pytest.approx(275.0)

    def test_two_route_means(self, two_route_table, load_map_path):
        cases = [
            (WeightingScheme.SEGMENT, None, TWO_ROUTE.segment_mean_m),
            (WeightingScheme.ROUTE, None, TWO_ROUTE.route_mean_m),
            (WeightingScheme.TRAVERSAL, None, TWO_ROUTE.traversal_mean_m),
            (WeightingScheme.LOAD, read_load_map(load_map_path), TWO_ROUTE.load_mean_m),
        ]
        for scheme, loads, want in cases:
            ws = build_weights(two_route_table, scheme, loads=loads)
            assert weighted_mean(ws) == pytest.approx(want, rel=1e-6), scheme


class TestThreshold:
    def test_excludes_long_segment(self, long_table):
        ws = build_weights(long_table, "segment", threshold_m=3000.0)
        assert ws.spacings.size == 1
        assert weighted_mean(ws) == pytest.approx(500.0, abs=0.01)
        assert ws.excluded_share == 0.5  # one of two unit weights

    def test_no_threshold_reincludes(self, long_table):
        ws = build_weights(long_table, "segment", threshold_m=None)
        assert ws.spacings.size == 2
        assert weighted_mean(ws) == pytest.approx(10700.0, abs=0.1)
        assert ws.excluded_share == 0.0

    def test_boundary_is_inclusive(self, long_table):
        # a threshold equal to the longest spacing keeps every segment
        everything = build_weights(long_table, "segment", threshold_m=None)
        at_max = build_weights(
            long_table, "segment", threshold_m=float(everything.spacings.max())
        )
        assert at_max.spacings.size == everything.spacings.size
        assert at_max.excluded_share == 0.0

    def test_all_excluded_raises(self, long_table):
        with pytest.raises(AllExcluded):
            build_weights(long_table, "segment", threshold_m=100.0)

    def test_traversal_share(self, long_table):
        ws = build_weights(long_table, "traversal", threshold_m=3000.0)
        # one trip over each segment: shares split evenly
        assert ws.excluded_share == 0.5


class TestEcdf:
    def test_randomized_properties(self):
        rng = np.random.default_rng(99)
        for _ in range(200):
            n = int(rng.integers(1, 40))
            ws = make_ws(
                rng.uniform(0.0, 3000.0, n), rng.uniform(0.01, 10.0, n)
            )
            points = weighted_ecdf(ws)
            values = [p[0] for p in points]
            shares = [p[1] for p in points]
            assert values == sorted(values)
            assert all(b >= a for a, b in zip(shares, shares[1:]))
            assert shares[-1] == 1.0  # exactly, not approximately
            scaled = make_ws(ws.spacings, ws.weights * 37.5)
            for (s1, f1), (s2, f2) in zip(points, weighted_ecdf(scaled)):
                assert s1 == s2
                assert f1 == pytest.approx(f2, rel=1e-12)

    def test_right_continuity(self):
        points = weighted_ecdf(make_ws([10.0, 20.0], [1.0, 3.0]))
        assert ecdf_evaluate(points, 10.0) == pytest.approx(0.25)
        assert ecdf_evaluate(points, 9.999999) == 0.0
        assert ecdf_evaluate(points, 20.0) == 1.0
        assert ecdf_evaluate(points, 15.0) == pytest.approx(0.25)

    def test_two_route_traversal_value(self, two_route_table):
        ws = build_weights(two_route_table, "traversal")
        points = weighted_ecdf(ws)
        # segments of 200 and 250 m carry 240 of 660 traversals
        assert ecdf_evaluate(points, 250.5) == pytest.approx(240.0 / 660.0, rel=1e-9)
        assert ecdf_evaluate(points, 100.0) == 0.0
        assert ecdf_evaluate(points, 1500.0) == 1.0

    def test_duplicate_spacings_merge(self):
        points = weighted_ecdf(make_ws([5.0, 5.0, 7.0], [1.0, 2.0, 1.0]))
        assert len(points) == 2
        assert points[0] == (5.0, pytest.approx(0.75))


class TestHistogram:
    def test_spacing_falls_in_half_open_bin(self):
        ws = make_ws([75.0], [1.0], threshold=3000.0)
        bins = histogram(ws, 50.0)
        assert len(bins) == 60
        hot = [b for b in bins if b[2] > 0.0]
        assert hot == [(50.0, 100.0, 1.0)]

    def test_threshold_value_lands_in_final_closed_bin(self):
        ws = make_ws([3000.0, 100.0], [1.0, 1.0], threshold=3000.0)
        bins = histogram(ws, 50.0)
        assert bins[-1][0] == 2950.0 and bins[-1][1] == 3000.0
        assert bins[-1][2] == pytest.approx(0.5)

    def test_shares_sum_to_one(self):
        rng = np.random.default_rng(3)
        ws = make_ws(
            rng.uniform(0, 2999, 300), rng.uniform(0.1, 5.0, 300), threshold=3000.0
        )
        bins = histogram(ws, 50.0)
        assert sum(b[2] for b in bins) == pytest.approx(1.0, abs=1e-9)

    def test_unthresholded_covers_data_range(self):
        ws = make_ws([120.0, 480.0], [1.0, 1.0], threshold=None)
        bins = histogram(ws, 100.0)
        assert bins[0][0] == 0.0
        assert bins[-1][1] >= 480.0
        assert sum(b[2] for b in bins) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_nonpositive_width(self):
        with pytest.raises(ValueError):
            histogram(make_ws([1.0], [1.0]), 0.0)


class TestKde:
    def test_silverman_hand_values(self):
        # sigma=0.5, n_eff=2 -> 0.4610539557; weights (1,3): sigma=0.433013,
        # n_eff=1.6 -> 0.4175076013 (computed independently)
        h = silverman_bandwidth(np.array([0.0, 1.0]), np.array([1.0, 1.0]))
        assert h == pytest.approx(0.4610539557, abs=1e-9)
        h = silverman_bandwidth(np.array([0.0, 1.0]), np.array([1.0, 3.0]))
        assert h == pytest.approx(0.4175076013, abs=1e-9)

    def test_density_integrates_to_one(self):
        rng = np.random.default_rng(11)
        ws = make_ws(rng.uniform(100, 900, 50), rng.uniform(0.5, 2.0, 50))
        points = kde(ws)
        xs = np.array([p[0] for p in points])
        ys = np.array([p[1] for p in points])
        assert np.all(ys >= 0.0)
        assert np.trapezoid(ys, xs) == pytest.approx(1.0, abs=1e-3)

    def test_symmetric_data_symmetric_density(self):
        ws = make_ws([0.0, 1.0], [1.0, 1.0])
        grid = np.linspace(-1.0, 2.0, 301)  # symmetric about 0.5
        points = kde(ws, grid=grid)
        ys = np.array([p[1] for p in points])
        assert np.allclose(ys, ys[::-1], rtol=1e-12)

    def test_identical_spacings_degenerate(self):
        with pytest.raises(DegenerateData):
            kde(make_ws([400.0, 400.0], [1.0, 2.0]))

    def test_zero_spread_weights_degenerate(self):
        with pytest.raises(DegenerateData):
            kde(make_ws([0.0, 1.0], [1.0, 0.0]))


class TestSummarize:
    def test_matches_individual_means(self, two_route_table, load_map_path):
        loads = read_load_map(load_map_path)
        summary = summarize(two_route_table, loads=loads)
        assert summary.segment_weighted_mean_m == pytest.approx(
            TWO_ROUTE.segment_mean_m, rel=1e-6
        )
        assert summary.route_weighted_mean_m == pytest.approx(
            TWO_ROUTE.route_mean_m, rel=1e-6
        )
        assert summary.traversal_weighted_mean_m == pytest.approx(
            TWO_ROUTE.traversal_mean_m, rel=1e-6
        )
        assert summary.load_weighted_mean_m == pytest.approx(
            TWO_ROUTE.load_mean_m, rel=1e-6
        )
        assert summary.busiest_day == TWO_ROUTE.busiest_day
        assert summary.n_segments == TWO_ROUTE.n_unique_segments
        assert summary.n_rows == TWO_ROUTE.n_rows
        assert summary.n_traversals == TWO_ROUTE.n_traversals

    def test_threshold_does_not_touch_service_km(self, two_route_table):
        capped = summarize(two_route_table, threshold_m=300.0)
        assert capped.total_service_km == pytest.approx(
            TWO_ROUTE.total_service_km, rel=1e-6
        )
        # but the means now only see the 200 and 250 m segments
        assert capped.segment_weighted_mean_m == pytest.approx(225.0, abs=0.01)
        assert capped.excluded_share["segment"] == pytest.approx(3.0 / 5.0)

    def test_scheme_accepts_string_or_enum(self, two_route_table):
        a = build_weights(two_route_table, "traversal")
        b = build_weights(two_route_table, WeightingScheme.TRAVERSAL)
        assert np.array_equal(a.weights, b.weights)
