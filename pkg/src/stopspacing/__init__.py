"""Bus stop spacing statistics from GTFS feeds.

Pipeline: parse a feed, pick its busiest service day, cut each bus trip's
shape into inter-stop segments, then weight segment spacings (by segment,
route, traversal, or passenger load) to get means, distributions, and an
alternative signals-per-segment metric.  Everything works offline; the
catalog client is the only module that touches the network.
"""

from .errors import (
    AllExcluded,
    DegenerateData,
    EmptyTable,
    HttpError,
    InvalidRange,
    LoadMapMissing,
    MalformedCatalog,
    MalformedRow,
    MissingRequiredFile,
    NetworkUnavailable,
    NoServiceInfo,
    NotAZip,
    StopSpacingError,
    ZeroTotalWeight,
)
from .geometry import (
    EARTH_RADIUS_M,
    METERS_PER_DEGREE,
    GeoPoint,
    Path,
    great_circle_distance,
    path_length,
    point_to_path_distance,
    project_point_onto_path,
    substring_path,
)
from .feed import (
    BUS_ROUTE_TYPES,
    FeedBundle,
    Route,
    Stop,
    StopTime,
    Trip,
    parse_feed,
    validate_feed,
)
from .service_calendar import busiest_day, day_service_count, trip_departures
from .segments import Segment, SegmentRow, SegmentTable, extract_segments
from .stats import (
    DEFAULT_THRESHOLD_M,
    SpacingSummary,
    WeightedSpacings,
    WeightingScheme,
    build_weights,
    ecdf_evaluate,
    histogram,
    kde,
    read_load_map,
    summarize,
    weighted_ecdf,
    weighted_mean,
)
from .signals import (
    DEFAULT_BUFFER_M,
    GeometricFit,
    SignalCountTable,
    SignalSet,
    count_weight_shares,
    fit_geometric_mle,
    signals_per_segment,
)
from .catalog import (
    CatalogEntry,
    DownloadResult,
    download_feed,
    download_feeds,
    fetch_catalog,
    filter_catalog,
)
from .export import (
    export_segments,
    export_segments_csv,
    export_segments_geojson,
    write_ecdf,
    write_histogram,
    write_kde,
    write_signal_counts,
    write_signal_fit,
    write_summary,
)

__version__ = "0.1.0"

__all__ = [
    "AllExcluded",
    "BUS_ROUTE_TYPES",
    "CatalogEntry",
    "DEFAULT_BUFFER_M",
    "DEFAULT_THRESHOLD_M",
    "DegenerateData",
    "DownloadResult",
    "EARTH_RADIUS_M",
    "EmptyTable",
    "FeedBundle",
    "GeoPoint",
    "GeometricFit",
    "HttpError",
    "InvalidRange",
    "LoadMapMissing",
    "MalformedCatalog",
    "MalformedRow",
    "METERS_PER_DEGREE",
    "MissingRequiredFile",
    "NetworkUnavailable",
    "NoServiceInfo",
    "NotAZip",
    "Path",
    "Route",
    "Segment",
    "SegmentRow",
    "SegmentTable",
    "SignalCountTable",
    "SignalSet",
    "SpacingSummary",
    "Stop",
    "StopSpacingError",
    "StopTime",
    "Trip",
    "WeightedSpacings",
    "WeightingScheme",
    "ZeroTotalWeight",
    "build_weights",
    "busiest_day",
    "count_weight_shares",
    "day_service_count",
    "download_feed",
    "download_feeds",
    "ecdf_evaluate",
    "export_segments",
    "export_segments_csv",
    "export_segments_geojson",
    "extract_segments",
    "fetch_catalog",
    "filter_catalog",
    "fit_geometric_mle",
    "great_circle_distance",
    "histogram",
    "kde",
    "parse_feed",
    "path_length",
    "point_to_path_distance",
    "project_point_onto_path",
    "read_load_map",
    "signals_per_segment",
    "substring_path",
    "summarize",
    "trip_departures",
    "validate_feed",
    "weighted_ecdf",
    "weighted_mean",
    "write_ecdf",
    "write_histogram",
    "write_kde",
    "write_signal_counts",
    "write_signal_fit",
    "write_summary",
]
