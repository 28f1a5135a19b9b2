"""Command-line front end.

Subcommands: segments, summary, ecdf, hist, kde, signals, download.  Every
subcommand is a thin wrapper over library calls; no analysis logic lives
here.  Exit codes: 0 success, 1 domain error (message on stderr), 2 usage
error (argparse).
"""

from __future__ import annotations

import argparse
import datetime as dt
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import catalog as catalog_mod
from . import export
from .errors import StopSpacingError
from .feed import parse_feed
from .segments import SegmentTable, extract_segments
from .service_calendar import busiest_day
from .signals import (
    DEFAULT_BUFFER_M,
    SignalSet,
    count_weight_shares,
    fit_geometric_mle,
    signals_per_segment,
)
from .stats import (
    DEFAULT_THRESHOLD_M,
    WeightingScheme,
    build_weights,
    histogram,
    kde,
    read_load_map,
    summarize,
    weighted_ecdf,
)

CATALOG_ENV_VAR = "STOPSPACING_CATALOG"


def _positive(value: str) -> float:
    number = float(value)
    if number <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return number


def _parse_date(value: str) -> dt.date:
    if len(value) == 8 and value.isdigit():
        return dt.date(int(value[:4]), int(value[4:6]), int(value[6:8]))
    return dt.date.fromisoformat(value)


def _add_feed_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--gtfs", required=True, nargs="+", metavar="PATH",
        help="GTFS feed zip(s) or directory(ies)",
    )
    parser.add_argument(
        "--date", type=_parse_date, default=None,
        help="measurement date (YYYY-MM-DD); default: busiest service day",
    )


def _add_weight_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--scheme", choices=[s.value for s in WeightingScheme], default="traversal",
        help="weighting scheme (default: traversal)",
    )
    parser.add_argument(
        "--threshold", type=_positive, default=DEFAULT_THRESHOLD_M, metavar="M",
        help="exclude segments longer than this many meters (default: 3000)",
    )
    parser.add_argument(
        "--no-threshold", action="store_true",
        help="keep all segments regardless of length",
    )
    parser.add_argument(
        "--loads", metavar="PATH", default=None,
        help="load map file (stop_id1,stop_id2,avg_load) for load weighting",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stopspacing",
        description="Bus stop spacing statistics from GTFS feeds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_seg = sub.add_parser("segments", help="extract the segment table")
    _add_feed_options(p_seg)
    p_seg.add_argument("--out", required=True, metavar="DIR")
    p_seg.add_argument(
        "--format", choices=["csv", "geojson", "both"], default="both",
    )
    p_seg.set_defaults(func=_cmd_segments)

    p_sum = sub.add_parser("summary", help="weighted spacing means and counts")
    _add_feed_options(p_sum)
    _add_weight_options(p_sum)
    p_sum.add_argument("--out", default=None, metavar="DIR",
                       help="also write summary.csv per feed")
    p_sum.set_defaults(func=_cmd_summary)

    p_ecdf = sub.add_parser("ecdf", help="weighted cumulative distribution")
    _add_feed_options(p_ecdf)
    _add_weight_options(p_ecdf)
    p_ecdf.add_argument("--out", required=True, metavar="DIR")
    p_ecdf.add_argument("--plot", action="store_true", help="also render a PNG")
    p_ecdf.set_defaults(func=_cmd_ecdf)

    p_hist = sub.add_parser("hist", help="weighted spacing histogram")
    _add_feed_options(p_hist)
    _add_weight_options(p_hist)
    p_hist.add_argument("--bin-width", type=_positive, default=50.0, metavar="M")
    p_hist.add_argument("--out", required=True, metavar="DIR")
    p_hist.add_argument("--plot", action="store_true", help="also render a PNG")
    p_hist.set_defaults(func=_cmd_hist)

    p_kde = sub.add_parser("kde", help="weighted kernel density estimate")
    _add_feed_options(p_kde)
    _add_weight_options(p_kde)
    p_kde.add_argument("--grid-points", type=int, default=512)
    p_kde.add_argument("--out", required=True, metavar="DIR")
    p_kde.add_argument("--plot", action="store_true", help="also render a PNG")
    p_kde.set_defaults(func=_cmd_kde)

    p_sig = sub.add_parser("signals", help="signals-per-segment counts and fit")
    _add_feed_options(p_sig)
    _add_weight_options(p_sig)
    p_sig.add_argument(
        "--signals", required=True, metavar="PATH",
        help="signal coordinates file with lat,lon columns",
    )
    p_sig.add_argument("--buffer", type=_positive, default=DEFAULT_BUFFER_M,
                       metavar="M", help="count signals within this distance (default: 5.5)")
    p_sig.add_argument("--out", required=True, metavar="DIR")
    p_sig.set_defaults(func=_cmd_signals)

    p_dl = sub.add_parser("download", help="fetch feeds from the catalog")
    p_dl.add_argument(
        "--catalog", default=None, metavar="URL_OR_PATH",
        help=f"catalog source (default: ${CATALOG_ENV_VAR} or the live catalog)",
    )
    p_dl.add_argument("--provider", default=None)
    p_dl.add_argument("--country", default=None)
    p_dl.add_argument("--state", default=None)
    p_dl.add_argument("--municipality", default=None)
    p_dl.add_argument("--list", action="store_true",
                      help="list matching entries without downloading")
    p_dl.add_argument("--dest", default=None, metavar="DIR")
    p_dl.add_argument("--limit", type=int, default=None,
                      help="download at most this many feeds")
    p_dl.add_argument("--parallelism", type=int, default=4)
    p_dl.set_defaults(func=_cmd_download)

    return parser


def _threshold(args) -> float | None:
    return None if args.no_threshold else args.threshold


def _loads(args):
    return read_load_map(args.loads) if args.loads else None


def _feed_out_dirs(args) -> list[Path]:
    """One output directory per input feed, deduplicated by stem."""
    out = Path(args.out)
    seen: dict[str, int] = {}
    dirs = []
    for raw in args.gtfs:
        stem = Path(raw).stem if Path(raw).suffix else Path(raw).name
        seen[stem] = seen.get(stem, 0) + 1
        if seen[stem] > 1:
            stem = f"{stem}-{seen[stem]}"
        dirs.append(out / stem)
    return dirs


def _load_table(gtfs_path: str, date: dt.date | None) -> SegmentTable:
    feed = parse_feed(gtfs_path)
    day = date if date is not None else busiest_day(feed)[0]
    return extract_segments(feed, day)


def _for_each_feed(args, worker) -> int:
    """Run ``worker(gtfs_path, out_dir)`` per feed, concurrently, in order.

    Collects each feed's output lines and prints them in input order so runs
    are reproducible regardless of scheduling.
    """
    out_dirs = _feed_out_dirs(args) if getattr(args, "out", None) else [None] * len(args.gtfs)

    def run(pair):
        path, out_dir = pair
        try:
            return worker(path, out_dir), None
        except Exception as exc:  # reported per feed, then aggregated
            return None, exc

    pairs = list(zip(args.gtfs, out_dirs))
    if len(pairs) == 1:
        results = [run(pairs[0])]
    else:
        with ThreadPoolExecutor(max_workers=min(4, len(pairs))) as pool:
            results = list(pool.map(run, pairs))

    failed = False
    for (path, _), (lines, error) in zip(pairs, results):
        if error is not None:
            failed = True
            print(f"error: {path}: {error}", file=sys.stderr)
        else:
            for line in lines:
                print(line)
    return 1 if failed else 0


def _cmd_segments(args) -> int:
    def worker(path, out_dir):
        table = _load_table(path, args.date)
        out_dir.mkdir(parents=True, exist_ok=True)
        lines = [f"{table.feed_id}: {table.n_rows} rows, "
                 f"{len(table.unique_segments())} segments, "
                 f"measurement day {table.measurement_date.isoformat()}"]
        if args.format in ("csv", "both"):
            written = export.export_segments_csv(table, out_dir / "segments.csv")
            lines.append(f"wrote {written}")
        if args.format in ("geojson", "both"):
            written = export.export_segments_geojson(table, out_dir / "segments.geojson")
            lines.append(f"wrote {written}")
        return lines

    return _for_each_feed(args, worker)


def _cmd_summary(args) -> int:
    loads = _loads(args)

    def worker(path, out_dir):
        table = _load_table(path, args.date)
        summary = summarize(table, threshold_m=_threshold(args), loads=loads)
        lines = [
            f"feed: {summary.feed_id}",
            f"busiest day: {summary.busiest_day.isoformat()}",
            f"segment-weighted mean: {summary.segment_weighted_mean_m:.6f} m",
            f"route-weighted mean: {summary.route_weighted_mean_m:.6f} m",
            f"traversal-weighted mean: {summary.traversal_weighted_mean_m:.6f} m",
        ]
        if summary.load_weighted_mean_m is not None:
            lines.append(f"load-weighted mean: {summary.load_weighted_mean_m:.6f} m")
        lines.append(
            f"routes: {summary.n_routes}  segments: {summary.n_segments}  "
            f"rows: {summary.n_rows}  traversals: {summary.n_traversals}"
        )
        lines.append(f"total service: {summary.total_service_km:.3f} km")
        if summary.threshold_m is not None:
            shares = "  ".join(
                f"{scheme}={share:.6f}"
                for scheme, share in sorted(summary.excluded_share.items())
            )
            lines.append(f"threshold: {summary.threshold_m:.0f} m  excluded share: {shares}")
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
            written = export.write_summary(summary, out_dir / "summary.csv")
            lines.append(f"wrote {written}")
        return lines

    return _for_each_feed(args, worker)


def _build_ws(args, table):
    return build_weights(
        table, args.scheme, threshold_m=_threshold(args), loads=_loads(args)
    )


def _cmd_ecdf(args) -> int:
    def worker(path, out_dir):
        table = _load_table(path, args.date)
        points = weighted_ecdf(_build_ws(args, table))
        out_dir.mkdir(parents=True, exist_ok=True)
        written = export.write_ecdf(points, out_dir / f"ecdf_{args.scheme}.csv")
        lines = [f"wrote {written}"]
        if args.plot:
            lines.append(f"wrote {_plot_ecdf(points, out_dir / f'ecdf_{args.scheme}.png')}")
        return lines

    return _for_each_feed(args, worker)


def _cmd_hist(args) -> int:
    def worker(path, out_dir):
        table = _load_table(path, args.date)
        bins = histogram(_build_ws(args, table), bin_width_m=args.bin_width)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = export.write_histogram(bins, out_dir / f"hist_{args.scheme}.csv")
        lines = [f"wrote {written}"]
        if args.plot:
            lines.append(f"wrote {_plot_hist(bins, out_dir / f'hist_{args.scheme}.png')}")
        return lines

    return _for_each_feed(args, worker)


def _cmd_kde(args) -> int:
    def worker(path, out_dir):
        table = _load_table(path, args.date)
        points = kde(_build_ws(args, table), grid_points=args.grid_points)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = export.write_kde(points, out_dir / f"kde_{args.scheme}.csv")
        lines = [f"wrote {written}"]
        if args.plot:
            lines.append(f"wrote {_plot_kde(points, out_dir / f'kde_{args.scheme}.png')}")
        return lines

    return _for_each_feed(args, worker)


def _cmd_signals(args) -> int:
    signal_set = SignalSet.read(args.signals)
    loads = _loads(args)

    def worker(path, out_dir):
        table = _load_table(path, args.date)
        counts = signals_per_segment(table, signal_set, buffer_m=args.buffer)
        fit = fit_geometric_mle(counts, scheme=args.scheme, loads=loads)
        shares = count_weight_shares(counts, scheme=args.scheme, loads=loads)
        out_dir.mkdir(parents=True, exist_ok=True)
        lines = [
            f"{table.feed_id}: weighted mean {fit.weighted_mean_count:.6f} "
            f"signals/segment, geometric p = {fit.p_hat:.6f}",
            f"wrote {export.write_signal_counts(counts, out_dir / 'signal_counts.csv')}",
            f"wrote {export.write_signal_fit(fit, shares, out_dir / 'signal_fit.csv')}",
        ]
        return lines

    return _for_each_feed(args, worker)


def _cmd_download(args) -> int:
    source = args.catalog or os.environ.get(CATALOG_ENV_VAR) or catalog_mod.DEFAULT_CATALOG_URL
    entries = catalog_mod.fetch_catalog(source)
    entries = catalog_mod.filter_catalog(
        entries,
        provider=args.provider,
        country=args.country,
        state=args.state,
        municipality=args.municipality,
    )
    if args.list:
        for entry in entries:
            mark = "" if entry.downloadable else "  [no download URL]"
            where = ", ".join(x for x in (entry.municipality, entry.state, entry.country) if x)
            print(f"{entry.entry_id}\t{entry.provider}\t{where}{mark}")
        print(f"{len(entries)} entries")
        return 0
    if args.dest is None:
        print("error: --dest is required unless --list is given", file=sys.stderr)
        return 1
    downloadable = [e for e in entries if e.downloadable]
    skipped = len(entries) - len(downloadable)
    if args.limit is not None:
        downloadable = downloadable[: args.limit]
    if not downloadable:
        print("no downloadable entries matched", file=sys.stderr)
        return 1
    results = catalog_mod.download_feeds(
        downloadable, args.dest, parallelism=args.parallelism
    )
    failed = False
    for result in results:
        if result.ok:
            print(f"downloaded {result.entry.entry_id} -> {result.path}")
        else:
            failed = True
            print(f"error: {result.entry.entry_id}: {result.error}", file=sys.stderr)
    if skipped:
        print(f"skipped {skipped} entries without download URLs")
    return 1 if failed else 0


def _plot_backend():
    try:
        import matplotlib
    except ImportError as exc:
        raise StopSpacingError(
            "plotting requires matplotlib (pip install stopspacing[plots])"
        ) from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _plot_ecdf(points, path):
    plt = _plot_backend()
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    ax.step(xs, ys, where="post")
    ax.set_xlabel("spacing (m)")
    ax.set_ylabel("cumulative weight share")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def _plot_hist(bins, path):
    plt = _plot_backend()
    fig, ax = plt.subplots(figsize=(6, 4))
    lefts = [b[0] for b in bins]
    widths = [b[1] - b[0] for b in bins]
    ax.bar(lefts, [b[2] for b in bins], width=widths, align="edge", edgecolor="white")
    ax.set_xlabel("spacing (m)")
    ax.set_ylabel("weight share")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def _plot_kde(points, path):
    plt = _plot_backend()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([p[0] for p in points], [p[1] for p in points])
    ax.set_xlabel("spacing (m)")
    ax.set_ylabel("density (1/m)")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return args.func(args)
    except StopSpacingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
