"""
Fetching feeds from a catalog
=============================

The downloader reads a Mobility-Database-style catalog (live URL or local
snapshot), filters entries by location, and pulls feed zips with retries,
checksums, and a manifest.  To stay self-contained this demo serves a tiny
catalog from a local HTTP server instead of the real one; point
``fetch_catalog()`` at the default URL (or set STOPSPACING_CATALOG) for
live use.
"""

import tempfile
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from stopspacing import download_feeds, fetch_catalog, filter_catalog
from stopspacing.synthetic import build_two_route_feed


class Handler(BaseHTTPRequestHandler):
    def do_GET(self):
        body = self.server.routes.get(self.path)
        self.send_response(200 if body is not None else 404)
        self.end_headers()
        self.wfile.write(body or b"")

    def log_message(self, *args):
        pass


workdir = Path(tempfile.mkdtemp(prefix="stopspacing-demo-"))
feed_bytes = build_two_route_feed(workdir / "two_route.zip").read_bytes()

httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
base = f"http://127.0.0.1:{httpd.server_address[1]}"
httpd.routes = {
    "/springfield.zip": feed_bytes,
    "/shelbyville.zip": feed_bytes,
}
catalog_csv = workdir / "catalog.csv"
catalog_csv.write_text(
    "mdb_source_id,provider,location.country_code,"
    "location.subdivision_name,location.municipality,urls.direct_download\n"
    f"1,Springfield Transit,US,IL,Springfield,{base}/springfield.zip\n"
    f"2,Shelbyville Buses,US,IL,Shelbyville,{base}/shelbyville.zip\n"
    "3,Capital Metro,US,TX,Austin,\n"
)
threading.Thread(target=httpd.serve_forever, daemon=True).start()

try:
    entries = fetch_catalog(catalog_csv)
    print(f"catalog holds {len(entries)} entries:")
    for e in entries:
        note = "" if e.downloadable else "  (no download URL)"
        print(f"  {e.entry_id}: {e.provider} - {e.municipality}, {e.state}{note}")

    illinois = filter_catalog(entries, state="il")  # matching ignores case
    print(f"\n{len(illinois)} entries in Illinois")

    dest = workdir / "feeds"
    results = download_feeds(
        [e for e in illinois if e.downloadable], dest, parallelism=2
    )
    for result in results:
        print(f"downloaded {result.entry.entry_id} -> {result.path}")

    print("\nmanifest:")
    for line in (dest / "manifest.csv").read_text().splitlines():
        print("  " + line[:100])
finally:
    httpd.shutdown()
