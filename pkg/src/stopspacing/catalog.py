"""Feed catalog client: list providers and download their GTFS zips.

Works against a Mobility-Database-style catalog: a delimited table with one
row per feed carrying the provider name, location columns, and a direct
download URL.  The source can be the live catalog URL or a local snapshot
file; everything else in the package operates on local files only and never
imports this module.
"""

from __future__ import annotations

import csv
import hashlib
import io
import os
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import requests

from .errors import HttpError, MalformedCatalog, NetworkUnavailable, NotAZip

DEFAULT_CATALOG_URL = "https://bit.ly/catalogs-csv"
MANIFEST_NAME = "manifest.csv"

ZIP_MAGIC = b"PK\x03\x04"

# Column aliases, first match wins.  The live catalog uses the dotted names.
_COLUMN_ALIASES = {
    "entry_id": ("mdb_source_id", "id", "source_id"),
    "provider": ("provider", "agency", "agency_name"),
    "country": ("location.country_code", "country_code", "country"),
    "state": ("location.subdivision_name", "subdivision_name", "state"),
    "municipality": ("location.municipality", "municipality", "city"),
    "url": ("urls.direct_download", "direct_download", "urls.latest", "url"),
}


@dataclass(frozen=True)
class CatalogEntry:
    entry_id: str
    provider: str
    country: str = ""
    state: str = ""
    municipality: str = ""
    url: str = ""

    @property
    def downloadable(self) -> bool:
        return bool(self.url)


@dataclass
class DownloadResult:
    entry: CatalogEntry
    path: Path | None = None
    error: Exception | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _retrying_get(
    url: str,
    session: requests.Session,
    retries: int = 3,
    backoff_s: float = 0.5,
    timeout_s: float = 60.0,
    stream: bool = False,
) -> requests.Response:
    """GET with exponential backoff on connection failures and 5xx only."""
    last: Exception | None = None
    status = 0
    for attempt in range(retries):
        if attempt:
            time.sleep(backoff_s * 2 ** (attempt - 1))
        try:
            resp = session.get(url, timeout=timeout_s, stream=stream, allow_redirects=True)
        except requests.RequestException as exc:
            last = exc
            continue
        status = resp.status_code
        if status >= 500:
            resp.close()
            continue
        if status >= 400:
            resp.close()
            raise HttpError(status, url)
        return resp
    if status >= 500:
        raise HttpError(status, url)
    raise NetworkUnavailable(f"could not reach {url} after {retries} attempts") from last


def _pick(fields: dict[str, str], row: dict, key: str) -> str:
    name = fields.get(key)
    return (row.get(name) or "").strip() if name else ""


def fetch_catalog(
    source: str | os.PathLike = DEFAULT_CATALOG_URL,
    session: requests.Session | None = None,
    retries: int = 3,
    backoff_s: float = 0.5,
) -> list[CatalogEntry]:
    """Parse catalog rows from a URL or a local snapshot file.

    Entries without a download URL are kept (their ``downloadable`` property
    is False) so callers can still list them.
    """
    text = _read_source(str(source), session, retries, backoff_s)
    reader = csv.DictReader(io.StringIO(text))
    header = [name.strip() for name in reader.fieldnames or []]
    lowered = {name.lower(): name for name in header}
    fields: dict[str, str] = {}
    for key, aliases in _COLUMN_ALIASES.items():
        for alias in aliases:
            if alias in lowered:
                fields[key] = lowered[alias]
                break
    if "provider" not in fields or "url" not in fields:
        raise MalformedCatalog(
            f"catalog needs provider and download-url columns, got: {header}"
        )
    entries = []
    for i, row in enumerate(reader):
        entry_id = _pick(fields, row, "entry_id") or f"row-{i + 1}"
        entries.append(
            CatalogEntry(
                entry_id=entry_id,
                provider=_pick(fields, row, "provider"),
                country=_pick(fields, row, "country"),
                state=_pick(fields, row, "state"),
                municipality=_pick(fields, row, "municipality"),
                url=_pick(fields, row, "url"),
            )
        )
    return entries


def _read_source(source: str, session, retries: int, backoff_s: float) -> str:
    if source.startswith(("http://", "https://")):
        owned = session is None
        session = session or requests.Session()
        try:
            resp = _retrying_get(source, session, retries=retries, backoff_s=backoff_s)
            resp.encoding = resp.encoding or "utf-8"
            return resp.text
        finally:
            if owned:
                session.close()
    return Path(source).read_text(encoding="utf-8-sig")


def filter_catalog(
    entries: list[CatalogEntry],
    provider: str | None = None,
    country: str | None = None,
    state: str | None = None,
    municipality: str | None = None,
) -> list[CatalogEntry]:
    """Case-insensitive exact match on any combination of location keys."""

    def keep(entry: CatalogEntry) -> bool:
        for want, have in (
            (provider, entry.provider),
            (country, entry.country),
            (state, entry.state),
            (municipality, entry.municipality),
        ):
            if want is not None and have.lower() != want.lower():
                return False
        return True

    return [e for e in entries if keep(e)]


@dataclass
class _Manifest:
    """Download manifest: entry id, URL, sha256, timestamp. One row per id."""

    path: Path
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def record(self, entry_id: str, url: str, checksum: str) -> None:
        with self._lock:
            rows = self._read()
            stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
            rows[entry_id] = (url, checksum, stamp)
            tmp_fd, tmp_name = tempfile.mkstemp(
                dir=self.path.parent, prefix=".manifest-", suffix=".tmp"
            )
            with os.fdopen(tmp_fd, "w", encoding="utf-8", newline="") as handle:
                writer = csv.writer(handle)
                writer.writerow(["id", "url", "checksum", "timestamp"])
                for key in sorted(rows):
                    writer.writerow([key, *rows[key]])
            os.replace(tmp_name, self.path)

    def _read(self) -> dict[str, tuple[str, str, str]]:
        if not self.path.exists():
            return {}
        with open(self.path, encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            return {
                row["id"]: (row["url"], row["checksum"], row["timestamp"])
                for row in reader
            }

    def checksum_of(self, entry_id: str) -> str | None:
        with self._lock:
            row = self._read().get(entry_id)
        return row[1] if row else None


def download_feed(
    entry: CatalogEntry,
    destination: str | os.PathLike,
    session: requests.Session | None = None,
    retries: int = 3,
    backoff_s: float = 0.5,
    timeout_s: float = 120.0,
    manifest: _Manifest | None = None,
) -> Path:
    """Download one feed zip into ``destination`` and record its checksum.

    The payload lands in a temp file that is renamed into place only after
    the zip magic check passes, so a crash or bad payload never leaves a
    partial ``<id>.zip`` behind.
    """
    if not entry.downloadable:
        raise ValueError(f"catalog entry {entry.entry_id} has no download URL")
    dest_dir = Path(destination)
    dest_dir.mkdir(parents=True, exist_ok=True)
    manifest = manifest or _Manifest(dest_dir / MANIFEST_NAME)
    owned = session is None
    session = session or requests.Session()
    try:
        resp = _retrying_get(
            entry.url, session, retries=retries, backoff_s=backoff_s,
            timeout_s=timeout_s, stream=True,
        )
        digest = hashlib.sha256()
        tmp_fd, tmp_name = tempfile.mkstemp(
            dir=dest_dir, prefix=f".{entry.entry_id}-", suffix=".part"
        )
        head = b""
        try:
            with os.fdopen(tmp_fd, "wb") as handle:
                for chunk in resp.iter_content(chunk_size=1 << 16):
                    if not chunk:
                        continue
                    if len(head) < len(ZIP_MAGIC):
                        head += chunk[: len(ZIP_MAGIC) - len(head)]
                    digest.update(chunk)
                    handle.write(chunk)
            if head != ZIP_MAGIC:
                raise NotAZip(f"{entry.url} did not return a zip archive")
            final = dest_dir / f"{entry.entry_id}.zip"
            os.replace(tmp_name, final)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
        finally:
            resp.close()
    finally:
        if owned:
            session.close()
    manifest.record(entry.entry_id, entry.url, digest.hexdigest())
    return final


def download_feeds(
    entries: list[CatalogEntry],
    destination: str | os.PathLike,
    parallelism: int = 4,
    session: requests.Session | None = None,
    retries: int = 3,
    backoff_s: float = 0.5,
) -> list[DownloadResult]:
    """Download several feeds concurrently; manifest writes are serialized."""
    dest_dir = Path(destination)
    dest_dir.mkdir(parents=True, exist_ok=True)
    manifest = _Manifest(dest_dir / MANIFEST_NAME)

    def one(entry: CatalogEntry) -> DownloadResult:
        try:
            path = download_feed(
                entry, dest_dir, session=session, retries=retries,
                backoff_s=backoff_s, manifest=manifest,
            )
            return DownloadResult(entry=entry, path=path)
        except Exception as exc:
            return DownloadResult(entry=entry, error=exc)

    if not entries:
        return []
    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        return list(pool.map(one, entries))
