"""Exception types raised by the stopspacing library.

Everything inherits from :class:`StopSpacingError` so callers (and the CLI)
can catch domain failures with a single except clause while letting
programming errors propagate.
"""


class StopSpacingError(Exception):
    """Base class for all stopspacing domain errors."""


# --- feed parsing ---------------------------------------------------------

class MissingRequiredFile(StopSpacingError):
    """A required GTFS file (stops, routes, trips, stop_times) is absent."""

    def __init__(self, filename: str):
        self.filename = filename
        super().__init__(f"required GTFS file missing: {filename}")


class MalformedRow(StopSpacingError):
    """More than half the rows of a required GTFS file failed to parse."""


class NoServiceInfo(StopSpacingError):
    """The feed defines no usable service days (no calendar, or no active trips)."""


# --- geometry -------------------------------------------------------------

class InvalidRange(StopSpacingError):
    """Substring bounds outside [0, path length] or reversed."""


# --- statistics -----------------------------------------------------------

class LoadMapMissing(StopSpacingError):
    """Load weighting requested without a load map."""


class AllExcluded(StopSpacingError):
    """The spacing threshold removed every segment."""


class ZeroTotalWeight(StopSpacingError):
    """Weights sum to zero; weighted statistics are undefined."""


class DegenerateData(StopSpacingError):
    """All spacings identical; a density estimate is undefined."""


# --- export ---------------------------------------------------------------

class EmptyTable(StopSpacingError):
    """Refusing to export a table with no rows."""


# --- catalog / download ---------------------------------------------------

class NetworkUnavailable(StopSpacingError):
    """Could not reach the remote host (after retries)."""


class HttpError(StopSpacingError):
    """Non-success HTTP status while fetching a catalog or feed."""

    def __init__(self, status: int, url: str = ""):
        self.status = status
        self.url = url
        super().__init__(f"HTTP {status}" + (f" for {url}" if url else ""))


class NotAZip(StopSpacingError):
    """Downloaded payload is not a zip archive."""


class MalformedCatalog(StopSpacingError):
    """Catalog source lacks the columns needed to build entries."""
