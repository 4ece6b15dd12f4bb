"""Exception types raised across the pipeline."""


class LitmapError(Exception):
    """Base class for all litmap errors."""


# --- corpus store ---------------------------------------------------------

class EmptyTitle(LitmapError):
    """A document with a blank title was offered to the store."""


class IoFailure(LitmapError):
    """Reading or writing a data file failed at the OS level."""


class MalformedRecord(LitmapError):
    """A persisted line could not be decoded into a document.

    Carries the 1-based line number of the offending record.
    """

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


# --- ingestion ------------------------------------------------------------

class NetworkFailure(LitmapError):
    """The archive API could not be reached; retryable."""


class RateLimited(LitmapError):
    """The archive API asked us to back off."""


class MalformedFeed(LitmapError):
    """The listing feed could not be parsed.

    ``offset`` is the approximate byte offset of the problem, when known.
    """

    def __init__(self, reason: str, offset: int | None = None):
        at = f" (byte offset {offset})" if offset is not None else ""
        super().__init__(f"{reason}{at}")
        self.offset = offset


class MissingText(LitmapError):
    """A document has neither an abstract nor body text to embed."""


# --- embedding ------------------------------------------------------------

class EmptyInput(LitmapError):
    """Empty text was offered to an embedding provider."""


class ProviderUnavailable(LitmapError):
    """The remote embedding endpoint could not be reached."""


class BadDimension(LitmapError):
    """A provider returned a vector of the wrong length."""


# --- dimensionality reduction ---------------------------------------------

class TooFewPoints(LitmapError):
    """Not enough points for the requested neighbourhood size."""


# --- clustering -----------------------------------------------------------

class KTooLarge(LitmapError):
    """More clusters requested than points available."""


# --- analytics ------------------------------------------------------------

class ZeroMean(LitmapError):
    """Inequality of an all-zero count vector is undefined."""


class Unclustered(LitmapError):
    """A per-cluster report was requested before labels were assigned."""


# --- classification -------------------------------------------------------

class ClassTooSmall(LitmapError):
    """A class has too few members to split."""


class DegenerateInput(LitmapError):
    """Training vectors contain non-finite values."""


class OneClassOnly(LitmapError):
    """Ranking quality is undefined when only one label is present."""


# --- service --------------------------------------------------------------

class NotReady(LitmapError):
    """A served artifact (projection, ...) has not been computed yet."""


class UnknownDocument(LitmapError):
    """A query referenced a document id that is not in the corpus."""


class EmptyQuery(LitmapError):
    """A text search was issued with no query text."""


class NoModel(LitmapError):
    """The feed was requested but no trained model is loaded."""


class UnknownReport(LitmapError):
    """An unrecognized statistics report name was requested."""
