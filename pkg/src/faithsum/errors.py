"""Exception types shared across the pipeline."""


class FaithsumError(Exception):
    """Base class for all pipeline errors."""


class ConfigError(FaithsumError):
    """Invalid or incomplete run configuration."""


class DatasetError(FaithsumError):
    """Dataset file missing, unparseable, or violating the manifest."""


class LexiconError(FaithsumError):
    """Gazetteer / negation / stopword resource problem."""


class BackendError(FaithsumError):
    """Generation backend unreachable or persistently failing."""


class GenerationFailed(BackendError):
    """All candidates for one record failed."""


class ScorerError(FaithsumError):
    """Scorer sidecar unreachable or returning an HTTP error."""

    def __init__(self, message: str, status: int | None = None, body: str = ""):
        super().__init__(message)
        self.status = status
        self.body = body[:500]


class ScorerProtocolError(ScorerError):
    """Scorer response violates the wire contract (shape or ranges)."""
