"""Exception hierarchy shared by all stages."""


class XlragError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(XlragError):
    """A domain value violates its invariants."""


class ContractViolation(XlragError):
    """An operation was called in a state its contract forbids."""


class MetricError(XlragError):
    """Metric inputs are unusable (e.g. empty gold answer)."""


class IngestError(XlragError):
    """A corpus or benchmark file could not be loaded."""


class BackendError(XlragError):
    """Transport to a model backend failed after all retries."""

    def __init__(self, message: str, *, endpoint: str = "", attempts: int = 0):
        super().__init__(message)
        self.endpoint = endpoint
        self.attempts = attempts


class ProtocolError(XlragError):
    """A backend answered, but the response violates the wire contract."""


class ScoreParseError(XlragError):
    """Judge output did not contain a usable score object."""


class ScoreRangeError(XlragError):
    """A judge score fell outside the allowed 0.0-5.0 range."""


class DetectionError(XlragError):
    """Language detection had nothing to work with."""


class ConfigError(XlragError):
    """Missing or inconsistent configuration (templates, endpoints, paths)."""


class GenerationError(XlragError):
    """The generation stage could not assemble or obtain an answer."""


class SchemaError(XlragError):
    """A persisted artifact does not match the expected schema version."""
