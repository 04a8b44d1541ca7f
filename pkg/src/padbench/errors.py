"""Exception types shared across the package.

Everything raised on a bad input or a failed computation derives from
:class:`PadbenchError` so callers (CLI, HTTP service) can map domain errors
to exit code 2 / HTTP 400 in one place.
"""

from __future__ import annotations


class PadbenchError(Exception):
    """Base class for all domain errors raised by this package."""


class ManifestError(PadbenchError):
    """Invalid manifest document; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmbeddingFormatError(PadbenchError):
    """Malformed or inconsistent embedding file."""


class AlignmentError(PadbenchError):
    """Embedding matrix does not cover the requested sample ids."""

    def __init__(self, missing_ids: list[str]):
        self.missing_ids = list(missing_ids)
        ids = ", ".join(self.missing_ids)
        super().__init__(f"embedding matrix is missing {len(self.missing_ids)} sample id(s): {ids}")


class SvmError(PadbenchError):
    """Invalid training/scoring input (single class, dimension mismatch, ...)."""


class ProtocolError(PadbenchError):
    """Leave-one-out protocol cannot be built from the given manifest."""


class MetricsError(PadbenchError):
    """Score set unusable for error-rate computation (e.g. an empty class)."""


class ReportError(PadbenchError):
    """Benchmark orchestration failure (missing inputs, malformed report)."""
