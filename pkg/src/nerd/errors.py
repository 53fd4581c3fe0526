"""Exception types shared across the package."""


class NerdError(Exception):
    """Base class for all package errors."""


class EdgeListError(NerdError):
    """Malformed edge-list input; carries the offending line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class GraphError(NerdError):
    """Graph invariant violation: isolated node, dead end, unknown node id."""


class SizeLimitError(NerdError):
    """Dense computation requested above the configured node limit."""


class SplitError(NerdError):
    """Train/test split construction could not satisfy its constraints."""


class EmbeddingFormatError(NerdError):
    """Embedding files are malformed or inconsistent with each other."""
