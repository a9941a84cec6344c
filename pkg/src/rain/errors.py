"""Shared exception types.

Every error the engine can raise maps to exactly one of these classes; the
service layer relies on that mapping to pick HTTP status codes.
"""

from __future__ import annotations


class RainError(Exception):
    """Base class for all engine errors."""

    code = "engine-error"

    def __init__(self, message: str, ids: tuple[str, ...] = ()):
        super().__init__(message)
        self.ids = tuple(ids)


class AmbiguousAliasError(RainError):
    """An entity's aliases intersect two or more distinct existing entities."""

    code = "ambiguous-alias"


class IntegrityError(RainError):
    """A reference to an id that does not exist, or an ill-formed entity."""

    code = "integrity"


class ScaleMismatchError(RainError):
    """Two graphs (or a graph and a policy) disagree on the maturity scale."""

    code = "scale-mismatch"


class UnknownEntityError(RainError):
    """An operation named an id the graph does not contain."""

    code = "unknown-entity"


class PreconditionError(RainError):
    """An engine precondition was violated (e.g. answering an inactive norm)."""

    code = "precondition"


class RevisionConflictError(RainError):
    """Optimistic-concurrency check failed: expected revision is stale."""

    code = "revision-conflict"


class NotFoundError(RainError):
    """The store has no object under the requested id/revision."""

    code = "not-found"


class CorruptionError(RainError):
    """Stored content does not match its recorded digest."""

    code = "corruption"


class BindingError(RainError):
    """A projection query filter names ids absent from the graph."""

    code = "binding"
