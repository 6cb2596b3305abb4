"""Exception types shared across the package."""


class IftError(Exception):
    """Base class for all package errors."""


class InvalidInputError(IftError):
    """An argument violates a documented precondition."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class NotFoundError(IftError):
    """A referenced id (image, cue, user, session) does not exist."""


class SchemaError(IftError):
    """A manifest or sidecar file violates its schema.

    Collects every violation found so callers can report them all at once.
    """

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class StoreVersionError(IftError):
    """A persisted store was written with an incompatible format version."""

    def __init__(self, found: int, supported: int):
        super().__init__(
            f"store format version {found} is not supported (this build reads version {supported})"
        )
        self.found = found
        self.supported = supported


class UndefinedMetricError(IftError):
    """A metric is undefined for the given inputs (e.g. AUC with one class)."""
