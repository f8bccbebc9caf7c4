"""Shared error hierarchy.

Every failure a caller can act on carries a stable machine-readable
``code``. The HTTP layer maps exception classes to statuses in one
table, so codes stay unique per (status, endpoint) pair.
"""

from __future__ import annotations


class DomainError(Exception):
    """Base class for all service errors."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"{type(self).__name__}(code={self.code!r}, message={self.message!r})"


class ValidationError(DomainError):
    """Malformed, missing, or out-of-range input."""


class AuthError(DomainError):
    """Credential or session failure."""


class PermissionDenied(DomainError):
    """Authenticated caller is not allowed to perform the operation."""


class NotFoundError(DomainError):
    """Referenced entity does not exist."""


class ConflictError(DomainError):
    """Operation collides with existing state (uniqueness, lifecycle)."""


class ConstraintError(ConflictError):
    """A storage uniqueness or foreign-key constraint fired."""

    def __init__(self, constraint: str):
        super().__init__("constraint", f"constraint violated: {constraint}")
        self.constraint = constraint


class UnavailableError(DomainError):
    """Backend (storage or network) unreachable; retry later."""


class EstimationError(DomainError):
    """Position estimation cannot proceed with the given inputs."""
