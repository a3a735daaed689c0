"""Exception hierarchy shared across the package."""

from __future__ import annotations


class PersonabotError(Exception):
    """Base class for every error this package raises on purpose."""

    code = "error"


class UnknownRobotError(PersonabotError):
    code = "unknown_robot"


class EmptyValueError(PersonabotError):
    code = "empty_value"


class MissingValenceError(PersonabotError):
    code = "missing_valence"


class SpuriousValenceError(PersonabotError):
    code = "spurious_valence"


class InvalidObservationError(PersonabotError):
    code = "invalid_observation"


class CorruptModelError(PersonabotError):
    code = "corrupt_model"


class MissingTemplateError(PersonabotError):
    code = "missing_template"


class DataFileError(PersonabotError):
    """A data file (personas, knowledge base, script, transcript) fails its schema."""

    code = "data_file"


class SessionClosedError(PersonabotError):
    code = "session_closed"


class SessionConflictError(PersonabotError):
    code = "session_conflict"

    def __init__(self, message: str, session_id: str | None = None):
        super().__init__(message)
        self.session_id = session_id


class UnknownSessionError(PersonabotError):
    code = "unknown_session"


class UnknownUserError(PersonabotError):
    code = "unknown_user"
