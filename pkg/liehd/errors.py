"""
Exception hierarchy for liehd.

Every error carries the CLI exit code it maps to, so command handlers can
translate failures without inspecting messages.
"""

from typing import Any, Dict, Optional

EXIT_OK = 0
EXIT_VERIFICATION = 2
EXIT_INCONSISTENT = 3
EXIT_IO = 4


class WorkbenchError(Exception):
    """Base class for all liehd failures"""

    exit_code: int = EXIT_VERIFICATION

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class AlgebraError(WorkbenchError, ValueError):
    """Malformed algebra data or mismatched ambient algebras"""

    exit_code = EXIT_IO


class PreconditionError(WorkbenchError, ValueError):
    """An operation was called outside its precondition"""

    exit_code = EXIT_VERIFICATION


class VerificationError(WorkbenchError):
    """An identity that must hold exactly failed"""

    exit_code = EXIT_VERIFICATION


class InconsistentSystemError(WorkbenchError):
    """A level system has no solution (the prefix does not extend)"""

    exit_code = EXIT_INCONSISTENT


class ArtifactError(WorkbenchError):
    """An artifact file could not be read, parsed or matched"""

    exit_code = EXIT_IO
