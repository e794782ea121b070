"""Custom exception definitions."""


class ChargePlanError(Exception):
    """Base exception for all chargeplan errors."""

    exit_code = 2
    code_name = 'error'


class ConfigurationError(ChargePlanError):
    """Exception for when the run configuration or settings file is invalid."""

    exit_code = 2
    code_name = 'configuration'


class GraphFormatError(ChargePlanError):
    """
    Exception for when a node or edge table can not be ingested.

    :param message: Human readable description of the problem.
    :param row: One-based row number (header is row 1) of the offending row.
    """

    exit_code = 4
    code_name = 'graph-format'

    def __init__(self, message: str, row: int = 0) -> None:
        """Construct exception, prefixing the row number when known."""
        self.row = row
        if row:
            message = f'row {row}: {message}'
        super().__init__(message)


class InvalidVertexError(ChargePlanError):
    """Exception for when a vertex id is not part of the graph."""

    exit_code = 5
    code_name = 'invalid-vertex'


class PreconditionError(ChargePlanError):
    """Exception for when an operation is called outside its preconditions."""

    exit_code = 6
    code_name = 'precondition'


class NotDominatingError(PreconditionError):
    """Exception for when a vertex set is required to be k-dominating."""

    exit_code = 7
    code_name = 'not-dominating'


class OracleLimitError(PreconditionError):
    """Exception for when the exact enumeration oracle gives up."""

    exit_code = 8
    code_name = 'oracle-limit'


class FingerprintMismatchError(ChargePlanError):
    """Exception for when an artifact was computed on another graph."""

    exit_code = 9
    code_name = 'fingerprint-mismatch'
