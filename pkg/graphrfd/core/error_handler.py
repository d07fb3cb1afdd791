"""
Error handling for graphrfd.

Every failure the toolkit can report carries a distinct error code, a
category used to pick the CLI exit code, and short suggestions so that CLI
and tool-server callers get the same structured error document.
"""
import logging
from enum import Enum
from typing import Any, Dict, List, Optional

from graphrfd.config import ExitCode

logger = logging.getLogger(__name__)


class ErrorCategory(Enum):
    """Categories of errors for tailored responses and exit codes."""
    IO = "io"
    PARSE = "parse"
    VALIDATION = "validation"
    PRECONDITION = "precondition"
    NUMERIC = "numeric"
    CERTIFICATE = "certificate"


class ErrorCode(Enum):
    """One member per named failure of the toolkit operations."""
    MALFORMED_JSON = "MalformedJson"
    DUPLICATE_ID = "DuplicateId"
    DANGLING_ENDPOINT = "DanglingEndpoint"
    EMPTY_GRAPH = "EmptyGraph"
    ENTRY_PRESENT = "EntryPresent"
    TRIVIAL_DECOMPOSITION = "TrivialDecomposition"
    INFINITE_PATH_COUNT = "InfinitePathCount"
    CYCLE_PRESENT = "CyclePresent"
    NOT_UNIT_MODULUS = "NotUnitModulus"
    EMPTY_FAMILY = "EmptyFamily"
    GRAPH_MISMATCH = "GraphMismatch"
    UNKNOWN_GENERATOR = "UnknownGenerator"
    TOO_FEW_POINTS = "TooFewPoints"
    NO_ENTRIES = "NoEntries"
    LAYOUT_MISMATCH = "LayoutMismatch"
    IMPOSSIBLE_CASE = "ImpossibleCase"
    DIGEST_MISMATCH = "DigestMismatch"
    INVALID_CERTIFICATE = "InvalidCertificate"
    INVALID_PARAMETER = "InvalidParameter"
    IO_FAILURE = "IoFailure"
    INEXACT_OBSTRUCTION = "InexactObstruction"


_CATEGORY_BY_CODE = {
    ErrorCode.MALFORMED_JSON: ErrorCategory.PARSE,
    ErrorCode.DUPLICATE_ID: ErrorCategory.PARSE,
    ErrorCode.DANGLING_ENDPOINT: ErrorCategory.PARSE,
    ErrorCode.EMPTY_GRAPH: ErrorCategory.PARSE,
    ErrorCode.ENTRY_PRESENT: ErrorCategory.PRECONDITION,
    ErrorCode.TRIVIAL_DECOMPOSITION: ErrorCategory.PRECONDITION,
    ErrorCode.INFINITE_PATH_COUNT: ErrorCategory.PRECONDITION,
    ErrorCode.CYCLE_PRESENT: ErrorCategory.PRECONDITION,
    ErrorCode.NOT_UNIT_MODULUS: ErrorCategory.NUMERIC,
    ErrorCode.EMPTY_FAMILY: ErrorCategory.PRECONDITION,
    ErrorCode.GRAPH_MISMATCH: ErrorCategory.PRECONDITION,
    ErrorCode.UNKNOWN_GENERATOR: ErrorCategory.VALIDATION,
    ErrorCode.TOO_FEW_POINTS: ErrorCategory.PRECONDITION,
    ErrorCode.NO_ENTRIES: ErrorCategory.PRECONDITION,
    ErrorCode.LAYOUT_MISMATCH: ErrorCategory.PRECONDITION,
    ErrorCode.IMPOSSIBLE_CASE: ErrorCategory.PRECONDITION,
    ErrorCode.DIGEST_MISMATCH: ErrorCategory.CERTIFICATE,
    ErrorCode.INVALID_CERTIFICATE: ErrorCategory.CERTIFICATE,
    ErrorCode.INVALID_PARAMETER: ErrorCategory.VALIDATION,
    ErrorCode.IO_FAILURE: ErrorCategory.IO,
    ErrorCode.INEXACT_OBSTRUCTION: ErrorCategory.NUMERIC,
}

_EXIT_BY_CATEGORY = {
    ErrorCategory.IO: ExitCode.IO,
    ErrorCategory.PARSE: ExitCode.PARSE,
    ErrorCategory.VALIDATION: ExitCode.PRECONDITION,
    ErrorCategory.PRECONDITION: ExitCode.PRECONDITION,
    ErrorCategory.NUMERIC: ExitCode.PRECONDITION,
    ErrorCategory.CERTIFICATE: ExitCode.PARSE,
}

_SUGGESTIONS = {
    ErrorCode.MALFORMED_JSON: [
        'Input must be a JSON object {"vertices": [...], "edges": [{"id", "src", "rng"}]}',
    ],
    ErrorCode.DUPLICATE_ID: ["Vertex ids and edge ids must each be unique"],
    ErrorCode.DANGLING_ENDPOINT: ["Every edge src/rng must be listed under vertices"],
    ErrorCode.EMPTY_GRAPH: ["A graph needs at least one vertex for the unit to exist"],
    ErrorCode.ENTRY_PRESENT: [
        "Run 'graphrfd analyze' to see the entry witness",
        "Use 'graphrfd certify' to get the exact obstruction instead",
    ],
    ErrorCode.TRIVIAL_DECOMPOSITION: [
        "Acyclic and all-cycle graphs are handled by the family dispatcher, not by decompose",
    ],
    ErrorCode.INFINITE_PATH_COUNT: ["n(t) is finite only when no cycle is reachable from t"],
    ErrorCode.TOO_FEW_POINTS: ["Use --zcount of at least 2 * --trunc + 1"],
    ErrorCode.DIGEST_MISMATCH: ["The certificate was produced for a different graph file"],
    ErrorCode.INVALID_PARAMETER: ["Check --trunc, --zcount and tolerance flags"],
    ErrorCode.INEXACT_OBSTRUCTION: ["The trace identity must reduce exactly; report the graph that triggered this"],
}


class GraphRFDError(Exception):
    """Base exception for all toolkit failures."""

    def __init__(
        self,
        code: ErrorCode,
        message: str,
        suggestions: Optional[List[str]] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.code = code
        self.category = _CATEGORY_BY_CODE.get(code, ErrorCategory.VALIDATION)
        self.message = message
        self.suggestions = suggestions if suggestions is not None else list(_SUGGESTIONS.get(code, []))
        self.details = details or {}

    @property
    def exit_code(self) -> ExitCode:
        if self.code == ErrorCode.DIGEST_MISMATCH:
            return ExitCode.DIGEST_MISMATCH
        return _EXIT_BY_CATEGORY[self.category]

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON reports."""
        result = {
            "error": self.message,
            "code": self.code.value,
            "category": self.category.value,
        }
        if self.suggestions:
            result["suggestions"] = self.suggestions
        if self.details:
            result["details"] = self.details
        return result


class GraphParseError(GraphRFDError):
    """Raised when a graph document cannot be turned into a valid Graph."""


class PreconditionError(GraphRFDError):
    """Raised when an operation is called outside its precondition."""


class CertificateError(GraphRFDError):
    """Raised when a certificate document is malformed or does not match its graph."""


def enhance_error(code: ErrorCode, message: str, **details: Any) -> GraphRFDError:
    """Convenience factory picking the exception class for an error code."""
    category = _CATEGORY_BY_CODE.get(code, ErrorCategory.VALIDATION)
    if category == ErrorCategory.PARSE:
        cls = GraphParseError
    elif category == ErrorCategory.CERTIFICATE:
        cls = CertificateError
    elif category in (ErrorCategory.PRECONDITION, ErrorCategory.NUMERIC):
        cls = PreconditionError
    else:
        cls = GraphRFDError
    error = cls(code, message, details=details or None)
    logger.debug(f"{code.value}: {message}")
    return error
