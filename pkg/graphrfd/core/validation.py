"""
Input validation for graph documents and family parameters.

Checks return (is_valid, error) tuples so that callers can decide whether to
raise, log or report; parse_graph turns failures into GraphParseError.
"""
import logging
from typing import Any, Optional, Tuple

from graphrfd.config import ToleranceConfig, default_zcount
from graphrfd.core.error_handler import ErrorCode

logger = logging.getLogger(__name__)

# Maximum number of vertices/edges accepted from a single document
MAX_GRAPH_ITEMS = 10000

ValidationResult = Tuple[bool, Optional[ErrorCode], Optional[str]]


def _is_identifier(value: Any) -> bool:
    return isinstance(value, str) and value != ""


def validate_graph_document(doc: Any) -> ValidationResult:
    """
    Validate the decoded JSON of a graph document.

    Args:
        doc: Result of json.loads on the input text

    Returns:
        Tuple of (is_valid, error_code, error_message); code and message are
        None when the document is valid
    """
    if not isinstance(doc, dict):
        return False, ErrorCode.MALFORMED_JSON, "Top-level JSON value must be an object"

    vertices = doc.get("vertices")
    edges = doc.get("edges", [])
    if not isinstance(vertices, list):
        return False, ErrorCode.MALFORMED_JSON, "'vertices' must be a list of ids"
    if not isinstance(edges, list):
        return False, ErrorCode.MALFORMED_JSON, "'edges' must be a list of edge records"
    if len(vertices) + len(edges) > MAX_GRAPH_ITEMS:
        return False, ErrorCode.MALFORMED_JSON, f"Graph too large (max {MAX_GRAPH_ITEMS} items)"
    if not vertices:
        return False, ErrorCode.EMPTY_GRAPH, "Graph has no vertices"

    seen_vertices = set()
    for vertex in vertices:
        if not _is_identifier(vertex):
            return False, ErrorCode.MALFORMED_JSON, f"Vertex id must be a non-empty string, got {vertex!r}"
        if vertex in seen_vertices:
            return False, ErrorCode.DUPLICATE_ID, f"Duplicate vertex id '{vertex}'"
        seen_vertices.add(vertex)

    seen_edges = set()
    for record in edges:
        if not isinstance(record, dict) or not all(key in record for key in ("id", "src", "rng")):
            return False, ErrorCode.MALFORMED_JSON, f"Edge record must have id, src and rng: {record!r}"
        edge_id, src, rng = record["id"], record["src"], record["rng"]
        if not all(_is_identifier(v) for v in (edge_id, src, rng)):
            return False, ErrorCode.MALFORMED_JSON, f"Edge fields must be non-empty strings: {record!r}"
        if edge_id in seen_edges:
            return False, ErrorCode.DUPLICATE_ID, f"Duplicate edge id '{edge_id}'"
        seen_edges.add(edge_id)
        for endpoint in (src, rng):
            if endpoint not in seen_vertices:
                return False, ErrorCode.DANGLING_ENDPOINT, (
                    f"Edge '{edge_id}' has endpoint '{endpoint}' that is not a vertex"
                )

    return True, None, None


def validate_family_parameters(truncation: int, zcount: int) -> Tuple[bool, Optional[str]]:
    """
    Validate the truncation bound L and the z-count m.

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not isinstance(truncation, int) or truncation < 0:
        return False, f"Truncation L must be a non-negative integer, got {truncation!r}"
    if not isinstance(zcount, int) or zcount < 1:
        return False, f"z-count m must be a positive integer, got {zcount!r}"
    needed = default_zcount(truncation)
    if zcount < needed:
        return False, f"z-count m = {zcount} is below 2L+1 = {needed} for L = {truncation}"
    return True, None


def validate_tolerances(tolerances: ToleranceConfig) -> Tuple[bool, Optional[str]]:
    """Check that every tolerance is a positive finite number."""
    for name, value in tolerances.to_dict().items():
        if not (value > 0 and value != float("inf")):
            return False, f"Tolerance '{name}' must be positive, got {value!r}"
    return True, None
