"""
Representation and certificate tools for the graphrfd MCP server.
"""
import json
import logging
from typing import Any, Dict, Optional

from fastmcp import Context, FastMCP

from graphrfd.config import DEFAULT_TRUNCATION, default_zcount
from graphrfd.core.certificate import certificate_to_dict, decide_rfd, verify_certificate as replay_certificate
from graphrfd.core.error_handler import ErrorCode, GraphRFDError, enhance_error
from graphrfd.core.graph import parse_graph
from graphrfd.reports import synthesize_report

logger = logging.getLogger(__name__)


def register_certificate_tools(mcp: FastMCP):
    """Register representation and certificate tools."""

    @mcp.tool()
    async def synthesize_family(
        ctx: Context, graph_json: str, zcount: int = default_zcount(DEFAULT_TRUNCATION),
        include_matrices: bool = False,
    ) -> Dict[str, Any]:
        """
        Build the representation family over zcount roots of unity.

        Args:
            ctx: The MCP context
            graph_json: Graph document with no entries
            zcount: Number of roots of unity
            include_matrices: Also return every matrix as [re, im] pairs

        Returns:
            Dimensions and CK reports per family member
        """
        logger.debug(f"synthesize_family called with zcount={zcount}")
        try:
            return synthesize_report(parse_graph(graph_json), zcount, include_matrices=include_matrices)
        except GraphRFDError as e:
            return e.to_dict()

    @mcp.tool()
    async def certify_graph(
        ctx: Context, graph_json: str, truncation: int = DEFAULT_TRUNCATION,
        zcount: Optional[int] = None, search_min_z: bool = False,
    ) -> Dict[str, Any]:
        """
        Decide RFD and return the certificate.

        Args:
            ctx: The MCP context
            graph_json: Graph document
            truncation: Monomial length bound L
            zcount: Number m of roots of unity (default 2L+1)
            search_min_z: Also report the smallest separating m

        Returns:
            Certificate document
        """
        logger.debug(f"certify_graph called with L={truncation}, m={zcount}")
        try:
            cert = decide_rfd(parse_graph(graph_json), truncation, zcount, search_min_z=search_min_z)
            return certificate_to_dict(cert)
        except GraphRFDError as e:
            return e.to_dict()

    @mcp.tool()
    async def verify_certificate(ctx: Context, graph_json: str, certificate_json: str) -> Dict[str, Any]:
        """
        Replay a certificate against its graph.

        Args:
            ctx: The MCP context
            graph_json: Graph document
            certificate_json: Certificate produced by certify_graph or 'graphrfd certify'

        Returns:
            Verification report with one entry per replayed check
        """
        logger.debug("verify_certificate called")
        try:
            try:
                doc = json.loads(certificate_json)
            except json.JSONDecodeError as e:
                raise enhance_error(ErrorCode.INVALID_CERTIFICATE, f"Certificate is not JSON: {e}") from e
            return replay_certificate(doc, parse_graph(graph_json)).to_dict()
        except GraphRFDError as e:
            return e.to_dict()
