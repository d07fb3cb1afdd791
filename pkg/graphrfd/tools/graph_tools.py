"""
Graph structure tools for the graphrfd MCP server.
"""
import logging
from typing import Any, Dict

from fastmcp import Context, FastMCP

from graphrfd.core.error_handler import GraphRFDError
from graphrfd.core.graph import parse_graph
from graphrfd.reports import analyze_report, decompose_report

logger = logging.getLogger(__name__)


def register_graph_tools(mcp: FastMCP):
    """Register graph analysis tools."""

    @mcp.tool()
    async def analyze_graph(ctx: Context, graph_json: str) -> Dict[str, Any]:
        """
        Sources, cycles, entry verdict and path counts of a graph.

        Args:
            ctx: The MCP context
            graph_json: Graph document {"vertices": [...], "edges": [{"id", "src", "rng"}]}

        Returns:
            Analysis report, or an error document
        """
        logger.debug("analyze_graph called")
        try:
            return analyze_report(parse_graph(graph_json))
        except GraphRFDError as e:
            return e.to_dict()

    @mcp.tool()
    async def decompose_graph(ctx: Context, graph_json: str) -> Dict[str, Any]:
        """
        Split a graph with no entries into its cycles and the remaining forest.

        Args:
            ctx: The MCP context
            graph_json: Graph document

        Returns:
            Decomposition summary with the relation-partition check and amalgam data
        """
        logger.debug("decompose_graph called")
        try:
            return decompose_report(parse_graph(graph_json))
        except GraphRFDError as e:
            return e.to_dict()
