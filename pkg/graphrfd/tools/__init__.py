"""
Tool registry for the graphrfd MCP server.

Tools are grouped by category; each category module exposes one
register_* function.
"""
import logging

from fastmcp import FastMCP

from .certificate_tools import register_certificate_tools
from .graph_tools import register_graph_tools

logger = logging.getLogger(__name__)


def register_all_tools(mcp: FastMCP) -> None:
    """
    Register all MCP tools with the FastMCP server.

    Args:
        mcp: The FastMCP server instance
    """
    logger.info("Starting tool registration for graphrfd")
    try:
        logger.debug("Registering graph tools...")
        register_graph_tools(mcp)

        logger.debug("Registering certificate tools...")
        register_certificate_tools(mcp)

        logger.info("Successfully registered all MCP tools")
    except Exception as e:
        logger.error(f"Failed to register tools: {e}")
        raise


TOOL_CATEGORIES = {
    "graph": {
        "tools": ["analyze_graph", "decompose_graph"],
        "description": "Sources, cycles, entries, path counts and the cycle/forest decomposition",
    },
    "certificates": {
        "tools": ["synthesize_family", "certify_graph", "verify_certificate"],
        "description": "Matrix representation families, RFD certificates and their verification",
    },
}


def get_tool_info() -> dict:
    """
    Get information about all available tools.

    Returns:
        Dictionary containing tool categories and descriptions
    """
    return {
        "categories": TOOL_CATEGORIES,
        "total_tools": sum(len(cat["tools"]) for cat in TOOL_CATEGORIES.values()),
    }
