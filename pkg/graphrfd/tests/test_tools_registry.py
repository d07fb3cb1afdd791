import json

from graphrfd import corpus
from graphrfd.core.graph import serialize_graph
from graphrfd.tools import get_tool_info, register_all_tools


class RecordingMCP:
    """Stand-in server that keeps the registered coroutine functions by name."""

    def __init__(self):
        self.tools = {}

    def tool(self):
        def decorator(fn):
            self.tools[fn.__name__] = fn
            return fn
        return decorator


def _registered():
    mcp = RecordingMCP()
    register_all_tools(mcp)
    return mcp.tools


def test_get_tool_info_counts_and_categories():
    info = get_tool_info()
    assert "categories" in info
    assert "total_tools" in info
    assert len(info["categories"]) == 2
    assert info["total_tools"] == sum(len(cat["tools"]) for cat in info["categories"].values())
    assert info["total_tools"] == 5


def test_registered_names_match_categories():
    names = {tool for cat in get_tool_info()["categories"].values() for tool in cat["tools"]}
    assert set(_registered()) == names


async def test_certify_then_verify_through_tools(mocker):
    tools = _registered()
    ctx = mocker.Mock()
    graph_json = serialize_graph(corpus.loop_with_exits())
    cert = await tools["certify_graph"](ctx, graph_json, truncation=1)
    assert cert["verdict"] == "RFD"
    report = await tools["verify_certificate"](ctx, graph_json, json.dumps(cert))
    assert report["passed"] is True


async def test_tool_errors_are_documents(mocker):
    tools = _registered()
    result = await tools["analyze_graph"](mocker.Mock(), "{not json")
    assert result["code"] == "MalformedJson"
    result = await tools["decompose_graph"](mocker.Mock(), serialize_graph(corpus.entry()))
    assert result["code"] == "EntryPresent"
