import json

import pytest

from graphrfd import corpus
from graphrfd.core.graph import graph_to_document


@pytest.fixture
def loop_graph():
    return corpus.loop()


@pytest.fixture
def edge_graph():
    return corpus.edge()


@pytest.fixture
def entry_graph():
    return corpus.entry()


@pytest.fixture
def loop_with_exits():
    return corpus.loop_with_exits()


@pytest.fixture
def hexagon_with_exits():
    return corpus.hexagon_with_exits()


@pytest.fixture
def two_cycles():
    return corpus.two_cycles()


@pytest.fixture
def write_graph(tmp_path):
    """Write a Graph to a JSON file and return its path."""
    def _write(g, name="graph.json"):
        path = tmp_path / name
        path.write_text(json.dumps(graph_to_document(g)), encoding="utf-8")
        return path
    return _write
