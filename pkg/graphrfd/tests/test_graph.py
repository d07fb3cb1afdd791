import itertools
import json
import random

import pytest

from graphrfd.core.error_handler import ErrorCode, GraphParseError, PreconditionError
from graphrfd.core.graph import (
    CaseFlag, Decomposition, Edge, Graph, Path, ck_relation_descriptors, count_paths_from, cycle_vertices,
    decompose, entry_oracle, enumerate_paths_from, find_cycles, graph_digest, host_cycle, longest_path_length,
    no_cycle_has_entry, parse_graph, path_count_table, relation_partition_check, serialize_graph,
    simple_cycles_oracle, sources, subgraph,
)
from graphrfd.corpus import random_graph, random_no_entry_graph

LOOP_JSON = '{"vertices":["v"],"edges":[{"id":"e","src":"v","rng":"v"}]}'
EDGE_JSON = '{"vertices":["v","w"],"edges":[{"id":"e","src":"v","rng":"w"}]}'


def _all_digraphs(n):
    """Every simple digraph with loops on n vertices."""
    vertices = [f"v{i}" for i in range(n)]
    arcs = list(itertools.product(vertices, repeat=2))
    for mask in range(1 << len(arcs)):
        edges = [Edge(f"e{i}", s, r) for i, (s, r) in enumerate(arcs) if mask >> i & 1]
        yield Graph.build(vertices, edges)


def _digraphs_with_edges(n, edge_count):
    """Every simple digraph with loops on n vertices and exactly edge_count arcs."""
    vertices = [f"v{i}" for i in range(n)]
    arcs = list(itertools.product(vertices, repeat=2))
    for chosen in itertools.combinations(arcs, edge_count):
        yield Graph.build(vertices, [Edge(f"e{i}", s, r) for i, (s, r) in enumerate(chosen)])


class TestParsing:
    def test_parse_loop(self):
        g = parse_graph(LOOP_JSON)
        assert g.vertices == ("v",)
        assert g.edges == (Edge("e", "v", "v"),)

    def test_parse_edge(self):
        g = parse_graph(EDGE_JSON)
        assert g.src("e") == "v" and g.rng("e") == "w"

    @pytest.mark.parametrize("text, code", [
        ("{not json", ErrorCode.MALFORMED_JSON),
        ("[1, 2]", ErrorCode.MALFORMED_JSON),
        ('{"vertices":["v","v"],"edges":[]}', ErrorCode.DUPLICATE_ID),
        ('{"vertices":["v"],"edges":[{"id":"e","src":"v","rng":"v"},{"id":"e","src":"v","rng":"v"}]}',
         ErrorCode.DUPLICATE_ID),
        ('{"vertices":["v"],"edges":[{"id":"e","src":"v","rng":"x"}]}', ErrorCode.DANGLING_ENDPOINT),
        ('{"vertices":[],"edges":[]}', ErrorCode.EMPTY_GRAPH),
    ])
    def test_parse_errors(self, text, code):
        with pytest.raises(GraphParseError) as info:
            parse_graph(text)
        assert info.value.code == code

    def test_serialize_round_trip(self, hexagon_with_exits):
        text = serialize_graph(hexagon_with_exits)
        assert parse_graph(text) == hexagon_with_exits
        assert list(json.loads(text)) == ["vertices", "edges"]

    def test_serialization_sorts_ids(self):
        g = parse_graph('{"vertices":["w","v"],"edges":[{"id":"z","src":"v","rng":"w"},{"id":"a","src":"w","rng":"v"}]}')
        doc = json.loads(serialize_graph(g))
        assert doc["vertices"] == ["v", "w"]
        assert [e["id"] for e in doc["edges"]] == ["a", "z"]

    def test_digest_distinguishes_graphs(self, loop_graph, edge_graph):
        assert graph_digest(loop_graph) == graph_digest(parse_graph(LOOP_JSON))
        assert graph_digest(loop_graph) != graph_digest(edge_graph)


def test_sources(edge_graph, loop_graph, hexagon_with_exits):
    assert sources(edge_graph) == {"v"}
    assert sources(loop_graph) == set()
    assert sources(hexagon_with_exits) == set()


def test_cycle_vertices(loop_graph, edge_graph, entry_graph):
    assert cycle_vertices(loop_graph) == {"v"}
    assert cycle_vertices(edge_graph) == set()
    assert cycle_vertices(entry_graph) == {"v1", "v2"}


def test_entry_verdicts(loop_with_exits, entry_graph):
    assert no_cycle_has_entry(loop_with_exits).holds
    verdict = no_cycle_has_entry(entry_graph)
    assert not verdict.holds
    assert verdict.witness == "f"
    assert verdict.entered_vertex == "v1"


def test_entry_witness_between_cycles():
    # two loops at a and b with an edge a -> b: the edge enters the loop at b
    g = Graph.build(["a", "b"], [Edge("la", "a", "a"), Edge("lb", "b", "b"), Edge("x", "a", "b")])
    verdict = no_cycle_has_entry(g)
    assert verdict.witness == "x"
    cycle = host_cycle(g, "x")
    assert cycle.edges == ("lb",)


def test_find_cycles(loop_graph, hexagon_with_exits, two_cycles):
    (cycle,) = find_cycles(loop_graph)
    assert cycle.base == "v" and cycle.length == 1 and cycle.designated_edge == "e"

    (cycle,) = find_cycles(hexagon_with_exits)
    assert cycle.base == "P1"
    assert cycle.edges == ("c1", "c2", "c3", "c4", "c5", "c6")
    assert cycle.vertices == ("P1", "P2", "P3", "P4", "P5", "P9")
    assert hexagon_with_exits.rng(cycle.designated_edge) == "P1"

    assert [c.base for c in find_cycles(two_cycles)] == ["a1", "b1"]


def test_find_cycles_rejects_entries(entry_graph):
    with pytest.raises(PreconditionError) as info:
        find_cycles(entry_graph)
    assert info.value.code == ErrorCode.ENTRY_PRESENT
    assert info.value.details["witness"] == "f"


def test_host_cycle(entry_graph):
    cycle = host_cycle(entry_graph, "f")
    assert cycle.base == "v1"
    assert cycle.edges == ("e1", "e2")
    assert "f" not in cycle.edges


def test_count_paths(edge_graph, hexagon_with_exits):
    assert count_paths_from(edge_graph, "v") == 2
    assert count_paths_from(edge_graph, "w") == 1
    g2 = decompose(hexagon_with_exits).g2
    assert count_paths_from(g2, "P3") == 4
    assert count_paths_from(g2, "P4") == 2


def test_count_paths_infinite(loop_graph, hexagon_with_exits):
    with pytest.raises(PreconditionError) as info:
        count_paths_from(loop_graph, "v")
    assert info.value.code == ErrorCode.INFINITE_PATH_COUNT
    table = path_count_table(hexagon_with_exits)
    assert table["P3"] is None
    assert table["P6"] == 1


def test_enumerated_paths_match_counts():
    rng = random.Random(7)
    for _ in range(150):
        g = random_graph(rng, max_vertices=8, max_edges=9) if rng.random() < 0.5 else random_no_entry_graph(
            rng, max_vertices=8, max_edges=12,
        )
        for v, n in path_count_table(g).items():
            if n is None:
                with pytest.raises(PreconditionError):
                    enumerate_paths_from(g, v)
                continue
            paths = enumerate_paths_from(g, v)
            assert len(paths) == n == count_paths_from(g, v)
            assert len(set(paths)) == len(paths)
            assert paths[0] == Path.trivial(v)


def test_count_paths_on_long_chain():
    n = 2000
    vertices = [f"v{i:05d}" for i in range(n)]
    g = Graph.build(vertices, [Edge(f"e{i:05d}", vertices[i], vertices[i + 1]) for i in range(n - 1)])
    assert count_paths_from(g, vertices[0]) == n
    table = path_count_table(g)
    assert table[vertices[0]] == n
    assert table[vertices[-1]] == 1


def test_longest_path(edge_graph, loop_graph):
    assert longest_path_length(edge_graph) == 1
    with pytest.raises(PreconditionError):
        longest_path_length(loop_graph)


class TestDecomposition:
    def test_loop_with_exits(self, loop_with_exits):
        d = decompose(loop_with_exits)
        assert d.g1.edge_ids == ("l",)
        assert d.g2.edge_ids == ("x1", "x2", "x3")
        assert d.shared == ("a",)
        assert d.alphas == ()
        assert d.betas == ("b", "c", "d")
        assert d.case_flag == CaseFlag.SAME_VERTEX_SET

    def test_hexagon_with_exits(self, hexagon_with_exits):
        d = decompose(hexagon_with_exits)
        assert d.g1.edge_ids == ("c1", "c2", "c3", "c4", "c5", "c6")
        assert len(d.g2.edges) == 4
        assert d.shared == ("P3", "P4")
        assert d.alphas == ("P1", "P2", "P5", "P9")
        assert d.betas == ("P6", "P7", "P8")
        assert d.case_flag == CaseFlag.PROPER_SUBSET
        assert sources(d.g2) == {"P3", "P4"}

    @pytest.mark.parametrize("name", ["loop_graph", "edge_graph", "two_cycles"])
    def test_trivial(self, name, request):
        with pytest.raises(PreconditionError) as info:
            decompose(request.getfixturevalue(name))
        assert info.value.code == ErrorCode.TRIVIAL_DECOMPOSITION

    def test_isolated_vertex_goes_to_g2(self):
        g = Graph.build(["a", "z"], [Edge("l", "a", "a")])
        d = decompose(g)
        assert d.g2.vertices == ("z",)
        assert d.shared == ()
        assert d.case_flag == CaseFlag.PROPER_SUBSET

    def test_relation_partition(self, loop_with_exits, hexagon_with_exits):
        assert relation_partition_check(loop_with_exits, decompose(loop_with_exits))
        assert relation_partition_check(hexagon_with_exits, decompose(hexagon_with_exits))

    def test_relation_partition_detects_moved_edge(self, hexagon_with_exits):
        d = decompose(hexagon_with_exits)
        moved = Decomposition(
            g1=subgraph(hexagon_with_exits, ("c1", "c2", "c3", "c4", "c5", "c6", "g4")),
            g2=subgraph(hexagon_with_exits, ("g1", "g2", "g3")),
            cycles=d.cycles, shared=d.shared, alphas=d.alphas, betas=d.betas, case_flag=d.case_flag,
        )
        assert not relation_partition_check(hexagon_with_exits, moved)

    def test_random_partitions(self):
        rng = random.Random(11)
        checked = 0
        for _ in range(100):
            g = random_no_entry_graph(rng)
            cycles = find_cycles(g)
            on_cycle = {v for c in cycles for v in c.vertices}
            if not cycles or on_cycle == g.vertex_set:
                continue
            assert relation_partition_check(g, decompose(g))
            checked += 1
        assert checked > 10


def test_descriptors(edge_graph):
    assert ck_relation_descriptors(edge_graph) == {
        ("projection", "v"), ("projection", "w"), ("orthogonal", "v", "w"),
        ("isometry", "e", "v"), ("cuntz_krieger", "w", ("e",)),
    }


def test_simple_cycles_oracle_parallel_edges():
    g = Graph.build(["a", "b"], [Edge("p1", "a", "b"), Edge("p2", "a", "b"), Edge("q", "b", "a")])
    cycles = simple_cycles_oracle(g)
    assert [c.edges for c in cycles] == [("p1", "q"), ("p2", "q")]
    assert not entry_oracle(g)
    assert not no_cycle_has_entry(g).holds


@pytest.mark.parametrize("n", [1, 2, 3])
def test_entry_decision_exhaustive(n):
    for g in _all_digraphs(n):
        assert no_cycle_has_entry(g).holds == entry_oracle(g)


@pytest.mark.parametrize("n", [4, pytest.param(5, marks=pytest.mark.slow)])
@pytest.mark.parametrize("edge_count", range(8))
def test_entry_decision_exhaustive_up_to_seven_edges(n, edge_count):
    for g in _digraphs_with_edges(n, edge_count):
        assert no_cycle_has_entry(g).holds == entry_oracle(g)


def test_entry_decision_random_multigraphs():
    rng = random.Random(2024)
    for _ in range(500):
        g = random_graph(rng, max_vertices=8, max_edges=12)
        assert no_cycle_has_entry(g).holds == entry_oracle(g)


def test_random_no_entry_generator():
    rng = random.Random(3)
    for _ in range(100):
        assert entry_oracle(random_no_entry_graph(rng))


def test_cycles_are_disjoint_and_cover_cycle_vertices():
    rng = random.Random(42)
    for _ in range(200):
        g = random_no_entry_graph(rng)
        cycles = find_cycles(g)
        on_cycle = cycle_vertices(g)
        members = [v for c in cycles for v in c.vertices]
        assert len(members) == len(set(members))
        assert set(members) == on_cycle
        cycle_edges = {eid for c in cycles for eid in c.edges}
        assert cycle_edges == {e.id for e in g.edges if e.src in on_cycle and e.rng in on_cycle}
        for c in cycles:
            assert c.base == min(c.vertices)
            assert len(c.edges) == len(c.vertices)
