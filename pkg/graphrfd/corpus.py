"""
Named example graphs and seeded random graph generators.

Used by selftest and the test suite.
"""
import random
from typing import Dict, List, Optional

from graphrfd.core.graph import Edge, Graph, Path
from graphrfd.core.symbolic import I_UNIT, GaussRational, Monomial, SymElement, paths_up_to


def _graph(vertices: List[str], edges: List[tuple]) -> Graph:
    return Graph.build(vertices, [Edge(eid, src, rng) for eid, src, rng in edges])


def loop() -> Graph:
    return _graph(["v"], [("e", "v", "v")])


def edge() -> Graph:
    return _graph(["v", "w"], [("e", "v", "w")])


def entry() -> Graph:
    """Two-cycle v1 <-> v2 entered by f: w -> v1."""
    return _graph(["v1", "v2", "w"], [("e1", "v1", "v2"), ("e2", "v2", "v1"), ("f", "w", "v1")])


def loop_with_exits() -> Graph:
    """Loop at a with exits to b, c and d; every vertex lies in the forest part."""
    return _graph(
        ["a", "b", "c", "d"],
        [("l", "a", "a"), ("x1", "a", "b"), ("x2", "a", "c"), ("x3", "a", "d")],
    )


def hexagon_with_exits() -> Graph:
    """Six-cycle P1 .. P5, P9 with exits from P3 and P4 to P6, P7 and P8."""
    cycle = ["P1", "P2", "P3", "P4", "P5", "P9"]
    edges = [(f"c{i + 1}", v, cycle[(i + 1) % 6]) for i, v in enumerate(cycle)]
    edges += [("g1", "P3", "P6"), ("g2", "P3", "P7"), ("g3", "P3", "P8"), ("g4", "P4", "P6")]
    return _graph(cycle + ["P6", "P7", "P8"], edges)


def two_cycles() -> Graph:
    """Two disjoint two-cycles."""
    return _graph(
        ["a1", "a2", "b1", "b2"],
        [("p", "a1", "a2"), ("q", "a2", "a1"), ("r", "b1", "b2"), ("s", "b2", "b1")],
    )


NAMED_GRAPHS = {
    "loop": loop,
    "edge": edge,
    "entry": entry,
    "loop_with_exits": loop_with_exits,
    "hexagon_with_exits": hexagon_with_exits,
    "two_cycles": two_cycles,
}


def random_graph(rng: random.Random, max_vertices: int = 6, max_edges: int = 8) -> Graph:
    """Arbitrary multigraph; loops and parallel edges allowed."""
    n = rng.randint(1, max_vertices)
    vertices = [f"v{i}" for i in range(n)]
    edges = [
        (f"e{j:02d}", rng.choice(vertices), rng.choice(vertices))
        for j in range(rng.randint(0, max_edges))
    ]
    return _graph(vertices, edges)


def random_no_entry_graph(
    rng: random.Random, max_vertices: int = 12, max_edges: int = 20, max_cycles: Optional[int] = None,
) -> Graph:
    """
    Graph in which no cycle has an entry.

    Disjoint cycles are laid on a prefix of the vertices; every other edge
    ends at a vertex off the cycles and goes forward in vertex order when it
    starts off the cycles too.
    """
    n = rng.randint(1, max_vertices)
    vertices = [f"v{i:02d}" for i in range(n)]
    order = list(vertices)
    rng.shuffle(order)

    edges: List[tuple] = []
    on_cycle: List[str] = []
    position = 0
    cycles_left = rng.randint(0, max_cycles if max_cycles is not None else 3)
    while cycles_left and position < n and len(edges) < max_edges:
        length = rng.randint(1, min(4, n - position, max_edges - len(edges)))
        members = order[position:position + length]
        for i, v in enumerate(members):
            edges.append((f"c{len(edges):02d}", v, members[(i + 1) % length]))
        on_cycle.extend(members)
        position += length
        cycles_left -= 1

    forest = order[position:]
    rank = {v: i for i, v in enumerate(forest)}
    if forest:
        for _ in range(rng.randint(0, max_edges - len(edges))):
            target = rng.choice(forest)
            candidates = on_cycle + [v for v in forest if rank[v] < rank[target]]
            if not candidates:
                continue
            edges.append((f"f{len(edges):02d}", rng.choice(candidates), target))
    return _graph(vertices, edges)


def random_element(
    rng: random.Random, g: Graph, terms: int = 4, bound: int = 2, coefficient_range: int = 3,
) -> SymElement:
    """Random combination of monomials s_mu s_nu* with |mu|, |nu| <= bound, not reduced."""
    grouped: Dict[str, List[Path]] = paths_up_to(g, bound)
    result: Dict[Monomial, GaussRational] = {}
    for _ in range(terms):
        base = rng.choice(g.vertices)
        mu = rng.choice(grouped[base])
        nu = rng.choice(grouped[base])
        c = GaussRational.of(rng.randint(-coefficient_range, coefficient_range))
        c = c + GaussRational.of(rng.randint(-coefficient_range, coefficient_range)) * I_UNIT
        m = Monomial(mu, nu)
        result[m] = result.get(m, GaussRational()) + c
    return SymElement(g, result)
