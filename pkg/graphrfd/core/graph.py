"""
Graph data model and structural analysis.

A Graph is a finite directed multigraph with named vertices and edges. All
analysis works on edge ids, never on endpoint pairs, so parallel edges and
multiple loops are handled like any other edge. Ordering is lexicographic on
ids everywhere so that every derived report is reproducible byte-for-byte.

Conventions: a path e_1 ... e_n satisfies s(e_{i+1}) = r(e_i); a vertex is a
source when it receives no edge; a cycle has an entry when some edge outside
it has its range on the cycle.
"""
import hashlib
import itertools
import json
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from graphrfd.core.error_handler import ErrorCode, enhance_error
from graphrfd.core.validation import validate_graph_document

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Edge:
    """A directed edge from src to rng."""
    id: str
    src: str
    rng: str


@dataclass(frozen=True)
class Graph:
    """Immutable finite directed multigraph; vertices and edges are kept sorted."""
    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]

    @classmethod
    def build(cls, vertices: Iterable[str], edges: Iterable[Edge]) -> "Graph":
        return cls(tuple(sorted(vertices)), tuple(sorted(edges, key=lambda e: e.id)))

    @cached_property
    def _edge_index(self) -> Dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _in_edges(self) -> Dict[str, Tuple[str, ...]]:
        incoming: Dict[str, List[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            incoming[e.rng].append(e.id)
        return {v: tuple(ids) for v, ids in incoming.items()}

    @cached_property
    def _out_edges(self) -> Dict[str, Tuple[str, ...]]:
        outgoing: Dict[str, List[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            outgoing[e.src].append(e.id)
        return {v: tuple(ids) for v, ids in outgoing.items()}

    @cached_property
    def vertex_set(self) -> FrozenSet[str]:
        return frozenset(self.vertices)

    @property
    def edge_ids(self) -> Tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._edge_index

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edge_index[edge_id]
        except KeyError:
            raise enhance_error(ErrorCode.UNKNOWN_GENERATOR, f"Unknown edge '{edge_id}'") from None

    def src(self, edge_id: str) -> str:
        return self.edge(edge_id).src

    def rng(self, edge_id: str) -> str:
        return self.edge(edge_id).rng

    def in_edges(self, vertex: str) -> Tuple[str, ...]:
        return self._in_edges[vertex]

    def out_edges(self, vertex: str) -> Tuple[str, ...]:
        return self._out_edges[vertex]

    def is_regular(self, vertex: str) -> bool:
        """Relation (4) is imposed exactly at vertices receiving at least one edge."""
        return len(self._in_edges[vertex]) > 0

    def special_edge(self, vertex: str) -> Optional[str]:
        """Lexicographically least edge into vertex, or None at a source."""
        incoming = self._in_edges[vertex]
        return incoming[0] if incoming else None

    def to_networkx(self) -> nx.MultiDiGraph:
        """MultiDiGraph with edge ids as keys."""
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.vertices)
        for e in self.edges:
            graph.add_edge(e.src, e.rng, key=e.id)
        return graph


@dataclass(frozen=True, order=True)
class Path:
    """
    A composable edge sequence e_1 ... e_n starting at base and ending at end.

    A trivial path has no edges and base == end; it stands for the vertex.
    """
    base: str
    edges: Tuple[str, ...] = ()
    end: str = ""

    def __post_init__(self):
        if not self.end:
            object.__setattr__(self, "end", self.base)

    @classmethod
    def trivial(cls, vertex: str) -> "Path":
        return cls(vertex, (), vertex)

    @classmethod
    def of_edges(cls, g: Graph, edges: Sequence[str]) -> "Path":
        edges = tuple(edges)
        if not edges:
            raise ValueError("use Path.trivial for length-zero paths")
        for first, second in zip(edges, edges[1:]):
            if g.src(second) != g.rng(first):
                raise ValueError(f"Edges '{first}' and '{second}' are not composable")
        return cls(g.src(edges[0]), edges, g.rng(edges[-1]))

    @property
    def source(self) -> str:
        return self.base

    @property
    def range(self) -> str:
        return self.end

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def is_trivial(self) -> bool:
        return not self.edges

    def then(self, other: "Path") -> "Path":
        """Concatenation: traverse self, then other."""
        if self.end != other.base:
            raise ValueError(f"Cannot append a path at '{other.base}' to one ending at '{self.end}'")
        return Path(self.base, self.edges + other.edges, other.end)

    def sort_key(self) -> Tuple[int, Tuple[str, ...], str]:
        return (len(self.edges), self.edges, self.base)

    def to_json(self) -> Dict[str, Any]:
        return {"base": self.base, "edges": list(self.edges), "end": self.end}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "Path":
        return cls(data["base"], tuple(data["edges"]), data["end"])

    def __str__(self) -> str:
        return "(" + " ".join(self.edges) + ")" if self.edges else f"[{self.base}]"


@dataclass(frozen=True)
class Cycle:
    """Simple cycle; edges in traversal order starting at the base vertex."""
    base: str
    edges: Tuple[str, ...]
    vertices: Tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def designated_edge(self) -> str:
        """The edge whose range is the base vertex; it carries the z twist."""
        return self.edges[-1]

    def path(self, g: Graph) -> Path:
        return Path.of_edges(g, self.edges)

    def to_json(self) -> Dict[str, Any]:
        return {"base": self.base, "edges": list(self.edges), "vertices": list(self.vertices)}


class CaseFlag(Enum):
    """Whether G2 contains every vertex of G."""
    SAME_VERTEX_SET = "SameVertexSet"
    PROPER_SUBSET = "ProperSubset"


@dataclass(frozen=True)
class Decomposition:
    """Split of a no-entry graph into its cycles (g1) and the remaining forest (g2)."""
    g1: Graph
    g2: Graph
    cycles: Tuple[Cycle, ...]
    shared: Tuple[str, ...]
    alphas: Tuple[str, ...]
    betas: Tuple[str, ...]
    case_flag: CaseFlag

    def summary(self) -> Dict[str, Any]:
        return {
            "g1": {"vertices": list(self.g1.vertices), "edges": list(self.g1.edge_ids)},
            "g2": {"vertices": list(self.g2.vertices), "edges": list(self.g2.edge_ids)},
            "cycles": [c.to_json() for c in self.cycles],
            "shared": list(self.shared),
            "alphas": list(self.alphas),
            "betas": list(self.betas),
            "case": self.case_flag.value,
        }


@dataclass(frozen=True)
class EntryVerdict:
    """Outcome of the no-entry test; witness is an entering edge when it fails."""
    holds: bool
    witness: Optional[str] = None
    entered_vertex: Optional[str] = None


# ====================================================================
# PARSING AND SERIALIZATION
# ====================================================================

def parse_graph(text: str) -> Graph:
    """
    Parse and validate a graph document.

    Args:
        text: JSON object {"vertices": [ids], "edges": [{"id", "src", "rng"}]}

    Returns:
        Validated Graph with ids preserved verbatim

    Raises:
        GraphParseError: MalformedJson, DuplicateId, DanglingEndpoint or EmptyGraph
    """
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, TypeError) as e:
        raise enhance_error(ErrorCode.MALFORMED_JSON, f"Malformed JSON: {e}") from e
    return graph_from_document(doc)


def graph_from_document(doc: Any) -> Graph:
    """Build a Graph from an already decoded JSON document."""
    is_valid, code, message = validate_graph_document(doc)
    if not is_valid:
        raise enhance_error(code, message)
    edges = [Edge(r["id"], r["src"], r["rng"]) for r in doc.get("edges", [])]
    graph = Graph.build(doc["vertices"], edges)
    logger.debug(f"Parsed graph with {len(graph.vertices)} vertices and {len(graph.edges)} edges")
    return graph


def graph_to_document(g: Graph) -> Dict[str, Any]:
    return {
        "vertices": list(g.vertices),
        "edges": [{"id": e.id, "src": e.src, "rng": e.rng} for e in g.edges],
    }


def serialize_graph(g: Graph) -> str:
    """Canonical JSON: keys vertices then edges, both sorted by id."""
    return json.dumps(graph_to_document(g), separators=(",", ":"))


def graph_digest(g: Graph) -> str:
    return hashlib.sha256(serialize_graph(g).encode("utf-8")).hexdigest()


def subgraph(g: Graph, edge_ids: Iterable[str], extra_vertices: Iterable[str] = ()) -> Graph:
    """Graph on the given edges, their endpoints and any extra vertices."""
    edges = [g.edge(eid) for eid in edge_ids]
    vertices = set(extra_vertices)
    for e in edges:
        vertices.update((e.src, e.rng))
    return Graph.build(vertices, edges)


# ====================================================================
# STRUCTURAL ANALYSIS
# ====================================================================

def sources(g: Graph) -> Set[str]:
    """Vertices receiving no edge."""
    return {v for v in g.vertices if not g.in_edges(v)}


def cycle_vertices(g: Graph) -> Set[str]:
    """Vertices lying on at least one cycle, from the strongly connected components."""
    graph = g.to_networkx()
    on_cycle: Set[str] = set()
    for component in nx.strongly_connected_components(graph):
        if len(component) > 1:
            on_cycle.update(component)
        else:
            (vertex,) = component
            if graph.has_edge(vertex, vertex):
                on_cycle.add(vertex)
    return on_cycle


def _component_index(g: Graph) -> Dict[str, int]:
    index: Dict[str, int] = {}
    for i, component in enumerate(nx.strongly_connected_components(g.to_networkx())):
        for vertex in component:
            index[vertex] = i
    return index


def no_cycle_has_entry(g: Graph) -> EntryVerdict:
    """
    Decide whether some edge enters a cycle.

    A graph has no entries iff every vertex on a cycle receives exactly one
    edge. When the test fails the witness is taken at the least offending
    vertex: the least in-edge coming from outside its strongly connected
    component if there is one, otherwise the second in-edge (the least one
    then belongs to the host cycle).
    """
    on_cycle = cycle_vertices(g)
    offending = sorted(v for v in on_cycle if len(g.in_edges(v)) != 1)
    if not offending:
        return EntryVerdict(holds=True)

    vertex = offending[0]
    component = _component_index(g)
    incoming = g.in_edges(vertex)
    outside = [eid for eid in incoming if component[g.src(eid)] != component[vertex]]
    witness = outside[0] if outside else incoming[1]
    logger.debug(f"Entry found: edge '{witness}' enters the cycle at '{vertex}'")
    return EntryVerdict(holds=False, witness=witness, entered_vertex=vertex)


def _cycle_from_edges(g: Graph, edges: Sequence[str]) -> Cycle:
    """Rotate a closed edge sequence so that it starts at its least vertex."""
    starts = [g.src(eid) for eid in edges]
    pivot = starts.index(min(starts))
    rotated = tuple(edges[pivot:]) + tuple(edges[:pivot])
    return Cycle(base=starts[pivot], edges=rotated, vertices=tuple(g.src(eid) for eid in rotated))


def find_cycles(g: Graph) -> List[Cycle]:
    """
    List the cycles of a graph in which no cycle has an entry.

    Each cyclic strongly connected component is then a single simple cycle,
    and cycles are pairwise vertex-disjoint.

    Raises:
        PreconditionError: EntryPresent
    """
    verdict = no_cycle_has_entry(g)
    if not verdict.holds:
        raise enhance_error(
            ErrorCode.ENTRY_PRESENT,
            f"Edge '{verdict.witness}' enters a cycle at '{verdict.entered_vertex}'",
            witness=verdict.witness,
        )
    on_cycle = cycle_vertices(g)
    cycles: List[Cycle] = []
    visited: Set[str] = set()
    for base in sorted(on_cycle):
        if base in visited:
            continue
        edges: List[str] = []
        vertex = base
        while True:
            visited.add(vertex)
            nxt = [eid for eid in g.out_edges(vertex) if g.rng(eid) in on_cycle]
            # each cycle vertex has exactly one in-edge, so exactly one cycle edge leaves it
            eid = nxt[0]
            edges.append(eid)
            vertex = g.rng(eid)
            if vertex == base:
                break
        cycles.append(Cycle(base=base, edges=tuple(edges), vertices=tuple(g.src(e) for e in edges)))
    return cycles


def host_cycle(g: Graph, witness: str) -> Cycle:
    """
    A simple cycle through r(witness) that does not use the witness edge.

    The cycle enters r(witness) through the least in-edge other than the
    witness that lies in the same strongly connected component, and returns
    along a shortest path found by breadth-first search over sorted out-edges.
    """
    target = g.rng(witness)
    component = _component_index(g)
    candidates = [
        eid for eid in g.in_edges(target)
        if eid != witness and component[g.src(eid)] == component[target]
    ]
    if not candidates:
        raise enhance_error(ErrorCode.NO_ENTRIES, f"Edge '{witness}' does not enter a cycle")
    closing = candidates[0]
    goal = g.src(closing)
    if goal == target:
        return _cycle_from_edges(g, (closing,))

    parents: Dict[str, Tuple[str, str]] = {}
    frontier = [target]
    seen = {target}
    while frontier and goal not in seen:
        next_frontier = []
        for vertex in frontier:
            for eid in g.out_edges(vertex):
                nxt = g.rng(eid)
                if nxt not in seen and component.get(nxt) == component[target]:
                    seen.add(nxt)
                    parents[nxt] = (vertex, eid)
                    next_frontier.append(nxt)
        frontier = next_frontier
    route: List[str] = []
    vertex = goal
    while vertex != target:
        vertex, eid = parents[vertex]
        route.append(eid)
    route.reverse()
    return _cycle_from_edges(g, tuple(route) + (closing,))


def cycle_entries(g: Graph, cycle: Cycle) -> List[str]:
    """Edges outside the cycle whose range lies on it."""
    on_cycle = set(cycle.vertices)
    own = set(cycle.edges)
    return [e.id for e in g.edges if e.rng in on_cycle and e.id not in own]


def _reaches_cycle(g: Graph, start: str, on_cycle: Set[str]) -> bool:
    reachable = nx.descendants(g.to_networkx(), start) | {start}
    return bool(reachable & on_cycle)


def _acyclic_counts(g: Graph, dag: nx.MultiDiGraph) -> Dict[str, int]:
    """n(v) for every vertex of a successor-closed acyclic subgraph."""
    counts: Dict[str, int] = {}
    for v in reversed(list(nx.topological_sort(dag))):
        counts[v] = 1 + sum(counts[g.rng(eid)] for eid in g.out_edges(v))
    return counts


def count_paths_from(g: Graph, t: str) -> int:
    """
    Number of paths starting at t, the trivial path included.

    Computed by n(t) = 1 + sum over edges e leaving t of n(r(e)), filled in
    reverse topological order over the vertices reachable from t.

    Raises:
        PreconditionError: InfinitePathCount when a cycle is reachable from t
    """
    if t not in g.vertex_set:
        raise enhance_error(ErrorCode.UNKNOWN_GENERATOR, f"Unknown vertex '{t}'")
    if _reaches_cycle(g, t, cycle_vertices(g)):
        raise enhance_error(ErrorCode.INFINITE_PATH_COUNT, f"A cycle is reachable from '{t}'", vertex=t)

    graph = g.to_networkx()
    return _acyclic_counts(g, graph.subgraph(nx.descendants(graph, t) | {t}))[t]


def path_count_table(g: Graph) -> Dict[str, Optional[int]]:
    """n(t) for every vertex; None where it is infinite."""
    graph = g.to_networkx()
    infinite = set()
    for v in cycle_vertices(g):
        infinite |= nx.ancestors(graph, v) | {v}
    counts = _acyclic_counts(g, graph.subgraph(set(g.vertices) - infinite))
    return {v: counts.get(v) for v in g.vertices}


def enumerate_paths_from(g: Graph, t: str) -> List[Path]:
    """All paths starting at t in depth-first order over sorted out-edges."""
    if _reaches_cycle(g, t, cycle_vertices(g)):
        raise enhance_error(ErrorCode.INFINITE_PATH_COUNT, f"A cycle is reachable from '{t}'", vertex=t)
    paths: List[Path] = []
    stack = [Path.trivial(t)]
    while stack:
        path = stack.pop()
        paths.append(path)
        for eid in reversed(g.out_edges(path.end)):
            stack.append(Path(path.base, path.edges + (eid,), g.rng(eid)))
    return paths


def longest_path_length(g: Graph) -> int:
    """Length of the longest path of an acyclic graph."""
    if cycle_vertices(g):
        raise enhance_error(ErrorCode.CYCLE_PRESENT, "Longest path is unbounded on a graph with cycles")
    graph = g.to_networkx()
    return nx.dag_longest_path_length(graph) if g.edges else 0


# ====================================================================
# DECOMPOSITION
# ====================================================================

def decompose(g: Graph) -> Decomposition:
    """
    Split a no-entry graph into G1 (union of its cycles) and G2 (the rest).

    G2 holds every non-cycle edge with its endpoints together with every
    vertex that lies on no cycle, so isolated vertices belong to G2.

    Raises:
        PreconditionError: EntryPresent; TrivialDecomposition when G has no
        cycle or every vertex lies on a cycle
    """
    cycles = find_cycles(g)
    if not cycles:
        raise enhance_error(ErrorCode.TRIVIAL_DECOMPOSITION, "Graph is acyclic; there is no G1 part")

    cycle_edges = {eid for c in cycles for eid in c.edges}
    on_cycle = {v for c in cycles for v in c.vertices}
    rest_edges = [eid for eid in g.edge_ids if eid not in cycle_edges]
    off_cycle = [v for v in g.vertices if v not in on_cycle]
    if not rest_edges and not off_cycle:
        raise enhance_error(ErrorCode.TRIVIAL_DECOMPOSITION, "Every vertex lies on a cycle; there is no G2 part")

    g1 = subgraph(g, sorted(cycle_edges))
    g2 = subgraph(g, rest_edges, off_cycle)

    shared_set = g1.vertex_set & g2.vertex_set
    shared = tuple(v for c in cycles for v in c.vertices if v in shared_set)
    alphas = tuple(sorted(g1.vertex_set - g2.vertex_set))
    betas = tuple(sorted(g2.vertex_set - g1.vertex_set))
    case_flag = CaseFlag.SAME_VERTEX_SET if g2.vertex_set == g.vertex_set else CaseFlag.PROPER_SUBSET

    g2_sources = sources(g2)
    assert all(v in g2_sources for v in shared), "shared vertices must be sources of G2"
    assert betas, "an edge of G2 would enter G1"

    logger.debug(
        f"Decomposed graph: {len(cycles)} cycles, {len(shared)} shared, "
        f"{len(alphas)} alphas, {len(betas)} betas, case {case_flag.value}"
    )
    return Decomposition(
        g1=g1, g2=g2, cycles=tuple(cycles), shared=shared,
        alphas=alphas, betas=betas, case_flag=case_flag,
    )


# One descriptor per relation instance
Descriptor = Tuple[Any, ...]


def ck_relation_descriptors(g: Graph) -> Set[Descriptor]:
    """
    Descriptors of the Cuntz-Krieger relations of g.

    (1) ("projection", v); (2) ("orthogonal", v, w) with v < w;
    (3) ("isometry", e, s(e)); (4) ("cuntz_krieger", v, in-edges of v) at
    every regular vertex.
    """
    descriptors: Set[Descriptor] = set()
    for v in g.vertices:
        descriptors.add(("projection", v))
        if g.is_regular(v):
            descriptors.add(("cuntz_krieger", v, g.in_edges(v)))
    for v, w in itertools.combinations(g.vertices, 2):
        descriptors.add(("orthogonal", v, w))
    for e in g.edges:
        descriptors.add(("isometry", e.id, e.src))
    return descriptors


def relation_partition_check(g: Graph, d: Decomposition) -> bool:
    """
    Check that the CK relations of G are those of G1 together with those of G2.

    Orthogonality between a vertex of G1 only and a vertex of G2 only is not a
    relation of either part; in the amalgamated product it follows from all
    maps being unital, so those cross pairs are left out of the comparison.
    """
    g1_edges, g2_edges = set(d.g1.edge_ids), set(d.g2.edge_ids)
    if g1_edges & g2_edges or (g1_edges | g2_edges) != set(g.edge_ids):
        logger.debug("Edge sets of G1 and G2 do not partition the edges of G")
        return False
    if (d.g1.vertex_set | d.g2.vertex_set) != g.vertex_set:
        logger.debug("Vertex sets of G1 and G2 do not cover G")
        return False

    shared = d.g1.vertex_set & d.g2.vertex_set
    for vertex in shared:
        if any(eid not in g1_edges for eid in g.in_edges(vertex)):
            logger.debug(f"Shared vertex '{vertex}' receives an edge outside G1")
            return False

    only_g1 = d.g1.vertex_set - d.g2.vertex_set
    only_g2 = d.g2.vertex_set - d.g1.vertex_set

    def is_cross_pair(descriptor: Descriptor) -> bool:
        if descriptor[0] != "orthogonal":
            return False
        pair = set(descriptor[1:])
        return bool(pair & only_g1) and bool(pair & only_g2)

    whole = {x for x in ck_relation_descriptors(g) if not is_cross_pair(x)}
    parts = ck_relation_descriptors(d.g1) | ck_relation_descriptors(d.g2)
    return whole == parts


# ====================================================================
# BRUTE-FORCE ORACLES
# ====================================================================

def simple_cycles_oracle(g: Graph) -> List[Cycle]:
    """
    Every simple cycle at edge level, by exhaustive enumeration.

    Vertex cycles come from networkx; each is expanded over the choices of
    parallel edges between consecutive vertices.
    """
    simple = nx.DiGraph()
    simple.add_nodes_from(g.vertices)
    between: Dict[Tuple[str, str], List[str]] = {}
    for e in g.edges:
        between.setdefault((e.src, e.rng), []).append(e.id)
        if e.src != e.rng:
            simple.add_edge(e.src, e.rng)

    cycles: List[Cycle] = []
    for e in g.edges:
        if e.src == e.rng:
            cycles.append(Cycle(base=e.src, edges=(e.id,), vertices=(e.src,)))
    for vertex_cycle in nx.simple_cycles(simple):
        hops = list(zip(vertex_cycle, vertex_cycle[1:] + vertex_cycle[:1]))
        for choice in itertools.product(*(between[hop] for hop in hops)):
            cycles.append(_cycle_from_edges(g, choice))
    return sorted(set(cycles), key=lambda c: (c.base, c.edges))


def entry_oracle(g: Graph) -> bool:
    """True iff no edge outside a simple cycle has its range on that cycle."""
    for cycle in simple_cycles_oracle(g):
        if cycle_entries(g, cycle):
            return False
    return True
