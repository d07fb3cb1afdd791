"""
Finite-dimensional matrix representations of graph algebras.

Three constructions are provided: the path-basis representation of an acyclic
graph, the z-twisted representation of a single cycle, and the glued
representation of a graph in which no cycle has an entry, where the forest
part and the cycles overlap exactly on their shared vertices. Every
construction satisfies the Cuntz-Krieger relations exactly up to rounding;
check_ck measures how far any Rep is from them.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from graphrfd.config import DEFAULT_TOLERANCES, MAX_PARALLEL_REPS, ToleranceConfig, default_zcount
from graphrfd.core.error_handler import ErrorCode, enhance_error
from graphrfd.core.graph import (
    Cycle, Decomposition, Graph, Path, cycle_vertices, decompose, enumerate_paths_from,
    find_cycles, no_cycle_has_entry, sources, subgraph,
)
from graphrfd.core.symbolic import Monomial, SymElement, basis_monomials, normal_form

logger = logging.getLogger(__name__)


@dataclass
class Rep:
    """
    Assignment of dim x dim complex matrices to the vertices and edges of a graph.

    Matrices are treated as immutable once the Rep is built.
    """
    graph: Graph
    dim: int
    vertex_mats: Dict[str, np.ndarray]
    edge_mats: Dict[str, np.ndarray]
    z_params: Dict[str, complex] = field(default_factory=dict)
    basis_labels: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"Representation dimension must be positive, got {self.dim}")
        for name, mat in list(self.vertex_mats.items()) + list(self.edge_mats.items()):
            if mat.shape != (self.dim, self.dim):
                raise ValueError(f"Matrix for '{name}' has shape {mat.shape}, expected {(self.dim, self.dim)}")
            if not np.all(np.isfinite(mat)):
                raise ValueError(f"Matrix for '{name}' has non-finite entries")

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)


@dataclass(frozen=True)
class SlotLayout:
    """
    Coordinate layout of the glued construction.

    Slots [0, k - I) hold forest paths ending off the cycles, [k - I, k) the
    shared vertices grouped by cycle, and [k, D) the remaining cycle vertices.
    """
    forest_slots: Dict[Path, int]
    cycle_slots: Dict[str, Tuple[int, ...]]  # cycle base -> slot of each traversal position
    k: int
    shared_count: int
    dim: int

    @property
    def beta_slots(self) -> Tuple[int, ...]:
        return tuple(range(0, self.k - self.shared_count))

    @property
    def shared_slots(self) -> Tuple[int, ...]:
        return tuple(range(self.k - self.shared_count, self.k))

    @property
    def tail_slots(self) -> Tuple[int, ...]:
        return tuple(range(self.k, self.dim))


def _unit(dim: int, row: int, col: int, value: complex = 1.0) -> np.ndarray:
    mat = np.zeros((dim, dim), dtype=complex)
    mat[row, col] = value
    return mat


def _path_label(path: Path) -> str:
    return f"path:{path.base}" + (":" + ",".join(path.edges) if path.edges else "")


def _check_modulus(z: complex, tolerances: ToleranceConfig) -> None:
    if abs(abs(z) - 1.0) > tolerances.unit_modulus:
        raise enhance_error(ErrorCode.NOT_UNIT_MODULUS, f"|z| = {abs(z)!r} is not 1", z=[z.real, z.imag])


# ====================================================================
# CONSTRUCTIONS
# ====================================================================

def _forest_paths(g: Graph) -> List[Path]:
    """Paths from every source, sources in sorted order, depth-first within a block."""
    paths: List[Path] = []
    for t in sorted(sources(g)):
        paths.extend(enumerate_paths_from(g, t))
    return paths


def _forest_matrices(
    g: Graph, slots: Mapping[Path, int], dim: int,
) -> Tuple[Dict[str, np.ndarray], Dict[str, np.ndarray]]:
    """p_w -> sum E_{nu,nu} over r(nu) = w; s_e -> sum E_{nu e, nu} over r(nu) = s(e)."""
    vertex_mats = {v: np.zeros((dim, dim), dtype=complex) for v in g.vertices}
    edge_mats = {e.id: np.zeros((dim, dim), dtype=complex) for e in g.edges}
    for path, slot in slots.items():
        vertex_mats[path.end][slot, slot] = 1.0
        for eid in g.out_edges(path.end):
            extended = Path(path.base, path.edges + (eid,), g.rng(eid))
            edge_mats[eid][slots[extended], slot] = 1.0
    return vertex_mats, edge_mats


def acyclic_rep(g: Graph) -> Rep:
    """
    Path-basis representation of an acyclic graph.

    Block i has basis the paths starting at the i-th source, so the dimension
    is the sum of n(v_i) over sources and each source maps to a rank-one
    projection.

    Raises:
        PreconditionError: CyclePresent
    """
    if cycle_vertices(g):
        raise enhance_error(ErrorCode.CYCLE_PRESENT, "acyclic_rep needs a graph without cycles")
    paths = _forest_paths(g)
    slots = {path: i for i, path in enumerate(paths)}
    vertex_mats, edge_mats = _forest_matrices(g, slots, len(paths))
    logger.debug(f"Built acyclic representation of dimension {len(paths)}")
    return Rep(
        graph=g, dim=len(paths), vertex_mats=vertex_mats, edge_mats=edge_mats,
        basis_labels=[_path_label(p) for p in paths],
    )


def _cycle_matrices(
    cycle: Cycle, positions: Sequence[int], dim: int, z: complex,
) -> Tuple[Dict[str, np.ndarray], Dict[str, np.ndarray]]:
    """
    Vertex i -> E_ii; edge e_i -> E_{(i+1) i}; the edge back to the base -> z E_{1 N}.
    """
    n = cycle.length
    vertex_mats = {v: _unit(dim, positions[i], positions[i]) for i, v in enumerate(cycle.vertices)}
    edge_mats = {}
    for i, eid in enumerate(cycle.edges):
        target = positions[(i + 1) % n]
        value = z if i == n - 1 else 1.0
        edge_mats[eid] = _unit(dim, target, positions[i], value)
    return vertex_mats, edge_mats


def cycle_rep(
    g: Graph, cycle: Cycle, z: complex,
    tolerances: ToleranceConfig = DEFAULT_TOLERANCES, check_modulus: bool = True,
) -> Rep:
    """
    The N-dimensional representation rho_z of a single cycle.

    Raises:
        PreconditionError: NotUnitModulus when |z| differs from 1
    """
    z = complex(z)
    if check_modulus:
        _check_modulus(z, tolerances)
    dim = cycle.length
    vertex_mats, edge_mats = _cycle_matrices(cycle, range(dim), dim, z)
    return Rep(
        graph=subgraph(g, cycle.edges), dim=dim, vertex_mats=vertex_mats, edge_mats=edge_mats,
        z_params={cycle.base: z},
        basis_labels=[f"cycle:{cycle.base}:{v}" for v in cycle.vertices],
    )


def slot_layout(cycles: Sequence[Cycle], forest: Optional[Graph], shared: Sequence[str]) -> SlotLayout:
    """Explicit index maps for the glued construction."""
    shared_set = set(shared)
    forest_paths = _forest_paths(forest) if forest is not None else []
    shared_index = {v: i for i, v in enumerate(shared)}

    off_cycle = [p for p in forest_paths if not (p.is_trivial and p.base in shared_set)]
    k = len(forest_paths)
    count = len(shared)
    forest_slots: Dict[Path, int] = {p: i for i, p in enumerate(off_cycle)}
    for v, i in shared_index.items():
        forest_slots[Path.trivial(v)] = k - count + i

    cycle_slots: Dict[str, Tuple[int, ...]] = {}
    next_tail = k
    for cycle in cycles:
        positions = []
        for v in cycle.vertices:
            if v in shared_set:
                positions.append(k - count + shared_index[v])
            else:
                positions.append(next_tail)
                next_tail += 1
        cycle_slots[cycle.base] = tuple(positions)
    return SlotLayout(forest_slots=forest_slots, cycle_slots=cycle_slots, k=k, shared_count=count, dim=next_tail)


def _glued_rep(
    g: Graph, cycles: Sequence[Cycle], forest: Optional[Graph], shared: Sequence[str],
    z_assign: Mapping[str, complex], tolerances: ToleranceConfig,
) -> Rep:
    layout = slot_layout(cycles, forest, shared)
    dim = layout.dim
    vertex_mats: Dict[str, np.ndarray] = {}
    edge_mats: Dict[str, np.ndarray] = {}
    labels = [""] * dim

    if forest is not None:
        forest_vertices, forest_edges = _forest_matrices(forest, layout.forest_slots, dim)
        vertex_mats.update(forest_vertices)
        edge_mats.update(forest_edges)
        for path, slot in layout.forest_slots.items():
            labels[slot] = _path_label(path)

    z_params: Dict[str, complex] = {}
    for cycle in cycles:
        z = complex(z_assign[cycle.base])
        _check_modulus(z, tolerances)
        z_params[cycle.base] = z
        positions = layout.cycle_slots[cycle.base]
        cycle_vertices_mats, cycle_edge_mats = _cycle_matrices(cycle, positions, dim, z)
        vertex_mats.update(cycle_vertices_mats)
        edge_mats.update(cycle_edge_mats)
        for v, slot in zip(cycle.vertices, positions):
            if not labels[slot]:
                labels[slot] = f"cycle:{cycle.base}:{v}"

    return Rep(
        graph=g, dim=dim, vertex_mats=vertex_mats, edge_mats=edge_mats,
        z_params=z_params, basis_labels=labels,
    )


def no_entry_rep(
    g: Graph, d: Decomposition, z_assign: Mapping[str, complex],
    tolerances: ToleranceConfig = DEFAULT_TOLERANCES,
) -> Rep:
    """
    Glued representation of C*(G) on dimension k + sum N_mu - I.

    The forest G2 acts through its path-basis representation, each cycle
    through rho_{mu,z}, and both send a shared vertex to the same rank-one
    slot.

    Args:
        g: Graph in which no cycle has an entry
        d: decompose(g)
        z_assign: cycle base vertex -> unit complex number
    """
    rep = _glued_rep(g, d.cycles, d.g2, d.shared, z_assign, tolerances)
    logger.debug(f"Built glued representation of dimension {rep.dim}")
    return rep


def cycle_sum_rep(
    g: Graph, cycles: Sequence[Cycle], z_assign: Mapping[str, complex],
    tolerances: ToleranceConfig = DEFAULT_TOLERANCES,
) -> Rep:
    """Direct sum of rho_{mu,z} over the cycles of a graph made only of cycles (k = 0, I = 0)."""
    return _glued_rep(g, cycles, None, (), z_assign, tolerances)


def synthesize_rep(g: Graph, z: complex, tolerances: ToleranceConfig = DEFAULT_TOLERANCES) -> Rep:
    """
    Dispatch to the construction that fits the shape of g.

    Acyclic graphs get acyclic_rep, graphs made only of cycles get
    cycle_sum_rep, and mixed graphs get no_entry_rep; every cycle uses z.
    """
    cycles = find_cycles(g)
    if not cycles:
        return acyclic_rep(g)
    on_cycle = {v for c in cycles for v in c.vertices}
    z_assign = {c.base: z for c in cycles}
    if on_cycle == g.vertex_set:
        return cycle_sum_rep(g, cycles, z_assign, tolerances)
    return no_entry_rep(g, decompose(g), z_assign, tolerances)


def roots_of_unity(m: int) -> List[complex]:
    """z_j = exp(2 pi i j / m) for j = 0 .. m-1."""
    if m < 1:
        raise enhance_error(ErrorCode.INVALID_PARAMETER, f"z-count must be positive, got {m}")
    return [complex(np.exp(2j * np.pi * j / m)) for j in range(m)]


def build_family(
    g: Graph, zs: Sequence[complex],
    tolerances: ToleranceConfig = DEFAULT_TOLERANCES, max_workers: int = MAX_PARALLEL_REPS,
) -> List[Rep]:
    """
    One synthesized Rep per z, in the order of zs.

    Acyclic graphs have z-independent representations, so their family is a
    single Rep.
    """
    if not no_cycle_has_entry(g).holds:
        raise enhance_error(ErrorCode.ENTRY_PRESENT, "No separating family exists when a cycle has an entry")
    if not cycle_vertices(g):
        return [acyclic_rep(g)]
    if not zs:
        raise enhance_error(ErrorCode.EMPTY_FAMILY, "No z values given")
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(lambda z: synthesize_rep(g, z, tolerances), zs))


def rep_direct_sum(reps: Sequence[Rep]) -> Rep:
    """
    Block-diagonal sum of representations of the same graph.

    Raises:
        PreconditionError: EmptyFamily; GraphMismatch
    """
    if not reps:
        raise enhance_error(ErrorCode.EMPTY_FAMILY, "Cannot sum an empty family")
    if len(reps) == 1:
        return reps[0]
    graph = reps[0].graph
    if any(r.graph != graph for r in reps):
        raise enhance_error(ErrorCode.GRAPH_MISMATCH, "All summands must represent the same graph")

    dim = sum(r.dim for r in reps)
    offsets = np.cumsum([0] + [r.dim for r in reps])

    def block_diag(mats: Sequence[np.ndarray]) -> np.ndarray:
        out = np.zeros((dim, dim), dtype=complex)
        for offset, mat in zip(offsets, mats):
            size = mat.shape[0]
            out[offset:offset + size, offset:offset + size] = mat
        return out

    labels = [f"{i}/{label}" for i, r in enumerate(reps) for label in r.basis_labels]
    z_params = {f"{i}/{base}": z for i, r in enumerate(reps) for base, z in r.z_params.items()}
    return Rep(
        graph=graph, dim=dim,
        vertex_mats={v: block_diag([r.vertex_mats[v] for r in reps]) for v in graph.vertices},
        edge_mats={e: block_diag([r.edge_mats[e] for r in reps]) for e in graph.edge_ids},
        z_params=z_params, basis_labels=labels,
    )


# ====================================================================
# EVALUATION AND CHECKS
# ====================================================================

def _path_matrix(rep: Rep, path: Path, cache: Dict[Path, np.ndarray]) -> np.ndarray:
    """rho(s_mu) = M_{e_n} ... M_{e_1}; the trivial path gives the vertex matrix."""
    if path in cache:
        return cache[path]
    if path.is_trivial:
        try:
            result = rep.vertex_mats[path.base]
        except KeyError:
            raise enhance_error(ErrorCode.UNKNOWN_GENERATOR, f"Vertex '{path.base}' is not represented") from None
    else:
        last = path.edges[-1]
        if last not in rep.edge_mats:
            raise enhance_error(ErrorCode.UNKNOWN_GENERATOR, f"Edge '{last}' is not represented")
        head = Path(path.base, path.edges[:-1], rep.graph.src(last)) if path.length > 1 else Path.trivial(path.base)
        prefix = _path_matrix(rep, head, cache) if path.length > 1 else None
        result = rep.edge_mats[last] if prefix is None else rep.edge_mats[last] @ prefix
    cache[path] = result
    return result


def evaluate_monomial(rep: Rep, m: Monomial, cache: Optional[Dict[Path, np.ndarray]] = None) -> np.ndarray:
    cache = {} if cache is None else cache
    return _path_matrix(rep, m.mu, cache) @ _path_matrix(rep, m.nu, cache).conj().T


def evaluate(rep: Rep, x: SymElement) -> np.ndarray:
    """rho(x) = sum coeff * rho(s_mu) rho(s_nu)*."""
    cache: Dict[Path, np.ndarray] = {}
    result = np.zeros((rep.dim, rep.dim), dtype=complex)
    for m, c in x.items():
        result = result + complex(c) * evaluate_monomial(rep, m, cache)
    return result


def oracle_residual(rep: Rep, x: SymElement) -> float:
    """Operator-norm distance between rho(x) and rho(normal_form(x))."""
    return float(np.linalg.norm(evaluate(rep, x) - evaluate(rep, normal_form(x)), 2))


@dataclass
class CKReport:
    """Operator-norm deviations from each Cuntz-Krieger relation and from unitality."""
    residuals: Dict[str, float]
    unit_residual: float
    tolerance: float

    @property
    def max_residual(self) -> float:
        return max([self.unit_residual, *self.residuals.values()])

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    def failing(self) -> List[str]:
        failed = [name for name, value in sorted(self.residuals.items()) if value > self.tolerance]
        if self.unit_residual > self.tolerance:
            failed.append("unit")
        return failed

    def to_dict(self) -> Dict[str, Any]:
        return {
            "max_residual": self.max_residual,
            "unit_residual": self.unit_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "failing": self.failing(),
        }


def _norm(mat: np.ndarray) -> float:
    return float(np.linalg.norm(mat, 2)) if mat.size else 0.0


def check_ck(rep: Rep, tolerance: float = DEFAULT_TOLERANCES.construction) -> CKReport:
    """
    Residuals of relations (1)-(4) and of sum p_v = 1.

    Relation (4) is measured at every regular vertex of rep.graph.
    """
    g = rep.graph
    residuals: Dict[str, float] = {}
    p = rep.vertex_mats
    s = rep.edge_mats
    for v in g.vertices:
        residuals[f"(1) projection {v}"] = max(_norm(p[v] @ p[v] - p[v]), _norm(p[v] - p[v].conj().T))
    vertices = list(g.vertices)
    for i, v in enumerate(vertices):
        for w in vertices[i + 1:]:
            residuals[f"(2) orthogonal {v} {w}"] = _norm(p[v] @ p[w])
    for e in g.edges:
        residuals[f"(3) isometry {e.id}"] = _norm(s[e.id].conj().T @ s[e.id] - p[e.src])
    for v in g.vertices:
        if g.is_regular(v):
            total = sum((s[eid] @ s[eid].conj().T for eid in g.in_edges(v)), np.zeros_like(p[v]))
            residuals[f"(4) cuntz-krieger {v}"] = _norm(p[v] - total)
    unit = sum(p.values(), np.zeros((rep.dim, rep.dim), dtype=complex))
    return CKReport(residuals=residuals, unit_residual=_norm(unit - rep.identity()), tolerance=tolerance)


@dataclass
class SeparationReport:
    """Numerical rank of the truncated monomial basis under a family."""
    rank: int
    expected: int
    truncation: int
    zs: List[complex]
    singular_values: List[float]
    threshold: float
    z_independent: bool = False

    @property
    def separated(self) -> bool:
        return self.rank == self.expected

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rank": self.rank,
            "expected": self.expected,
            "separated": self.separated,
            "truncation": self.truncation,
            "zcount": len(self.zs),
            "threshold": self.threshold,
            "smallest_singular_value": min(self.singular_values) if self.singular_values else 0.0,
            "z_independent": self.z_independent,
        }


def separation_rank(
    family: Sequence[Rep], basis: Sequence[Monomial], rank_relative: float,
) -> Tuple[int, List[float], float]:
    """
    Rank of the matrix whose rows are the flattened images of the basis monomials.

    Singular values below rank_relative times the largest one count as zero.
    """
    if not basis:
        return 0, [], 0.0
    caches: List[Dict[Path, np.ndarray]] = [{} for _ in family]
    rows = []
    for m in basis:
        images = [evaluate_monomial(rep, m, cache).ravel() for rep, cache in zip(family, caches)]
        rows.append(np.concatenate(images))
    singular = np.linalg.svd(np.array(rows), compute_uv=False)
    threshold = rank_relative * float(singular[0]) if singular.size else 0.0
    rank = int(np.sum(singular > threshold))
    return rank, [float(x) for x in singular], threshold


def separation_check(
    g: Graph, truncation: int, zs: Sequence[complex],
    tolerances: ToleranceConfig = DEFAULT_TOLERANCES, family: Optional[Sequence[Rep]] = None,
) -> SeparationReport:
    """
    Injectivity of the family over zs on the span of basis_monomials(g, L).

    Raises:
        PreconditionError: EntryPresent; TooFewPoints when g has cycles and
        fewer than 2L+1 points are given
    """
    if not no_cycle_has_entry(g).holds:
        raise enhance_error(ErrorCode.ENTRY_PRESENT, "Separation needs a graph in which no cycle has an entry")
    zs = [complex(z) for z in zs]
    if len(set(zs)) != len(zs):
        raise enhance_error(ErrorCode.INVALID_PARAMETER, "z values must be distinct")
    has_cycles = bool(cycle_vertices(g))
    if has_cycles and len(zs) < default_zcount(truncation):
        raise enhance_error(
            ErrorCode.TOO_FEW_POINTS,
            f"{len(zs)} points given, at least {default_zcount(truncation)} needed for L = {truncation}",
        )
    if family is None:
        family = build_family(g, zs, tolerances)
    basis = basis_monomials(g, truncation)
    rank, singular, threshold = separation_rank(family, basis, tolerances.rank_relative)
    report = SeparationReport(
        rank=rank, expected=len(basis), truncation=truncation, zs=list(zs),
        singular_values=singular, threshold=threshold, z_independent=not has_cycles,
    )
    logger.debug(f"Separation rank {rank} of {len(basis)} at L = {truncation}, m = {len(zs)}")
    return report


# ====================================================================
# SERIALIZATION
# ====================================================================

def matrix_to_json(mat: np.ndarray) -> List[List[List[float]]]:
    return [[[float(x.real), float(x.imag)] for x in row] for row in mat]


def matrix_from_json(data: Sequence[Sequence[Sequence[float]]]) -> np.ndarray:
    mat = np.array([[complex(re, im) for re, im in row] for row in data], dtype=complex)
    return mat.reshape(len(data), len(data[0]) if data else 0)


def rep_to_json(rep: Rep) -> Dict[str, Any]:
    return {
        "dim": rep.dim,
        "basis_labels": list(rep.basis_labels),
        "z_params": {base: [z.real, z.imag] for base, z in sorted(rep.z_params.items())},
        "vertices": {v: matrix_to_json(rep.vertex_mats[v]) for v in sorted(rep.vertex_mats)},
        "edges": {e: matrix_to_json(rep.edge_mats[e]) for e in sorted(rep.edge_mats)},
    }


def rep_from_json(g: Graph, data: Mapping[str, Any]) -> Rep:
    return Rep(
        graph=g,
        dim=int(data["dim"]),
        vertex_mats={v: matrix_from_json(m) for v, m in data["vertices"].items()},
        edge_mats={e: matrix_from_json(m) for e, m in data["edges"].items()},
        z_params={base: complex(re, im) for base, (re, im) in data.get("z_params", {}).items()},
        basis_labels=list(data.get("basis_labels", [])),
    )
