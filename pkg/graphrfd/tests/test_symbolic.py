import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from graphrfd.core.error_handler import GraphRFDError
from graphrfd.core.graph import (
    Path, count_paths_from, find_cycles, host_cycle, longest_path_length, no_cycle_has_entry, sources,
)
from graphrfd.core.symbolic import (
    I_UNIT, GaussRational, Monomial, adjoint, basis_monomials, element_from_json, element_to_json, gen_edge,
    gen_vertex, is_normal_monomial, is_zero, multiply, normal_form, path_element, trace_obstruction, zero,
)
from graphrfd.corpus import random_element, random_graph, random_no_entry_graph

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_gauss_rational_arithmetic():
    a = GaussRational(Fraction(1, 2), Fraction(-3, 4))
    assert a.to_json() == ["1", "2", "-3", "4"]
    assert GaussRational.from_json(a.to_json()) == a
    assert a * a.conjugate() == GaussRational(Fraction(13, 16))
    assert I_UNIT * I_UNIT == GaussRational.of(-1)
    assert not GaussRational()


def test_monomial_requires_common_source(edge_graph):
    with pytest.raises(ValueError):
        Monomial(Path.trivial("v"), Path.trivial("w"))


def test_isometry_relation(loop_graph, edge_graph):
    for g in (loop_graph, edge_graph):
        s = gen_edge(g, "e")
        assert multiply(adjoint(s), s) == gen_vertex(g, "v")


def test_cuntz_krieger_relation_reduces(loop_graph, edge_graph, entry_graph):
    assert is_zero(gen_vertex(loop_graph, "v") - multiply(gen_edge(loop_graph, "e"), adjoint(gen_edge(loop_graph, "e"))))
    assert is_zero(gen_vertex(edge_graph, "w") - multiply(gen_edge(edge_graph, "e"), adjoint(gen_edge(edge_graph, "e"))))
    s_e2 = gen_edge(entry_graph, "e2")
    s_f = gen_edge(entry_graph, "f")
    p_v1 = gen_vertex(entry_graph, "v1")
    assert is_zero(p_v1 - multiply(s_e2, adjoint(s_e2)) - multiply(s_f, adjoint(s_f)))
    assert not is_zero(p_v1 - multiply(s_e2, adjoint(s_e2)))


def test_mismatched_junction_is_zero(edge_graph):
    s = gen_edge(edge_graph, "e")
    assert len(multiply(s, s)) == 0
    assert len(multiply(gen_vertex(edge_graph, "v"), gen_vertex(edge_graph, "w"))) == 0


def test_orthogonal_ranges(entry_graph):
    # s_e* s_f = 0 for distinct edges
    assert len(multiply(adjoint(gen_edge(entry_graph, "e2")), gen_edge(entry_graph, "f"))) == 0


def test_cycle_word(loop_graph):
    s = gen_edge(loop_graph, "e")
    word = multiply(s, s)
    assert word == path_element(loop_graph, Path.of_edges(loop_graph, ("e", "e")))


def test_normal_form_of_special_pair(hexagon_with_exits):
    # c6 is the only edge into P1, so s_c6 s_c6* = p_P1
    s = gen_edge(hexagon_with_exits, "c6")
    assert normal_form(multiply(s, adjoint(s))) == gen_vertex(hexagon_with_exits, "P1")


class TestBasis:
    def test_loop(self, loop_graph):
        assert len(basis_monomials(loop_graph, 1)) == 3
        assert len(basis_monomials(loop_graph, 2)) == 5

    def test_edge(self, edge_graph):
        basis = basis_monomials(edge_graph, 1)
        assert len(basis) == 4
        assert all(is_normal_monomial(edge_graph, m) for m in basis)

    def test_zero_bound_gives_vertex_projections(self, hexagon_with_exits):
        basis = basis_monomials(hexagon_with_exits, 0)
        assert [m.mu.base for m in basis] == sorted(hexagon_with_exits.vertices)
        assert all(m.mu.is_trivial and m.nu.is_trivial for m in basis)

    def test_negative_bound(self, loop_graph):
        with pytest.raises(GraphRFDError):
            basis_monomials(loop_graph, -1)

    def test_acyclic_dimension(self):
        rng = random.Random(5)
        for _ in range(100):
            g = random_no_entry_graph(rng, max_vertices=6, max_edges=8, max_cycles=0)
            expected = sum(count_paths_from(g, t) ** 2 for t in sources(g))
            assert len(basis_monomials(g, longest_path_length(g))) == expected


class TestObstruction:
    def test_entry_graph(self, entry_graph):
        obstruction = trace_obstruction(entry_graph, host_cycle(entry_graph, "f"))
        assert obstruction.entries == ("f",)
        assert is_zero(obstruction.identity)
        assert not is_zero(obstruction.entry_term)

    def test_random_graphs_with_entries(self):
        rng = random.Random(17)
        checked = 0
        for _ in range(200):
            g = random_graph(rng, max_vertices=5, max_edges=7)
            verdict = no_cycle_has_entry(g)
            if verdict.holds:
                continue
            obstruction = trace_obstruction(g, host_cycle(g, verdict.witness))
            assert verdict.witness in obstruction.entries
            assert is_zero(obstruction.identity)
            assert not is_zero(obstruction.entry_term)
            checked += 1
        assert checked > 20

    def test_no_entry_cycle_has_empty_entry_term(self, loop_with_exits):
        (cycle,) = find_cycles(loop_with_exits)
        obstruction = trace_obstruction(loop_with_exits, cycle)
        assert obstruction.entries == ()
        assert obstruction.entry_term == zero(loop_with_exits)
        assert is_zero(obstruction.identity)


def test_element_json(hexagon_with_exits):
    cross = gen_edge(hexagon_with_exits, "g1") @ adjoint(gen_edge(hexagon_with_exits, "g2"))
    x = cross.scale(GaussRational(Fraction(1, 3), Fraction(-2))) + gen_vertex(hexagon_with_exits, "P3")
    data = element_to_json(x)
    assert {"mu", "nu", "mu_base", "nu_base", "coeff"} <= set(data[0])
    assert element_from_json(hexagon_with_exits, data) == x


def _check_confluence(rng):
    g = random_graph(rng, max_vertices=6, max_edges=8)
    x = random_element(rng, g, terms=5)
    reference = normal_form(x)
    for _ in range(3):
        assert normal_form(x, rng=random.Random(rng.random())) == reference


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_confluence(seed):
    _check_confluence(random.Random(seed))


def _check_ring_axioms(rng):
    g = random_graph(rng, max_vertices=4, max_edges=6)
    x, y, z = (random_element(rng, g, terms=3) for _ in range(3))
    assert normal_form((x @ y) @ z) == normal_form(x @ (y @ z))
    assert normal_form(x @ (y + z)) == normal_form(x @ y + x @ z)
    assert normal_form((x + y) @ z) == normal_form(x @ z + y @ z)


def _check_involution(rng):
    g = random_graph(rng, max_vertices=5, max_edges=7)
    x, y = random_element(rng, g), random_element(rng, g)
    assert normal_form(adjoint(x)) == adjoint(normal_form(x))
    assert adjoint(adjoint(x)) == x
    assert adjoint(x @ y) == adjoint(y) @ adjoint(x)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_ring_axioms(seed):
    _check_ring_axioms(random.Random(seed))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_involution(seed):
    _check_involution(random.Random(seed))


@pytest.mark.slow
def test_algebra_laws_on_many_triples():
    rng = random.Random(1000)
    for _ in range(1000):
        _check_confluence(rng)
        _check_ring_axioms(rng)
        _check_involution(rng)
