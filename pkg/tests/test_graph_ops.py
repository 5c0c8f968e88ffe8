import itertools
from collections import Counter

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from momentforge.errors import ArityError, NotConnectedError, ParseError, UnknownEdgeError
from momentforge.graph_ops import (
    MultiGraph,
    betti1,
    build_gp,
    canonical_form,
    collapses_onto,
    cycle_graph,
    is_homeomorphic,
    is_isomorphic,
    path_graph,
    predict_decorated,
    same_up_to_x_order,
    smooth_degree_two,
    theta_graph,
)

ANNULUS_GRAPH = MultiGraph((0, 1, 2, 3), ((0, 1), (1, 2), (1, 2), (2, 3)))


@pytest.mark.parametrize("nprime, j1, j2", [(0, 0, 0), (1, 1, 0), (1, 0, 1), (2, 1, 1), (3, 2, 1), (4, 0, 4)])
def test_gp_vertex_count(nprime, j1, j2):
    g = build_gp(nprime, j1, j2)
    assert g.n_vertices == 3 * nprime + 2
    assert betti1(g) == 0


def test_gp_attachment_points():
    g = build_gp(2, 1, 1)
    leaves = [v for v, d in g.degrees().items() if d == 1 and v > 6]
    attached = sorted(u if v in leaves else v for u, v in g.edges if u in leaves or v in leaves)
    assert attached == [3, 4]


def test_gp_families_differ():
    assert not is_isomorphic(build_gp(2, 2, 0), build_gp(2, 1, 1))
    assert is_isomorphic(build_gp(2, 2, 0), build_gp(2, 0, 2))


@pytest.mark.parametrize("args", [(2, 1, 0), (1, -1, 2), (-1, 0, -1)])
def test_gp_arity(args):
    with pytest.raises(ArityError):
        build_gp(*args)


def test_loops_are_rejected():
    with pytest.raises(ValueError):
        MultiGraph((0,), ((0, 0),))


def test_betti1():
    assert betti1(theta_graph(3)) == 2
    assert betti1(ANNULUS_GRAPH) == 1
    with pytest.raises(NotConnectedError):
        betti1(MultiGraph((0, 1, 2), ((0, 1),)))


def test_multi_edges_matter_for_isomorphism():
    assert not is_isomorphic(ANNULUS_GRAPH, MultiGraph((0, 1, 2, 3), ((0, 1), (1, 2), (2, 3), (1, 3))))


@given(st.permutations(list(range(5))))
@settings(max_examples=50)
def test_isomorphism_is_label_blind(perm):
    g = build_gp(1, 1, 0).relabeled()
    h = MultiGraph(tuple(perm[v] for v in g.vertices), tuple((perm[u], perm[v]) for u, v in g.edges))
    assert is_isomorphic(g, h)
    assert canonical_form(g) == canonical_form(h)


def test_tree_collapses_onto_edge():
    assert collapses_onto(build_gp(3, 2, 1), path_graph(2))


def test_collapse_keeps_cycle_rank():
    pendant = MultiGraph((0, 1, 2, 3, 4), ((0, 1), (1, 2), (1, 2), (2, 3), (1, 4)))
    assert collapses_onto(pendant, ANNULUS_GRAPH)
    assert not collapses_onto(pendant, path_graph(2))
    assert not collapses_onto(ANNULUS_GRAPH, pendant)


def test_smoothing_and_homeomorphism():
    assert is_homeomorphic(path_graph(5), path_graph(2))
    assert is_homeomorphic(cycle_graph(4), cycle_graph(2))
    assert not is_homeomorphic(cycle_graph(4), theta_graph(3))
    assert smooth_degree_two(cycle_graph(5)).n_vertices == 2


def test_text_form():
    text = path_graph(3).to_text()
    assert text == "V 3\n0 1\n1 2\n"
    assert is_isomorphic(MultiGraph.from_text(text), path_graph(3))


@pytest.mark.parametrize("text", ["", "E 3\n0 1", "V 2\n0 x"])
def test_bad_graph_text(text):
    with pytest.raises(ParseError):
        MultiGraph.from_text(text)


def test_dot_lists_parallel_edges():
    assert theta_graph(2).to_dot().count("0 -- 1;") == 2


def test_predict_decorated_counts():
    pendant = predict_decorated(path_graph(2), [{"edge": 0, "kind": "pendant"}])
    chord = predict_decorated(path_graph(2), [{"edge": 0, "kind": "chord"}])
    both = predict_decorated(ANNULUS_GRAPH, [{"edge": 1}, {"edge": 1, "kind": "chord"}])
    assert (pendant.n_vertices, pendant.n_edges) == (5, 4)
    assert (chord.n_vertices, chord.n_edges) == (4, 3)
    assert (both.n_vertices, both.n_edges) == (ANNULUS_GRAPH.n_vertices + 5, ANNULUS_GRAPH.n_edges + 5)
    assert is_homeomorphic(chord, path_graph(2))
    assert collapses_onto(pendant, path_graph(2))


def test_predict_decorated_unknown_edge():
    with pytest.raises(UnknownEdgeError):
        predict_decorated(path_graph(2), [{"edge": 1}])


def test_same_up_to_x_order():
    g = MultiGraph((0, 1, 2), ((0, 1), (1, 2)), (0.0, 1.0, 2.0))
    h = MultiGraph((5, 7, 9), ((7, 9), (5, 7)), (0.0, 1.0 + 1e-9, 2.0))
    swapped = MultiGraph((0, 1, 2), ((0, 2), (2, 1)), (0.0, 1.0, 2.0))
    assert same_up_to_x_order(g, h)
    assert not same_up_to_x_order(g, swapped)


def _brute_isomorphic(g: MultiGraph, h: MultiGraph) -> bool:
    if g.n_vertices != h.n_vertices:
        return False
    target = Counter(tuple(sorted(e)) for e in h.edges)
    for perm in itertools.permutations(h.vertices):
        mapping = dict(zip(g.vertices, perm))
        if Counter(tuple(sorted((mapping[u], mapping[v]))) for u, v in g.edges) == target:
            return True
    return False


@st.composite
def small_multigraphs(draw):
    n = draw(st.integers(2, 6))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1])
    edges = draw(st.lists(pairs, max_size=8))
    return MultiGraph(tuple(range(n)), tuple(edges))


@given(small_multigraphs(), small_multigraphs())
@settings(max_examples=150, deadline=None)
def test_isomorphism_agrees_with_bijection_search(g, h):
    assert is_isomorphic(g, h) == _brute_isomorphic(g, h)


@pytest.mark.parametrize("edges", [[1], [2], [1, 2], [0, 1, 3]])
def test_pendants_on_cycle_edges_collapse(edges):
    decorated = predict_decorated(ANNULUS_GRAPH, [{"edge": e} for e in edges])
    assert collapses_onto(decorated, ANNULUS_GRAPH)
    assert not collapses_onto(decorated, theta_graph(3))
