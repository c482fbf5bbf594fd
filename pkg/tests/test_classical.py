"""graph6 codec, the theta-bar SDP family, brute-force oracles, and the
classical characteristic graph."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nctheta.classical import (
    LOVASZ,
    SCHRIJVER,
    SZEGEDY,
    ThetaVariant,
    chromatic_number,
    classical_char_graph,
    classical_theta,
    clique_number,
    encode_graph6,
    graph_from_json,
    graph_to_json,
    parse_graph6,
)
from nctheta.ncgraph import ClassicalGraph, complete_graph

# independently decoded fixture (external graph6 reader), frozen:
FIXTURE_G6 = "GRddY{"
FIXTURE_EDGES = [(0, 2), (0, 4), (0, 6), (1, 3), (1, 5), (1, 7), (2, 3),
                 (2, 5), (2, 6), (3, 4), (3, 7), (4, 6), (4, 7), (5, 6),
                 (5, 7), (6, 7)]


def cycle(n):
    return ClassicalGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


# --- graph6 -------------------------------------------------------------------

def test_graph6_trivial_strings():
    g = parse_graph6("@")
    assert g.n == 1 and not g.edges
    g = parse_graph6("A_")
    assert g.n == 2 and g.edges == [(0, 1)]


def test_graph6_fixture_edges():
    g = parse_graph6(FIXTURE_G6)
    assert g.n == 8
    assert sorted(g.edges) == FIXTURE_EDGES


def test_graph6_header_prefix_and_errors():
    assert parse_graph6(">>graph6<<A_").edges == [(0, 1)]
    with pytest.raises(ValueError):
        parse_graph6("")
    with pytest.raises(ValueError):
        parse_graph6("A")  # truncated body
    with pytest.raises(ValueError):
        parse_graph6("A\x19")  # non-printable byte


@settings(deadline=None, max_examples=60)
@given(st.integers(1, 12), st.randoms(use_true_random=False))
def test_graph6_round_trip(n, rnd):
    rng = np.random.default_rng(rnd.randint(0, 2**31))
    a = np.triu(rng.random((n, n)) < 0.4, 1)
    g = ClassicalGraph(n, a | a.T)
    h = parse_graph6(encode_graph6(g))
    assert h.n == g.n and np.array_equal(h.adjacency, g.adjacency)


def test_graph_json_round_trip():
    g = cycle(5)
    h = graph_from_json(graph_to_json(g))
    assert np.array_equal(h.adjacency, g.adjacency)


# --- theta-bar ----------------------------------------------------------------

def test_theta_bar_edgeless():
    g = ClassicalGraph.from_edges(4, [])
    for var in ThetaVariant.ALL:
        assert abs(classical_theta(g, var).value - 1.0) < 1e-6


def test_theta_bar_complete_graphs():
    for n in range(2, 6):
        for var in ThetaVariant.ALL:
            r = classical_theta(complete_graph(n), var)
            assert abs(r.value - n) < 1e-6


def test_theta_bar_c5_is_sqrt5():
    # theta-bar of the 5-cycle (= Lovasz theta of its complement, also C5)
    r = classical_theta(cycle(5), LOVASZ)
    assert abs(r.value - np.sqrt(5.0)) < 1e-6


def test_theta_bar_fixture_values():
    g = parse_graph6(FIXTURE_G6)
    for var, expected in ((SCHRIJVER, 3.236), (LOVASZ, 3.302),
                          (SZEGEDY, 3.338)):
        r = classical_theta(g, var)
        assert abs(r.value - expected) < 5e-3


@pytest.mark.parametrize("seed", range(6))
def test_theta_bar_sandwich(seed):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(3, 8))
    a = np.triu(rng.random((n, n)) < 0.5, 1)
    g = ClassicalGraph(n, a | a.T)
    lo = classical_theta(g, SCHRIJVER).value
    mid = classical_theta(g, LOVASZ).value
    hi = classical_theta(g, SZEGEDY).value
    assert clique_number(g) <= lo + 1e-6
    assert lo <= mid + 1e-6
    assert mid <= hi + 1e-6
    assert hi <= chromatic_number(g) + 1e-6


def test_theta_bar_gap_reported():
    r = classical_theta(cycle(5), LOVASZ)
    assert r.gap is not None and r.gap < 1e-6
    assert r.witness is not None


# --- brute-force oracles ------------------------------------------------------

def test_clique_and_chromatic():
    assert clique_number(complete_graph(5)) == 5
    assert chromatic_number(complete_graph(5)) == 5
    assert clique_number(cycle(5)) == 2
    assert chromatic_number(cycle(5)) == 3
    edgeless = ClassicalGraph.from_edges(4, [])
    assert clique_number(edgeless) == 1
    assert chromatic_number(edgeless) == 1
    with pytest.raises(ValueError):
        clique_number(ClassicalGraph.from_edges(13, []))


# --- characteristic graph -----------------------------------------------------

def test_char_graph_no_side_information():
    n = 4
    p = np.zeros((n, 1, n))
    for i in range(n):
        p[i, 0, i] = 1.0
    res = classical_char_graph(p)
    assert res.codable
    assert np.array_equal(res.graph.adjacency, complete_graph(n).adjacency)


def test_char_graph_perfect_side_information():
    n = 3
    p = np.zeros((n, n, n))
    for i in range(n):
        p[i, i, i] = 1.0
    res = classical_char_graph(p)
    assert res.codable
    assert not res.graph.edges


def test_char_graph_loops_detected():
    # same symbol emitted with the same side info under two inputs -> loop
    p = np.zeros((2, 1, 2))
    p[0, 0, 0] = 1.0
    p[0, 0, 1] = 0.5
    p[1, 0, 1] = 0.5
    res = classical_char_graph(p)
    assert 0 in res.loop_vertices
    assert not res.codable
