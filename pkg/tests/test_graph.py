import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphgap.corpus import make_balloon, make_interval, make_random_graph, make_star4, make_star15
from graphgap.eigen import eigenvalues
from graphgap.graph import (
    DIRICHLET,
    STANDARD,
    GraphError,
    PointOnGraph,
    canonical_form,
    dist_to_dirichlet,
    distance,
    dump_graph,
    insert_artificial_vertex,
    make_graph,
    metrics,
    parse_graph,
    suppress_artificial,
    vertex_point,
)

STAR4_DOC = {
    "vertices": [
        {"id": "c", "bc": "standard"},
        {"id": "d1", "bc": "dirichlet"},
        {"id": "d2", "bc": "dirichlet"},
        {"id": "d3", "bc": "dirichlet"},
        {"id": "d4", "bc": "dirichlet"},
    ],
    "edges": [
        {"id": "l1", "from": "c", "to": "d1", "length": "1"},
        {"id": "l2", "from": "c", "to": "d2", "length": "1"},
        {"id": "s1", "from": "c", "to": "d3", "length": "0.5"},
        {"id": "s2", "from": "c", "to": "d4", "length": 0.5},
    ],
}


def test_parse_interval():
    g = parse_graph(
        '{"vertices": [{"id": "a", "bc": "dirichlet"}, {"id": "b", "bc": "dirichlet"}],'
        ' "edges": [{"id": "e", "from": "a", "to": "b", "length": "1"}]}'
    )
    assert (g.V, g.E) == (2, 1)


def test_parse_star4():
    g = parse_graph(json.dumps(STAR4_DOC))
    assert g.V == 5 and len(g.dirichlet) == 4 and g.E == 4
    assert sorted(g.lengths) == [0.5, 0.5, 1.0, 1.0]
    assert [v.id for v in g.vertices] == ["c", "d1", "d2", "d3", "d4"]


def test_decimal_lengths_full_precision():
    doc = json.loads(json.dumps(STAR4_DOC))
    doc["edges"][0]["length"] = "0.1000000000000000055511151231257827"
    assert parse_graph(json.dumps(doc)).edges[0].length == 0.1


@pytest.mark.parametrize(
    "mutate, msg",
    [
        (lambda d: d["vertices"].append({"id": "x", "bc": "dirichlet"}) or d["edges"].append(
            {"id": "y", "from": "x", "to": "d1", "length": 1}), "degree"),
        (lambda d: d["edges"].append({"id": "y", "from": "c", "to": "nowhere", "length": 1}), "unknown vertex"),
        (lambda d: d["edges"][0].update(length=0), "nonpositive"),
        (lambda d: d["edges"][0].update(length="abc"), "invalid length"),
        (lambda d: d["vertices"].append({"id": "lonely"}), "not connected"),
        (lambda d: d["vertices"][0].update(bc="robin"), "bc must be"),
        (lambda d: d.update(extra=1), "unknown top-level"),
        (lambda d: d.pop("edges"), "must both be arrays"),
        (lambda d: d["edges"].append(dict(d["edges"][0])), "duplicate edge"),
    ],
)
def test_parse_errors(mutate, msg):
    doc = json.loads(json.dumps(STAR4_DOC))
    mutate(doc)
    with pytest.raises(GraphError, match=msg):
        parse_graph(json.dumps(doc))


def test_not_json():
    with pytest.raises(GraphError):
        parse_graph("vertices: []")


def test_roundtrip():
    g = make_random_graph(7, beta=2, seed=3).graph
    h = parse_graph(dump_graph(g))
    assert h.vertices == g.vertices and h.edges == g.edges


def test_metrics_interval():
    m = metrics(make_interval(1.0, "DN").graph)
    assert (m.L, m.diameter, m.beta) == (1.0, 1.0, 0)
    assert m.girth == math.inf and not m.girth_finite


def test_metrics_star4():
    m = metrics(make_star4(0.5).graph)
    assert m.L == 3.0 and m.ell0 == 0.5 and m.ellmax == 1.0
    assert m.diameter == pytest.approx(2.0, abs=1e-15)
    # the two short Dirichlet edges close up into a cycle of length 2a
    assert m.girth == pytest.approx(1.0, abs=1e-15)
    assert (m.V_N, m.V_0) == (1, 4)


def test_metrics_balloon():
    m = metrics(make_balloon(6).graph)
    assert (m.E, m.V, m.beta, m.L) == (7, 3, 5, 7.0)
    assert m.girth == 2.0 and m.has_cycle


def test_metrics_self_loop():
    g = make_graph({"a": DIRICHLET, "b": STANDARD}, [("e", "a", "b", 1.0), ("o", "b", "b", 0.6)])
    m = metrics(g)
    assert m.girth == pytest.approx(0.6) and m.beta == 1
    # farthest points: the Dirichlet end and the middle of the loop
    assert m.diameter == pytest.approx(1.3)


def test_insert_and_suppress():
    g = make_interval(1.0, "DD").graph
    h = insert_artificial_vertex(g, PointOnGraph("e", 0.5))
    assert sorted(h.lengths) == [0.5, 0.5] and h.total_length == 1.0
    h = insert_artificial_vertex(g, PointOnGraph("e", 0.25))
    assert sorted(h.lengths) == [0.25, 0.75]
    assert h.is_artificial(h.vertices[-1].id)
    s = suppress_artificial(h)
    assert s.E == 1 and s.edges[0].length == 1.0
    assert suppress_artificial(s) is s
    for x in (0.0, 1.0):
        with pytest.raises(GraphError):
            insert_artificial_vertex(g, PointOnGraph("e", x))


def test_distance_examples():
    g = make_interval(1.0, "DD").graph
    assert distance(g, PointOnGraph("e", 0.2), PointOnGraph("e", 0.9)) == pytest.approx(0.7)
    s = make_star15(5).graph
    assert dist_to_dirichlet(s, vertex_point(s, "c")) == 1.0
    assert dist_to_dirichlet(s, PointOnGraph("long", 0.0)) == 0.0
    with pytest.raises(GraphError):
        dist_to_dirichlet(make_interval(2.0, "NN").graph, PointOnGraph("e", 1.0))


graph_seeds = st.tuples(st.integers(4, 9), st.integers(0, 3), st.integers(0, 10**6))


def _graph(t):
    E, beta, seed = t
    return make_random_graph(E, beta=min(beta, E - 3), seed=seed).graph


def _point(g, u, v):
    e = g.edges[int(u * g.E) % g.E]
    return PointOnGraph(e.id, v * e.length)


@given(graph_seeds, st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=3, max_size=3))
def test_distance_metric_axioms(t, raw):
    g = _graph(t)
    p, q, r = (_point(g, u, v) for u, v in raw)
    dpq, dqp = distance(g, p, q), distance(g, q, p)
    assert dpq == pytest.approx(dqp, abs=1e-12)
    assert distance(g, p, r) <= dpq + distance(g, q, r) + 1e-12
    assert distance(g, p, p) == 0.0


@given(graph_seeds)
def test_metrics_invariants(t):
    g = _graph(t)
    m = metrics(g)
    assert m.L == math.fsum(g.lengths)
    assert m.ell0 <= m.ellmax <= m.L and m.diameter <= m.L + 1e-12
    assert m.beta == m.E - m.V + 1 >= 0
    assert m.diameter >= g.vertex_distances.max() - 1e-12
    if m.girth_finite:
        assert m.girth <= m.L


@given(graph_seeds, st.floats(0.05, 0.95), st.integers(0, 100))
def test_suppress_inverts_insert(t, frac, which):
    g = _graph(t)
    e = g.edges[which % g.E]
    h = insert_artificial_vertex(g, PointOnGraph(e.id, frac * e.length))
    assert canonical_form(suppress_artificial(h)) == canonical_form(suppress_artificial(g))


@given(graph_seeds, st.floats(0.05, 0.95), st.integers(0, 100))
def test_insert_preserves_spectrum(t, frac, which):
    g = _graph(t)
    e = g.edges[which % g.E]
    h = insert_artificial_vertex(g, PointOnGraph(e.id, frac * e.length))
    a, b = eigenvalues(g, 10).eigenvalues, eigenvalues(h, 10).eigenvalues
    assert np.max(np.abs(a - b) / a) <= 1e-9
