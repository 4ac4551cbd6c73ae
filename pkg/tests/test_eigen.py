import math

import numpy as np
import pytest
from _oracles import fem_extrapolated
from conftest import random_family
from hypothesis import given
from hypothesis import strategies as st

from graphgap.corpus import (
    make_balloon,
    make_equilateral_star,
    make_interval,
    make_random_graph,
    make_star4,
    make_star15,
    standard_corpus,
)
from graphgap.edgefunc import TrigPoly, dirichlet_energy, inner, integrate_term
from graphgap.eigen import (
    eigencount,
    eigenfunction,
    eigenvalues,
    secular_matrix,
    secular_smin,
)
from graphgap.graph import PointOnGraph, point_along

PI = math.pi


def test_smin_examples():
    g = make_interval(1.0, "DD").graph
    assert secular_smin(g, PI) < 1e-14
    assert secular_smin(g, PI / 2) > 0.1
    assert secular_smin(make_star4(0.5).graph, 2 * PI / 3) < 1e-14
    with pytest.raises(ValueError):
        secular_smin(g, 0.0)


def test_secular_matrix_shape_and_scaling():
    g = make_balloon(3).graph
    M = secular_matrix(g, 1.3)
    assert M.shape == (2 * g.E, 2 * g.E)
    assert np.allclose(np.linalg.norm(M, axis=1), 1.0)


def test_interval_spectrum():
    sp = eigenvalues(make_interval(1.0, "DD").graph, 5)
    assert np.allclose(sp.eigenvalues, [(k * PI) ** 2 for k in range(1, 6)], rtol=1e-10, atol=0)
    assert sp.certified and sp.weyl_ok


def test_closed_forms():
    for k in (1, 5, 40):
        r = math.atan(math.sqrt(2 * k + 1))
        sp = eigenvalues(make_star15(k).graph, 2)
        assert sp[0] == pytest.approx(r**2, rel=1e-10)
        assert sp[1] == pytest.approx((PI - r) ** 2, rel=1e-10)
    sp = eigenvalues(make_balloon(3).graph, 2)
    assert sp[1] / sp[0] == pytest.approx(25.0, rel=1e-9)
    for a in (1.0, 0.37):
        sp = eigenvalues(make_equilateral_star(3, a).graph, 3)
        assert sp[0] == pytest.approx(PI**2 / (4 * a * a), rel=1e-10)
        assert sp[1] == pytest.approx(PI**2 / (a * a), rel=1e-10)
        assert sp.multiplicity_of(1) == 2


def test_zero_eigenvalue_iff_no_dirichlet():
    sp = eigenvalues(make_interval(2.0, "NN").graph, 3)
    assert sp[0] == 0.0 and sp.multiplicity_of(0) == 1
    assert sp[1] == pytest.approx((PI / 2) ** 2, rel=1e-10)
    assert eigenvalues(make_interval(2.0, "DN").graph, 1)[0] > 0


@pytest.mark.parametrize("entry", random_family(12, seed=77), ids=lambda e: e.label)
def test_against_finite_elements(entry):
    sp = eigenvalues(entry.graph, 5)
    ref = fem_extrapolated(entry.graph, 5, 100)
    assert np.max(np.abs(sp.eigenvalues - ref) / np.maximum(ref, 1.0)) < 2e-5


def test_counting_function_at_scan_top():
    g = make_random_graph(8, beta=2, seed=5).graph
    sp = eigenvalues(g, 12)
    top = math.sqrt(sp[11]) * (1 + 1e-6)
    n, ok = eigencount(g, top)
    assert ok and n == 12
    assert abs(n - g.total_length * top / PI) <= g.E + g.V + 1


def test_certificate_matches_halved_grid():
    g = make_random_graph(6, beta=1, seed=2).graph
    a = eigenvalues(g, 10)
    b = eigenvalues(g, 10, grid_factor=16)
    assert np.allclose(a.eigenvalues, b.eigenvalues, rtol=1e-12)
    assert a.certified and b.certified


def test_bad_arguments():
    g = make_interval(1.0, "DD").graph
    with pytest.raises(ValueError):
        eigenvalues(g, 0)
    with pytest.raises(ValueError):
        eigenvalues(g, 1, tol=0.0)
    with pytest.raises(ValueError):
        eigenfunction(g, 2.0)
    with pytest.raises(ValueError):
        eigenfunction(g, PI, index=1)


def test_interval_ground_state():
    phi = eigenfunction(make_interval(1.0, "DD").graph, PI)
    (_, A, theta), = phi.records()
    assert A == pytest.approx(math.sqrt(2), rel=1e-12)
    assert theta == pytest.approx(0.0, abs=1e-12) or theta == pytest.approx(2 * PI, abs=1e-12)


def test_star4_ground_state_profile():
    a = 0.5
    g = make_star4(a).graph
    phi = eigenvalues(g, 1).eigenfunction(0)
    path = ("l1", "s1")
    # the coordinate runs from the Dirichlet end of a long edge to that of a short edge
    xs = np.linspace(0.05, 1 + a - 0.05, 23)
    ratios = []
    for x in xs:
        p = point_along(g, path, float(x))
        i = g.edge_index(p.edge)
        ratios.append(float(phi.value(i, p.position)) / math.sin(PI * x / (1 + a)))
    assert np.ptp(ratios) < 1e-10 and ratios[0] > 0


def test_star15_ground_state_profile():
    k = 5
    g = make_star15(k).graph
    phi = eigenvalues(g, 1).eigenfunction(0)
    s = math.atan(math.sqrt(2 * k + 1))
    c = math.sin(2 * s) / math.sin(s)
    scale = float(phi.value(g.edge_index("long"), 1.0)) / math.sin(s)
    for x in np.linspace(0.0, 3.0, 31):
        expect = math.sin(s * x) if x <= 2 else c * math.sin(s * (3 - x))
        p = point_along(g, ("long", "s3"), float(x))
        got = float(phi.value(g.edge_index(p.edge), p.position))
        assert got == pytest.approx(scale * expect, abs=1e-12)


@pytest.mark.parametrize("entry", standard_corpus(), ids=lambda e: e.label)
def test_eigenfunctions(entry):
    g = entry.graph
    sp = eigenvalues(g, 4)
    fs = [sp.eigenfunction(j) for j in range(4)]
    for j, f in enumerate(fs):
        assert max(f.residuals().values()) <= 1e-8
        assert inner(f, f) == pytest.approx(1.0, abs=1e-10)
        assert dirichlet_energy(f) == pytest.approx(sp[j], rel=1e-8, abs=1e-12)
        for h in fs[:j]:
            assert abs(inner(f, h)) <= 1e-10
    if g.has_dirichlet:
        assert sp.multiplicity_of(0) == 1
        phi = fs[0]
        for i, e in enumerate(g.edges):
            assert np.all(phi.value(i, np.linspace(0, e.length, 50)) >= -1e-12)


@given(
    st.integers(0, 3),
    st.floats(0.1, 40.0),
    st.sampled_from([0, 1]),
    st.floats(0.0, 2.0),
    st.floats(0.0, 2.0),
)
def test_closed_form_integrals(n, w, kind, x0, dx):
    from scipy.integrate import quad

    f = (math.cos if kind == 0 else math.sin)
    ref, _ = quad(lambda x: x**n * f(w * x), x0, x0 + dx, epsabs=1e-13, epsrel=1e-12, limit=200)
    got = integrate_term(n, w, kind, x0, x0 + dx)
    assert got == pytest.approx(ref, rel=1e-8, abs=1e-11)


def test_trigpoly_product():
    p = TrigPoly.wave(0.3, -1.2, 2.5)
    q = TrigPoly.affine(0.7, -0.2)
    xs = np.linspace(0, 1.3, 9)
    assert np.allclose((p * q)(xs), p(xs) * q(xs), atol=1e-14)
    assert np.allclose(p.derivative()(xs), 2.5 * (-0.3 * np.sin(2.5 * xs) - 1.2 * np.cos(2.5 * xs)))


def test_edge_extrema():
    g = make_star15(3).graph
    phi = eigenvalues(g, 1).eigenfunction(0)
    i = g.edge_index("long")
    mn, xmn, mx, xmx = phi.edge_extrema(i)
    xs = np.linspace(0, 2, 20001)
    vals = phi.value(i, xs)
    assert mx == pytest.approx(vals.max(), abs=1e-9) and mn == pytest.approx(vals.min(), abs=1e-12)
    assert phi.value(i, xmx) == pytest.approx(mx, abs=1e-15)


def test_point_along_roundtrip():
    g = make_star4(0.5).graph
    p = point_along(g, ("l1", "s1"), 1.2)
    assert p == PointOnGraph("s1", pytest.approx(0.2))
