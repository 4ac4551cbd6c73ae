import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphgap.bounds import (
    CERTIFIED,
    HS_DH,
    HS_ONE,
    INFORMATIONAL,
    TOLERANCE,
    BoundCheck,
    betti_ratio_check,
    check_lower_bounds,
    check_tree_bounds,
    check_upper_bounds,
    check_weighted_cheeger_gap,
    cycle_class,
    folklore_gap,
    fphi_lemma_test,
    hp_root,
    hs_check,
    hs_weight,
    is_dirichlet_tree,
    quadratic_gap,
    report,
)
from graphgap.cheeger import converged_cheeger
from graphgap.corpus import (
    make_balloon,
    make_equilateral_star,
    make_interval,
    make_random_graph,
    make_random_tree,
    make_star4,
    make_star15,
)
from graphgap.edgefunc import PiecewiseAffine
from graphgap.eigen import eigenvalues
from graphgap.harnack import C_gap

PI = math.pi


def by_name(checks):
    return {c.name: c for c in checks}


def test_boundcheck_semantics():
    ok = BoundCheck("a", 1.0, "<=", 1.0 + 1e-12, CERTIFIED)
    assert ok.satisfied and not ok.failed
    bad = BoundCheck("b", 1.1, "<=", 1.0, CERTIFIED)
    assert bad.failed and bad.row()[7] == "FAIL"
    info = BoundCheck("c", 1.1, "<=", 1.0, INFORMATIONAL)
    assert not info.satisfied and not info.failed
    tol = BoundCheck("d", 0.995, ">=", 1.0, TOLERANCE, tol=1e-2)
    assert tol.satisfied
    assert not BoundCheck("e", 0.98, ">=", 1.0, TOLERANCE, tol=1e-2).satisfied
    skipped = BoundCheck("f", math.nan, "<=", math.nan, CERTIFIED, applicable=False)
    assert skipped.satisfied and not skipped.failed
    logged = BoundCheck("g", 1.0, ">=", 0.0, CERTIFIED, log_lhs=-5.0, log_rhs=-900.0)
    assert logged.satisfied


def test_lower_bounds_examples():
    g = make_interval(1.0, "DD").graph
    c = by_name(check_lower_bounds(g, eigenvalues(g, 3)))["lambda_k_lower[k=1]"]
    assert c.slack == pytest.approx(3 * PI**2 / 4, rel=1e-12)
    g = make_star15(5).graph
    c = by_name(check_lower_bounds(g, eigenvalues(g, 2)))["lambda_k_lower[k=2]"]
    assert c.rhs == pytest.approx(PI**2 / 49, rel=1e-12)
    assert c.lhs == pytest.approx((PI - math.atan(math.sqrt(11))) ** 2, rel=1e-10)
    assert not c.failed


def test_lower_bound_equality_on_segment():
    # the equilateral 2-star is a segment of length L = 2a: λ1 = π²/L², four times the bound
    g = make_equilateral_star(2, 0.5).graph
    c = by_name(check_lower_bounds(g, eigenvalues(g, 1)))["lambda_k_lower[k=1]"]
    assert c.lhs == pytest.approx(4 * c.rhs, rel=1e-10)


def test_lower_bounds_standard_conditions():
    g = make_interval(2.0, "NN").graph
    checks = by_name(check_lower_bounds(g, eigenvalues(g, 3), cheeger=1.0))
    assert not checks["lambda_k_lower[k=1]"].applicable
    assert checks["lambda_k_lower[k=2]"].satisfied
    assert checks["nicaise_cheeger_std"].certainty == TOLERANCE
    # D = L = 2 > L/2
    assert not checks["kkmm_diameter"].applicable


def test_bkkm_threshold():
    g = make_star4(0.5).graph
    checks = by_name(check_lower_bounds(g, eigenvalues(g, 3)))
    # E − V0 + 1 = 1, so every k is in range
    assert all(checks[f"bkkm_lower[k={k}]"].applicable for k in (1, 2, 3))
    assert all(not checks[f"bkkm_lower[k={k}]"].failed for k in (1, 2, 3))


def test_upper_bounds_balloon():
    g = make_balloon(6).graph
    sp = eigenvalues(g, 6)
    checks = by_name(check_upper_bounds(g, sp))
    assert checks["girth_upper"].rhs == pytest.approx(PI**2 / 4)
    assert checks["girth_upper"].satisfied
    assert checks["lmax_upper"].satisfied
    r = checks["betti_ratio[n=1]"]
    assert r.certainty == INFORMATIONAL and r.rhs == 361.0
    assert r.lhs == pytest.approx(50.5, abs=0.1)


def test_girth_infinite_without_cycles():
    # Dirichlet vertices count as one point, so a single Dirichlet end closes no cycle
    g = make_interval(1.0, "DN").graph
    checks = by_name(check_upper_bounds(g, eigenvalues(g, 3)))
    assert not checks["girth_upper"].applicable


def test_betti_ratio_examples():
    g = make_balloon(3).graph
    c = betti_ratio_check(g, eigenvalues(g, 2), 1)
    assert c.rhs == 100.0 and c.lhs == pytest.approx(25.0, rel=1e-9)
    assert c.certainty == INFORMATIONAL and c.satisfied
    assert cycle_class(g) == INFORMATIONAL
    g = make_star4(0.5).graph
    c = betti_ratio_check(g, eigenvalues(g, 2), 1)
    assert c.rhs == 81.0 and c.lhs == pytest.approx(9 / 4, rel=1e-9)
    assert c.certainty == CERTIFIED and c.satisfied
    assert not betti_ratio_check(g, eigenvalues(g, 2), 2).applicable


def test_weighted_gap_star4():
    g = make_star4(0.5).graph
    sp = eigenvalues(g, 2)
    assert sp[1] - sp[0] == pytest.approx(5 * PI**2 / 9, rel=1e-10)
    checks = by_name(check_weighted_cheeger_gap(g, sp, sp.eigenfunction(0)))
    uni = checks["universal_gap"]
    assert uni.satisfied and uni.log_rhs < math.log(uni.lhs) - 10
    assert not checks["hphi_gap"].applicable


def test_weighted_gap_equilateral_and_interval():
    for g in (make_equilateral_star(3, 0.8).graph, make_interval(1.0, "DD").graph):
        sp = eigenvalues(g, 2)
        c = by_name(check_weighted_cheeger_gap(g, sp, sp.eigenfunction(0)))["universal_gap"]
        assert c.satisfied and 0.0 < C_gap(g.total_length, float(np.min(g.lengths))) < sp[1] - sp[0]
    g = make_equilateral_star(3, 0.8).graph
    sp = eigenvalues(g, 2)
    assert sp[1] - sp[0] == pytest.approx(3 * PI**2 / (4 * 0.64), rel=1e-10)


def test_weighted_gap_needs_dirichlet():
    g = make_interval(1.0, "NN").graph
    sp = eigenvalues(g, 2)
    with pytest.raises(ValueError):
        check_weighted_cheeger_gap(g, sp, sp.eigenfunction(0))


@pytest.mark.parametrize(
    "entry, expect",
    [
        (make_interval(1.0, "DD"), 3 * PI**2),
        (make_star4(0.5), 5 * PI**2 / 9),
        (make_star15(5), None),
        (make_balloon(3), None),
    ],
    ids=lambda x: getattr(x, "label", ""),
)
def test_folklore_identity(entry, expect):
    g = entry.graph
    sp = eigenvalues(g, 2)
    fg = folklore_gap(g, sp.eigenfunction(0), sp.eigenfunction(1))
    assert fg == pytest.approx(sp[1] - sp[0], rel=1e-6)
    if expect is not None:
        assert fg == pytest.approx(expect, rel=1e-6)


def _random_trial(g, rng):
    vals = {v.id: rng.uniform(-1.0, 1.0) for v in g.vertices}
    slopes = [(vals[e.v] - vals[e.u]) / e.length for e in g.edges]
    return PiecewiseAffine(g, tuple(slopes), tuple(vals[e.u] for e in g.edges))


@pytest.mark.parametrize("entry", [make_star4(0.5), make_random_tree(3, seed=4)], ids=lambda e: e.label)
def test_fphi_lemma_random_trials(entry):
    g = entry.graph
    phi = eigenvalues(g, 1).eigenfunction(0)
    h_phi = converged_cheeger(g, phi, n=128).value
    rng = random.Random(7)
    for _ in range(100):
        c = fphi_lemma_test(g, phi, _random_trial(g, rng), h_phi)
        assert c.satisfied, c


def test_fphi_lemma_classical_case():
    # φ ≡ 1 on an NN interval: h = 2/L, and the centred coordinate gives ‖f′‖/‖f‖ = √12/L
    L = 2.0
    g = make_interval(L, "NN").graph
    one = PiecewiseAffine(g, (0.0,), (1.0,))
    f = PiecewiseAffine(g, (1.0,), (0.0,))
    c = fphi_lemma_test(g, one, f, 2 / L)
    assert c.lhs == pytest.approx(1.0 * math.sqrt(L), rel=1e-12)
    assert c.rhs == pytest.approx(0.5 * (2 / L) * math.sqrt(L**3 / 12), rel=1e-12)
    with pytest.raises(ValueError):
        fphi_lemma_test(g, one, PiecewiseAffine(g, (0.0,), (3.0,)), 1.0)


def test_hp_root_examples():
    assert hp_root([1.0]) == pytest.approx(5.0, rel=1e-14)
    assert hp_root([1.0, 1.0]) == pytest.approx(5.0, rel=1e-14)
    for bad in ([], [0.0], [2.0, 1.0]):
        with pytest.raises(ValueError):
            hp_root(bad)


@given(st.lists(st.floats(0.01, 1e4), min_size=1, max_size=8))
def test_hp_root_residual_and_bracket(raw):
    lam = sorted(raw)
    s = hp_root(lam)
    n = len(lam)
    assert lam[-1] < s <= lam[-1] + 4 * sum(lam) / n + 1
    F = sum(x / (s - x) for x in lam)
    assert abs(F - n / 4) <= 1e-10 * max(1.0, n / 4)
    # f ≡ 1 at z = σ is the equality case of Hile-Protter
    assert hs_check(lam, HS_ONE, s).slack >= -1e-9 * n


def test_hs_examples():
    c = hs_check([1.0], HS_ONE, 5.0)
    assert c.lhs == 1.0 and c.rhs == pytest.approx(1.0) and c.satisfied
    # f = (z − λ)²: Σ(z − λj)(z − 5λj) ≤ 0
    lam = [1.0, 2.0]
    for z in (2.0, 3.0, 4.0):
        c = hs_check(lam, HS_DH, z)
        assert c.satisfied == (sum((z - x) * (z - 5 * x) for x in lam) <= 1e-12)
    bad = hs_check([1.0, 2.0], hs_weight(lambda x: 1.0 / x**4, "steep"), 3.0)
    assert not bad.applicable and bad.reason == "inadmissible weight"


def test_quadratic_gap_examples():
    D, lo, hi, gap = quadratic_gap([1.0])
    assert (D, lo, hi, gap) == (4.0, 1.0, 5.0, 4.0)


@given(st.floats(0.1, 100.0), st.floats(1.0, 10.0), st.floats(1.0, 10.0))
def test_quadratic_third_eigenvalue_comparison(l1, r2, r3):
    l2 = l1 * r2
    lam = [l1, l2]
    D, _, hi, _ = quadratic_gap(lam)
    a1, a2 = (l1 + l2) / 2, (l1**2 + l2**2) / 2
    assert D == pytest.approx(9 * a1**2 - 5 * a2, rel=1e-12, abs=1e-9)
    weaker = 3 * a1 + math.sqrt(max(9 * a1**2 - 5 * l1 * l2, 0.0))
    assert hi <= weaker * (1 + 1e-12)


@pytest.mark.parametrize("seed", range(8))
def test_tree_bounds_random(seed):
    g = make_random_tree(3 + seed % 6, seed=seed).graph
    assert is_dirichlet_tree(g)
    checks = check_tree_bounds(g, eigenvalues(g, 7))
    assert checks and not [c for c in checks if c.failed]
    names = {c.name for c in checks}
    assert {"nicaise_ratio", "ppw_ratio", "hile_protter[n=6]", "quad_D[n=6]"} <= names


def test_tree_bounds_skip_non_trees():
    g = make_random_graph(6, beta=1, seed=1).graph
    (c,) = check_tree_bounds(g, eigenvalues(g, 3))
    assert not c.applicable


@pytest.mark.parametrize(
    "entry",
    [make_star4(0.5), make_star15(3), make_balloon(3), make_interval(2.0, "NN"), make_random_graph(5, 1, seed=2)],
    ids=lambda e: e.label,
)
def test_report(entry):
    r = report(entry.graph, k=6, graph_id=entry.label)
    assert not r.certified_failures and not r.failures, r.summary()
    names = [c.name for c in r.checks]
    assert len(names) == len(set(names))
    rows = r.to_csv().splitlines()
    assert rows[0].startswith("name,lhs,relation,rhs") and len(rows) == len(r.checks) + 1
    assert r.summary().startswith(f"graph {entry.label}:")


def test_report_reproducible():
    g = make_star4(0.5).graph
    a, b = report(g), report(g)
    assert a.to_csv() == b.to_csv() and a.summary() == b.summary()
