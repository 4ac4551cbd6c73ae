"""Checks of the eigenvalue inequalities against computed spectra.

Every check is a :class:`BoundCheck`.  ``certified`` checks use only exactly
computable inputs (eigenvalues, lengths, counts) and must hold up to
floating-point rounding; ``tolerance`` checks consume a Cheeger estimate and
carry a 1% allowance.  ``informational`` checks are evaluated and reported
but never count as failures.

Combinatorial quantities (E, V_N, V_0, ℓ₀, ℓ_max) are taken from the graph
with degree-2 standard vertices suppressed, so that an invisible
subdivision does not move any bound.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .cheeger import ORACLE_MAX_EDGES, converged_cheeger
from .edgefunc import PiecewiseAffine, inner, weighted_derivative_norm2
from .eigen import EdgeWaveFunction, Spectrum, eigenvalues
from .graph import DIRICHLET, GraphMetrics, MetricGraph, is_cycle_graph, is_tree, metrics, suppress_artificial
from .harnack import gamma1, log_C_gap, reduced_lengths

CERTIFIED = "certified"
TOLERANCE = "tolerance"
INFORMATIONAL = "informational"

CERT_RTOL = 1e-9
CHEEGER_TOL = 1e-2


@dataclass(frozen=True)
class BoundCheck:
    name: str
    lhs: float
    relation: str  # "<=" or ">="
    rhs: float
    certainty: str
    applicable: bool = True
    reason: str = ""
    tol: float = CERT_RTOL
    log_lhs: float | None = None  # used instead of lhs/rhs when the rhs underflows
    log_rhs: float | None = None

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs if self.relation == "<=" else self.lhs - self.rhs

    @property
    def satisfied(self) -> bool:
        if not self.applicable:
            return True
        if self.log_lhs is not None and self.log_rhs is not None:
            d = self.log_rhs - self.log_lhs if self.relation == "<=" else self.log_lhs - self.log_rhs
            return d >= -self.tol
        if self.certainty == TOLERANCE:
            # lhs ≥ (1 − tol)·rhs, or lhs ≤ (1 + tol)·rhs
            return self.slack >= -self.tol * abs(self.rhs)
        scale = max(abs(self.lhs), abs(self.rhs), 1e-300)
        return self.slack >= -self.tol * scale

    @property
    def failed(self) -> bool:
        """A failure that matters: applicable, not informational, not satisfied."""
        return self.applicable and self.certainty != INFORMATIONAL and not self.satisfied

    def row(self) -> list[str]:
        return [
            self.name,
            f"{self.lhs:.15g}",
            self.relation,
            f"{self.rhs:.15g}",
            f"{self.slack:.15g}",
            self.certainty,
            "yes" if self.applicable else "no",
            "pass" if self.satisfied else "FAIL",
            self.reason,
        ]


def _check(name, lhs, relation, rhs, certainty=CERTIFIED, **kw) -> BoundCheck:
    tol = kw.pop("tol", CHEEGER_TOL if certainty == TOLERANCE else CERT_RTOL)
    return BoundCheck(name, float(lhs), relation, float(rhs), certainty, tol=tol, **kw)


def _skip(name, relation, reason, certainty=CERTIFIED) -> BoundCheck:
    return BoundCheck(name, math.nan, relation, math.nan, certainty, applicable=False, reason=reason)


# ---------------------------------------------------------------------------
# graph classes


def reduced(g: MetricGraph) -> MetricGraph:
    return suppress_artificial(g)


def is_dirichlet_tree(g: MetricGraph) -> bool:
    """A tree whose external (degree-1) vertices are exactly the Dirichlet vertices."""
    if not is_tree(g):
        return False
    return all((g.degree(i) == 1) == (v.bc == DIRICHLET) for i, v in enumerate(g.vertices))


def cycle_class(g: MetricGraph) -> str:
    """Applicability of the Betti-number ratio bound: ``applicable`` on trees, else ``informational``."""
    gs = reduced(g)
    if is_cycle_graph(gs):
        return "excluded"
    return "applicable" if metrics(gs).beta == 0 else INFORMATIONAL


# ---------------------------------------------------------------------------
# lower bounds


def check_lower_bounds(g: MetricGraph, spectrum: Spectrum, cheeger: float | None = None) -> list[BoundCheck]:
    gs = reduced(g)
    m = metrics(gs)
    lam = spectrum.eigenvalues
    L = m.L
    out = []
    dirichlet = m.V_0 > 0
    for k in range(1, len(lam) + 1):
        name = f"lambda_k_lower[k={k}]"
        if not dirichlet and k == 1:
            out.append(_skip(name, ">=", "standard conditions: bound stated for k >= 2"))
            continue
        out.append(_check(name, lam[k - 1], ">=", k**2 * math.pi**2 / (4 * L**2)))
    thr = m.E - m.V_0 + 1
    for k in range(1, len(lam) + 1):
        name = f"bkkm_lower[k={k}]"
        if not dirichlet:
            out.append(_skip(name, ">=", "needs a Dirichlet vertex"))
        elif is_cycle_graph(gs):
            out.append(_skip(name, ">=", "cycle graph"))
        elif k < thr:
            out.append(_skip(name, ">=", f"k < E - V0 + 1 = {thr}"))
        else:
            rhs = (k - 0.5 * thr) ** 2 * math.pi**2 / L**2
            out.append(_check(name, lam[k - 1], ">=", rhs))
    idx = 0 if dirichlet else 1
    name = "nicaise_cheeger" if dirichlet else "nicaise_cheeger_std"
    if cheeger is None:
        out.append(_skip(name, ">=", "no converged Cheeger value (graph above the oracle cap)", TOLERANCE))
    elif idx >= len(lam):
        out.append(_skip(name, ">=", "spectrum too short", TOLERANCE))
    else:
        out.append(_check(name, lam[idx], ">=", 0.25 * cheeger**2, TOLERANCE))
    if dirichlet:
        out.append(_skip("kkmm_diameter", ">=", "standard conditions only"))
    elif m.diameter > 0.5 * L:
        out.append(_skip("kkmm_diameter", ">=", "diameter > L/2"))
    else:
        out.append(_check("kkmm_diameter", lam[1], ">=", 1.0 / (2.0 * m.diameter * L)))
    return out


# ---------------------------------------------------------------------------
# upper bounds


def betti_rhs(k: int, m: GraphMetrics) -> float:
    return (k - 0.5 + 1.5 * m.E - m.V_N - 0.5 * m.V_0) ** 2 * math.pi**2 / m.L**2


def betti_ratio_check(g: MetricGraph, spectrum: Spectrum, n: int) -> BoundCheck:
    gs = reduced(g)
    m = metrics(gs)
    lam = spectrum.eigenvalues
    name = f"betti_ratio[n={n}]"
    if n + 1 > len(lam):
        return _skip(name, "<=", "spectrum too short")
    if m.V_0 == 0:
        return _skip(name, "<=", "needs a Dirichlet vertex")
    rhs = float(2 * n + 1 + 3 * m.E - 2 * m.V_N - m.V_0) ** 2
    cls = cycle_class(g)
    if cls == "excluded":
        return _check(name, lam[n] / lam[n - 1], "<=", rhs, applicable=False, reason="cycle graph")
    if cls == INFORMATIONAL:
        return _check(name, lam[n] / lam[n - 1], "<=", rhs, INFORMATIONAL, reason=f"beta = {m.beta} >= 1")
    return _check(name, lam[n] / lam[n - 1], "<=", rhs)


def check_upper_bounds(g: MetricGraph, spectrum: Spectrum) -> list[BoundCheck]:
    gs = reduced(g)
    m = metrics(gs)
    lam = spectrum.eigenvalues
    out = [_check("lmax_upper", lam[0], "<=", math.pi**2 / m.ellmax**2)]
    if m.girth_finite:
        out.append(_check("girth_upper", lam[0], "<=", math.pi**2 / m.girth**2))
    else:
        out.append(_skip("girth_upper", "<=", "infinite girth"))
    for k in range(1, len(lam) + 1):
        out.append(_check(f"betti_upper[k={k}]", lam[k - 1], "<=", betti_rhs(k, m)))
    if m.V_0 == 0 and m.E >= 2:
        out.append(_check("kkmm_edges", lam[1], "<=", math.pi**2 * m.E**2 / m.L**2))
    else:
        out.append(_skip("kkmm_edges", "<=", "standard conditions with E >= 2 only"))
    for n in range(1, len(lam)):
        out.append(betti_ratio_check(g, spectrum, n))
    return out


# ---------------------------------------------------------------------------
# gap lower bounds


def check_weighted_cheeger_gap(
    g: MetricGraph, spectrum: Spectrum, phi1: EdgeWaveFunction, h_phi: float | None = None
) -> list[BoundCheck]:
    if not g.has_dirichlet:
        raise ValueError("the weighted Cheeger gap bound needs a Dirichlet vertex")
    gap = spectrum[1] - spectrum[0]
    out = []
    if h_phi is None:
        out.append(_skip("hphi_gap", ">=", "no converged weighted Cheeger value", TOLERANCE))
    else:
        out.append(_check("hphi_gap", gap, ">=", 0.25 * h_phi**2, TOLERANCE))
    L, ell0 = reduced_lengths(g)
    logC = log_C_gap(L, ell0)
    out.append(
        _check(
            "universal_gap",
            gap,
            ">=",
            math.exp(logC),
            log_lhs=math.log(gap),
            log_rhs=logC,
            reason=f"log C = {logC:.15g}",
        )
    )
    return out


# ---------------------------------------------------------------------------
# variational identities


def _edge_integrand(phi1: EdgeWaveFunction, phi2: EdgeWaveFunction, i: int) -> Callable[[float], float]:
    def h(x: float) -> float:
        p1 = float(phi1.value(i, x))
        if p1 == 0.0:
            return 0.0  # (φ2/φ1)'φ1 vanishes to second order at a Dirichlet end
        w = float(phi2.derivative(i, x)) * p1 - float(phi2.value(i, x)) * float(phi1.derivative(i, x))
        return (w / p1) ** 2

    return h


def folklore_gap(g: MetricGraph, phi1: EdgeWaveFunction, phi2: EdgeWaveFunction) -> float:
    """``‖(φ₂/φ₁)′φ₁‖²`` by adaptive quadrature on each edge."""
    total = []
    # absolute floor for edges where φ₂ vanishes identically
    floor = 1e-15 * (1.0 + phi2.sigma**2) * float(np.max(phi2.amplitudes)) ** 2 * g.total_length
    for i, e in enumerate(g.edges):
        val, _ = quad(_edge_integrand(phi1, phi2, i), 0.0, e.length, epsabs=floor, epsrel=1e-12, limit=200)
        total.append(val)
    return math.fsum(total)


def _constant(g: MetricGraph, c: float = 1.0) -> PiecewiseAffine:
    return PiecewiseAffine(g, (0.0,) * g.E, (c,) * g.E)


def center(f: PiecewiseAffine, phi) -> PiecewiseAffine:
    """Shift ``f`` by a constant so that ``∫ f φ² = 0``."""
    one = _constant(f.graph)
    mass = inner(one, one, phi)
    return f.shifted(-inner(f, one, phi) / mass)


def fphi_lemma_test(g: MetricGraph, phi, f: PiecewiseAffine, h_phi: float) -> BoundCheck:
    """``‖f′φ‖ ≥ ½ h_φ ‖fφ‖`` for ``f`` centred against ``φ²``."""
    fc = center(f, phi)
    num = math.sqrt(max(weighted_derivative_norm2(fc, phi), 0.0))
    den = math.sqrt(max(inner(fc, fc, phi), 0.0))
    if den == 0.0:
        raise ValueError("degenerate trial function: ‖fφ‖ = 0")
    return _check("fphi_lemma", num, ">=", 0.5 * h_phi * den, TOLERANCE)


# ---------------------------------------------------------------------------
# tree inequalities


def hp_root(lambdas: Sequence[float]) -> float:
    """The root in ``(λ_n, ∞)`` of ``Σ λ_j / (σ − λ_j) = n/4``."""
    lam = np.asarray(lambdas, dtype=float)
    n = lam.size
    if n == 0 or np.any(lam <= 0) or np.any(np.diff(lam) < 0):
        raise ValueError("need positive nondecreasing eigenvalues")
    top = lam[-1]

    def F(s: float) -> float:
        return math.fsum(lam / (s - lam)) - n / 4.0

    lo = top * (1.0 + 1e-15) + 1e-300
    hi = top + 4.0 * lam.sum() / n + 1.0
    while F(lo) <= 0.0:  # only for a pathological top that rounds onto the pole
        lo = top + (lo - top) * 0.5
    return brentq(F, lo, hi, xtol=1e-15 * hi, rtol=4 * np.finfo(float).eps, maxiter=500)


@dataclass(frozen=True)
class HSWeight:
    """A weight ``f`` for the weighted Hile–Protter inequality, with ``f(λ)·λ/(z−λ)`` given in closed form."""

    name: str
    value: Callable[[float, float], float]  # (λ, z) -> f(λ)
    weighted: Callable[[float, float], float]  # (λ, z) -> f(λ) λ / (z − λ)
    ratio: Callable[[float, float], float]  # (λ, z) -> f(λ) / (z − λ)²


def _div(a: float, b: float) -> float:
    return math.inf if b == 0.0 else a / b


HS_ONE = HSWeight(
    "one",
    lambda lam, z: 1.0,
    lambda lam, z: _div(lam, z - lam),
    lambda lam, z: _div(1.0, (z - lam) ** 2),
)
HS_DH = HSWeight(
    "square",
    lambda lam, z: (z - lam) ** 2,
    lambda lam, z: (z - lam) * lam,
    lambda lam, z: 1.0,
)


def hs_weight(f: Callable[[float], float], name: str = "custom") -> HSWeight:
    return HSWeight(
        name,
        lambda lam, z: f(lam),
        lambda lam, z: _div(f(lam) * lam, z - lam),
        lambda lam, z: _div(f(lam), (z - lam) ** 2),
    )


def hs_check(lambdas: Sequence[float], f: HSWeight, z: float, label: str = "") -> BoundCheck:
    """``Σ f(λ_j) ≤ 4 Σ f(λ_j) λ_j / (z − λ_j)``, after checking admissibility of ``f``."""
    lam = [float(x) for x in lambdas]
    name = f"hs[{f.name}{label}]"
    vals = [f.value(x, z) for x in lam]
    ratios = [f.ratio(x, z) for x in lam]
    positive = all(v > 0 for v in vals) or (f is HS_DH)
    monotone = all(b >= a * (1 - 1e-12) for a, b in zip(ratios, ratios[1:]))
    if not (positive and monotone):
        return _check(name, math.fsum(vals), "<=", math.nan, applicable=False, reason="inadmissible weight")
    lhs = math.fsum(vals)
    rhs = 4.0 * math.fsum(f.weighted(x, z) for x in lam)
    return _check(name, lhs, "<=", rhs, tol=1e-9)


def quadratic_gap(lambdas: Sequence[float]) -> tuple[float, float, float, float]:
    """``(D_n, lower bound on λ_n, upper bound on λ_{n+1}, bound on λ_{n+1} − λ_n)``."""
    lam = np.asarray(lambdas, dtype=float)
    n = lam.size
    mean3 = 3.0 * lam.sum() / n
    D = mean3**2 - 5.0 * float(np.sum(lam**2)) / n
    r = math.sqrt(max(D, 0.0))
    return D, mean3 - r, mean3 + r, 2.0 * r


def check_tree_bounds(g: MetricGraph, spectrum: Spectrum, force: bool = False) -> list[BoundCheck]:
    """Every tree inequality of the catalog, for each n below the spectrum depth.

    ``force`` applies them to graphs that carry a lifted affine triple
    (uniform saguaro graphs) without being trees.
    """
    lam = [float(x) for x in spectrum.eigenvalues]
    if not (force or is_dirichlet_tree(reduced(g))):
        return [_skip("tree_bounds", "<=", "not a Dirichlet-leaved tree")]
    out = [_check("nicaise_ratio", lam[1] / lam[0], "<=", 2.0 + math.sqrt(5.0))]
    for n in range(1, len(lam)):
        head, nxt = lam[:n], lam[n]
        s = math.fsum(head)
        out.append(_check(f"ppw[n={n}]", nxt - head[-1], "<=", 4.0 * s / n))
        out.append(_check(f"hile_protter[n={n}]", nxt, "<=", hp_root(head)))
        D, lo, hi, gap = quadratic_gap(head)
        if n >= 2:
            out.append(_check(f"quad_D[n={n}]", D, ">=", 0.0, tol=1e-9))
        out.append(_check(f"quad_upper[n={n}]", nxt, "<=", hi))
        out.append(_check(f"quad_lower[n={n}]", head[-1], ">=", lo))
        out.append(_check(f"quad_gap[n={n}]", nxt - head[-1], "<=", gap))
        if nxt <= head[-1] * (1 + 1e-12):
            continue  # (λ_n, λ_{n+1}] is empty
        zs = (head[-1], 0.5 * (head[-1] + nxt), nxt)
        for tag, z in zip(("lo", "mid", "hi"), zs):
            out.append(hs_check(head, HS_DH, z, label=f",n={n},z={tag}"))
            if tag != "lo":
                out.append(hs_check(head, HS_ONE, z, label=f",n={n},z={tag}"))
    out.append(_check("ppw_ratio", lam[1] / lam[0], "<=", 5.0))
    return out


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class BoundReport:
    graph_id: str
    metrics: GraphMetrics
    spectrum: tuple[float, ...]
    checks: tuple[BoundCheck, ...]
    extras: dict = field(default_factory=dict)

    @property
    def certified_failures(self) -> list[BoundCheck]:
        return [c for c in self.checks if c.failed and c.certainty == CERTIFIED]

    @property
    def failures(self) -> list[BoundCheck]:
        return [c for c in self.checks if c.failed]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "lhs", "relation", "rhs", "slack", "certainty", "applicable", "status", "note"])
        for c in self.checks:
            w.writerow(c.row())
        return buf.getvalue()

    def summary(self) -> str:
        applic = [c for c in self.checks if c.applicable]
        lines = [
            f"graph {self.graph_id}: E={self.metrics.E} V={self.metrics.V} L={self.metrics.L:.15g} "
            f"ell0={self.metrics.ell0:.15g} V0={self.metrics.V_0} beta={self.metrics.beta}",
            "spectrum: " + " ".join(f"{x:.15g}" for x in self.spectrum),
            f"checks: {len(applic)} applicable, {len(self.failures)} failed "
            f"({len(self.certified_failures)} certified)",
        ]
        for c in self.failures:
            lines.append(f"  FAIL {c.name}: {c.lhs:.15g} {c.relation} {c.rhs:.15g} [{c.certainty}]")
        return "\n".join(lines) + "\n"


def report(
    g: MetricGraph,
    k: int = 6,
    graph_id: str = "graph",
    cheeger: bool = True,
    cheeger_max_edges: int = 6,
    n: int = 128,
) -> BoundReport:
    """All applicable checks for ``g``; Cheeger-based checks only up to ``cheeger_max_edges`` edges."""
    gs = reduced(g)
    m = metrics(gs)
    depth = max(6, k)
    sp = eigenvalues(g, depth)
    extras: dict = {"certified_spectrum": sp.certified}
    use_cheeger = cheeger and g.E <= min(cheeger_max_edges, ORACLE_MAX_EDGES)
    h = converged_cheeger(g, None, n=n).value if use_cheeger else None
    extras["cheeger"] = h
    checks = check_lower_bounds(g, sp, h) + check_upper_bounds(g, sp)
    if g.has_dirichlet:
        phi1 = sp.eigenfunction(0)
        hphi = converged_cheeger(g, phi1, n=n).value if use_cheeger else None
        extras["weighted_cheeger"] = hphi
        checks += check_weighted_cheeger_gap(g, sp, phi1, hphi)
        G1 = gamma1(g, phi1)
        _, ell0 = reduced_lengths(g)
        if not G1.single_point:
            checks.append(_check("lam1_ell0", sp[0], "<=", math.pi**2 / (4 * ell0**2)))
        phi2 = sp.eigenfunction(1)
        fg = folklore_gap(g, phi1, phi2)
        checks.append(_check("folklore_identity", fg, "<=", sp[1] - sp[0], tol=1e-6))
        checks.append(_check("folklore_identity_rev", fg, ">=", sp[1] - sp[0], tol=1e-6))
    checks += check_tree_bounds(g, sp) if is_dirichlet_tree(gs) else []
    return BoundReport(graph_id, m, tuple(float(x) for x in sp.eigenvalues), tuple(checks), extras)
