"""Trees and tree-like graphs: leaf-pair decomposition, affine triples, currents.

A tree is peeled by repeatedly removing two external edges ("leaves") that
meet at a common vertex; degree-2 vertices left behind are merged away, so
the peeling ends with a single segment.  Replaying the peel in reverse
builds three edgewise-affine functions whose slopes are 0 or ±1 and cover
every edge exactly twice.  Offsets are kept as exact rationals.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .edgefunc import PiecewiseAffine
from .eigen import EdgeWaveFunction, eigenvalues
from .graph import (
    DIRICHLET,
    STANDARD,
    Edge,
    GraphError,
    MetricGraph,
    PointOnGraph,
    Vertex,
    insert_artificial_vertex,
    is_tree,
    make_graph,
)

# ---------------------------------------------------------------------------
# leaf-pair decomposition

Chain = tuple[str, ...]  # original edge ids, ordered away from the anchor vertex


@dataclass(frozen=True)
class TrimRecord:
    vertex: str
    leaves: tuple[Chain, Chain]


@dataclass(frozen=True)
class Decomposition:
    tree: MetricGraph
    segment: Chain  # ordered from ``start``
    start: str
    trims: tuple[TrimRecord, ...]


class _Chains:
    """The tree with degree-2 vertices merged: chains of original edges between real vertices."""

    def __init__(self, g: MetricGraph):
        self.g = g
        self.chains: dict[int, tuple[str, str, list[str]]] = {}  # id -> (end a, end b, edges a→b)
        self.at: dict[str, set[int]] = {}
        self._next = 0
        for e in g.edges:
            self._add(e.u, e.v, [e.id])
        for v in g.vertices:
            if v.bc == STANDARD and len(self.at[v.id]) == 2:
                self.merge(v.id)

    def _add(self, a: str, b: str, edges: list[str]) -> int:
        cid = self._next
        self._next += 1
        self.chains[cid] = (a, b, edges)
        self.at.setdefault(a, set()).add(cid)
        self.at.setdefault(b, set()).add(cid)
        return cid

    def _drop(self, cid: int) -> tuple[str, str, list[str]]:
        a, b, edges = self.chains.pop(cid)
        self.at[a].discard(cid)
        self.at[b].discard(cid)
        return a, b, edges

    def oriented(self, cid: int, start: str) -> tuple[str, list[str]]:
        """(far end, edges ordered from ``start``)."""
        a, b, edges = self.chains[cid]
        return (b, list(edges)) if a == start else (a, list(reversed(edges)))

    def merge(self, v: str) -> None:
        c1, c2 = sorted(self.at[v])
        far1, e1 = self.oriented(c1, v)
        far2, e2 = self.oriented(c2, v)
        self._drop(c1)
        self._drop(c2)
        self._add(far1, far2, list(reversed(e1)) + e2)

    def degree(self, v: str) -> int:
        return len(self.at.get(v, ()))

    def chain_length(self, cid: int) -> float:
        return math.fsum(self.g.edge(x).length for x in self.chains[cid][2])

    def leaf_chains(self, v: str) -> list[int]:
        """Leaf chains at ``v``, shortest first (ties by first edge id)."""
        return sorted(
            (c for c in self.at[v] if self.degree(self.oriented(c, v)[0]) == 1),
            key=lambda c: (self.chain_length(c), self.oriented(c, v)[1][0]),
        )


def leaf_pair_decomposition(tree: MetricGraph) -> Decomposition:
    """Peel leaf pairs at the vertex with most leaves (ties by vertex id), shortest pair first."""
    if not is_tree(tree):
        raise GraphError("leaf-pair decomposition needs a tree")
    ch = _Chains(tree)
    trims = []
    while True:
        best = None
        for v in sorted(ch.at):
            if ch.degree(v) < 3:
                continue
            n = len(ch.leaf_chains(v))
            if n >= 2 and (best is None or n > best[0]):
                best = (n, v)
        if best is None:
            break
        v = best[1]
        c1, c2 = ch.leaf_chains(v)[:2]
        l1 = tuple(ch.oriented(c1, v)[1])
        l2 = tuple(ch.oriented(c2, v)[1])
        ch._drop(c1)
        ch._drop(c2)
        trims.append(TrimRecord(v, (l1, l2)))
        if ch.degree(v) == 2:
            ch.merge(v)
    if len(ch.chains) != 1:
        raise GraphError("peeling did not end in a single segment")  # impossible for a tree
    (a, b, edges), = ch.chains.values()
    # start at the end that makes the first edge point forward when possible
    first = tree.edge(edges[0])
    if first.u != a and tree.edge(edges[-1]).u == b:
        a, edges = b, list(reversed(edges))
    return Decomposition(tree, tuple(edges), a, tuple(trims))


def _walk(g: MetricGraph, start: str, chain: Sequence[str]) -> list[tuple[str, bool, str]]:
    """(edge id, forward, far vertex) along a chain leaving ``start``."""
    out = []
    cur = start
    for eid in chain:
        e = g.edge(eid)
        if e.u == cur:
            out.append((eid, True, e.v))
            cur = e.v
        elif e.v == cur:
            out.append((eid, False, e.u))
            cur = e.u
        else:
            raise GraphError(f"edge {eid!r} does not continue the chain at {cur!r}")
    return out


def replay(dec: Decomposition) -> MetricGraph:
    """Rebuild the tree from its segment by attaching the leaf pairs in reverse order."""
    g = dec.tree
    edges: list[Edge] = [g.edge(x) for x in dec.segment]
    present = {dec.start} | {w for _, _, w in _walk(g, dec.start, dec.segment)}
    for rec in reversed(dec.trims):
        if rec.vertex not in present:
            raise GraphError(f"leaf pair attached at unknown vertex {rec.vertex!r}")
        for chain in rec.leaves:
            for eid, _, w in _walk(g, rec.vertex, chain):
                edges.append(g.edge(eid))
                present.add(w)
    vertices = [g.vertex(v) for v in sorted(present, key=g.vertex_index)]
    return MetricGraph(tuple(vertices), tuple(edges))


# ---------------------------------------------------------------------------
# affine triple


@dataclass(frozen=True, eq=False)
class AffineTriple:
    """Three edgewise-affine functions ``g_α = slope·x + offset`` in each edge's orientation."""

    graph: MetricGraph
    slopes: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    offsets: tuple[tuple[Fraction, ...], tuple[Fraction, ...], tuple[Fraction, ...]]

    def value(self, alpha: int, i: int, end: int) -> Fraction:
        off = self.offsets[alpha][i]
        if end == 0:
            return off
        return off + self.slopes[alpha][i] * Fraction(self.graph.edges[i].length)

    def continuity_residual(self) -> Fraction:
        worst = Fraction(0)
        g = self.graph
        for a in range(3):
            for vi in range(g.V):
                vals = [self.value(a, h.edge, h.end) for h in g.incident(vi)]
                worst = max(worst, max(vals) - min(vals))
        return worst

    def kirchhoff_residual(self) -> int:
        """Largest |Σ outgoing slope| over standard vertices (an integer)."""
        g = self.graph
        worst = 0
        for a in range(3):
            for vi, v in enumerate(g.vertices):
                if v.bc != STANDARD:
                    continue
                s = sum(self.slopes[a][h.edge] * (1 if h.end == 0 else -1) for h in g.incident(vi))
                worst = max(worst, abs(s))
        return worst

    def coverage_ok(self) -> bool:
        return all(
            sum(abs(self.slopes[a][i]) for a in range(3)) == 2
            and all(abs(self.slopes[a][i]) in (0, 1) for a in range(3))
            for i in range(self.graph.E)
        )

    def piecewise(self, alpha: int) -> PiecewiseAffine:
        return PiecewiseAffine(
            self.graph,
            tuple(float(s) for s in self.slopes[alpha]),
            tuple(float(o) for o in self.offsets[alpha]),
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["edge_id", "slope1", "offset1", "slope2", "offset2", "slope3", "offset3"])
        for i, e in enumerate(self.graph.edges):
            row = [e.id]
            for a in range(3):
                row += [str(self.slopes[a][i]), f"{float(self.offsets[a][i]):.15g}"]
            w.writerow(row)
        return buf.getvalue()


def affine_triple(tree: MetricGraph, dec: Decomposition | None = None) -> AffineTriple:
    if dec is None:
        dec = leaf_pair_decomposition(tree)
    g = tree
    slope = [[0] * g.E for _ in range(3)]
    offset = [[Fraction(0)] * g.E for _ in range(3)]
    val = [dict() for _ in range(3)]  # vertex id -> Fraction
    deg: dict[str, int] = {}

    def lay(start: str, chain: Sequence[str], outgoing: Sequence[int]) -> None:
        # outgoing[α]: derivative of g_α pointing away from ``start`` along the chain
        cur = start
        for eid, fwd, far in _walk(g, start, chain):
            i = g.edge_index(eid)
            ell = Fraction(g.edges[i].length)
            for a in range(3):
                s = outgoing[a] if fwd else -outgoing[a]
                slope[a][i] = s
                here = val[a][cur]
                offset[a][i] = here if fwd else here - s * ell
                val[a][far] = here + outgoing[a] * ell
            deg[cur] = deg.get(cur, 0) + 1
            deg[far] = deg.get(far, 0) + 1
            cur = far

    for a in range(3):
        val[a][dec.start] = Fraction(0)
    lay(dec.start, dec.segment, (1, -1, 0))
    for rec in reversed(dec.trims):
        v = rec.vertex
        (A, B) = rec.leaves
        if deg[v] >= 2:
            lay(v, A, (1, -1, 0))
            lay(v, B, (-1, 1, 0))
            continue
        # external vertex: the existing edge carries two active functions
        (h,) = [hh for hh in g.incident(v) if g.edges[hh.edge].id in _laid(slope, g)]
        i = h.edge
        out = [slope[a][i] * (1 if h.end == 0 else -1) for a in range(3)]
        active = [a for a in range(3) if out[a] != 0]
        (idle,) = [a for a in range(3) if out[a] == 0]
        p, q = active
        oa = [0, 0, 0]
        ob = [0, 0, 0]
        oa[p], ob[p] = 0, -out[p]
        oa[q], ob[q] = -out[q], 0
        oa[idle], ob[idle] = 1, -1
        lay(v, A, oa)
        lay(v, B, ob)
    return AffineTriple(
        g,
        tuple(tuple(s) for s in slope),  # type: ignore[arg-type]
        tuple(tuple(o) for o in offset),  # type: ignore[arg-type]
    )


def _laid(slope, g: MetricGraph) -> set[str]:
    return {g.edges[i].id for i in range(g.E) if any(slope[a][i] != 0 for a in range(3))}


# ---------------------------------------------------------------------------
# currents


@dataclass(frozen=True, eq=False)
class CurrentFunction:
    """Per-edge current ``η_e ≥ 0`` flowing along ``orientation[e]`` (+1: u→v, −1: v→u)."""

    graph: MetricGraph
    eta: tuple[float, ...]
    orientation: tuple[int, ...]

    @classmethod
    def from_slopes(cls, g: MetricGraph, slopes: Sequence[float]) -> "CurrentFunction":
        return cls(g, tuple(abs(float(s)) for s in slopes), tuple(1 if s >= 0 else -1 for s in slopes))

    def kcl_residual(self) -> float:
        g = self.graph
        worst = 0.0
        for vi, v in enumerate(g.vertices):
            if v.bc != STANDARD:
                continue
            s = math.fsum(
                self.eta[h.edge] * self.orientation[h.edge] * (1 if h.end == 0 else -1) for h in g.incident(vi)
            )
            worst = max(worst, abs(s))
        return worst

    def kvl_residual(self) -> float:
        """Mismatch of the potential ``h`` (``h' = ±η``) around cycles, via a spanning tree."""
        g = self.graph
        pot = {g.vertices[0].id: 0.0}
        todo = [g.vertices[0].id]
        while todo:
            x = todo.pop()
            for h in g.incident(x):
                e = g.edges[h.edge]
                drop = self.eta[h.edge] * self.orientation[h.edge] * e.length
                y, val = (e.v, pot[x] + drop) if h.end == 0 else (e.u, pot[x] - drop)
                if y not in pot:
                    pot[y] = val
                    todo.append(y)
        worst = 0.0
        for i, e in enumerate(g.edges):
            drop = self.eta[i] * self.orientation[i] * e.length
            worst = max(worst, abs(pot[e.u] + drop - pot[e.v]))
        return worst

    def is_valid(self, tol: float = 1e-12) -> bool:
        scale = max(max(self.eta, default=0.0), 1.0)
        return (
            all(x >= 0 for x in self.eta)
            and self.kcl_residual() <= tol * scale * 4
            and self.kvl_residual() <= tol * scale * self.graph.total_length
        )


def current_gap_bound(g: MetricGraph, eta: CurrentFunction, phi1: EdgeWaveFunction) -> float:
    """``4 ‖η φ₁′‖² / ‖η φ₁‖²``, with closed-form edge integrals."""
    if eta.graph is not g or phi1.graph is not g:
        raise ValueError("current and eigenfunction must live on the graph")
    num, den = [], []
    for i, e in enumerate(g.edges):
        w = eta.eta[i] ** 2
        if w == 0.0:
            continue
        p = phi1.edge_poly(i)
        d = p.derivative()
        num.append(w * (d * d).integrate(0.0, e.length))
        den.append(w * (p * p).integrate(0.0, e.length))
    D = math.fsum(den)
    if D <= 0.0:
        raise ValueError("‖ηφ₁‖ = 0")
    return 4.0 * math.fsum(num) / D


def triple_currents(t: AffineTriple) -> list[CurrentFunction]:
    return [CurrentFunction.from_slopes(t.graph, t.slopes[a]) for a in range(3)]


# ---------------------------------------------------------------------------
# saguaro graphs


@dataclass(frozen=True, eq=False)
class Saguaro:
    tree: MetricGraph
    graph: MetricGraph
    multiplicities: Mapping[str, int]
    copies: Mapping[str, tuple[str, ...]]  # tree edge id -> saguaro edge ids
    currents: tuple[CurrentFunction, ...]
    triple: AffineTriple | None  # the replicated triple, when k is uniform

    @property
    def kmin(self) -> int:
        return min(self.multiplicities.values())

    @property
    def kmax(self) -> int:
        return max(self.multiplicities.values())

    def ratio_bound(self) -> float:
        return 1.0 + 4.0 * self.kmax**2 / self.kmin**2


def build_saguaro(tree: MetricGraph, multiplicities) -> Saguaro:
    """Replace internal edges by k-pumpkins and external edges by k-stars."""
    if not is_tree(tree):
        raise GraphError("saguaro graphs are built on trees")
    if isinstance(multiplicities, int):
        ks = {e.id: multiplicities for e in tree.edges}
    else:
        ks = {e.id: int(multiplicities.get(e.id, 1)) for e in tree.edges}
    if any(k < 1 for k in ks.values()):
        raise GraphError("multiplicities must be >= 1")
    leaf = {v.id for i, v in enumerate(tree.vertices) if tree.degree(i) == 1}
    if any(e.u in leaf and e.v in leaf for e in tree.edges):
        raise GraphError("saguaro needs a tree with an internal vertex")
    t = affine_triple(tree)
    vertices = {v.id: v.bc for v in tree.vertices if v.id not in leaf}
    edges = []
    copies: dict[str, tuple[str, ...]] = {}
    src: list[tuple[int, int]] = []  # (tree edge index, sign of copy orientation)
    for i, e in enumerate(tree.edges):
        k = ks[e.id]
        names = []
        for j in range(k):
            cid = e.id if k == 1 else f"{e.id}#{j}"
            if e.v in leaf or e.u in leaf:
                # star: keep the orientation, split the leaf end into k Dirichlet vertices
                lf = e.v if e.v in leaf else e.u
                nv = lf if k == 1 else f"{lf}#{j}"
                vertices[nv] = tree.vertex(lf).bc
                u, v = (e.u, nv) if lf == e.v else (nv, e.v)
            else:
                u, v = e.u, e.v
            edges.append((cid, u, v, e.length))
            names.append(cid)
            src.append((i, k))
        copies[e.id] = tuple(names)
    g = make_graph(vertices, edges)
    currents = []
    for a in range(3):
        slopes = [t.slopes[a][i] / k for i, k in src]
        currents.append(CurrentFunction.from_slopes(g, slopes))
    triple = None
    if len(set(ks.values())) == 1:
        triple = AffineTriple(
            g,
            tuple(tuple(t.slopes[a][i] for i, _ in src) for a in range(3)),  # type: ignore[arg-type]
            tuple(tuple(t.offsets[a][i] for i, _ in src) for a in range(3)),  # type: ignore[arg-type]
        )
    return Saguaro(tree, g, ks, copies, tuple(currents), triple)


# ---------------------------------------------------------------------------
# ornamented trees


@dataclass(frozen=True)
class Pendant:
    graph: MetricGraph
    anchor: str  # vertex of ``graph`` glued to the tree
    attach: str  # vertex of the tree


@dataclass(frozen=True, eq=False)
class OrnamentedTree:
    base: MetricGraph
    pendants: tuple[Pendant, ...]
    graph: MetricGraph


def _pendant_prefix(j: int) -> str:
    return f"P{j}:"


def ornament(base: MetricGraph, pendants: Sequence[tuple[MetricGraph, str, str | PointOnGraph]]) -> OrnamentedTree:
    """Glue each pendant ``(P, anchor, where)`` to ``base``; ``where`` is a vertex id or an edge point."""
    if not is_tree(base):
        raise GraphError("the base of an ornamented tree must be a tree")
    g = base
    placed = []
    for j, (P, anchor, where) in enumerate(pendants):
        if not P.has_dirichlet:
            raise GraphError(f"pendant {j} has no Dirichlet vertex")
        if P.vertex(anchor).bc != STANDARD:
            raise GraphError(f"pendant {j}: anchor {anchor!r} must be standard")
        if isinstance(where, PointOnGraph):
            g = insert_artificial_vertex(g, where)
            where = g.vertices[-1].id
        placed.append(Pendant(P, anchor, where))
    tree = g
    for p in placed:
        if tree.degree(p.attach) < 2:
            raise GraphError(f"attachment vertex {p.attach!r} is not internal to the tree")
    vertices = list(tree.vertices)
    edges = list(tree.edges)
    for j, p in enumerate(placed):
        pre = _pendant_prefix(j)

        def name(v: str, p=p, pre=pre) -> str:
            return p.attach if v == p.anchor else pre + v

        vertices += [Vertex(pre + v.id, v.bc) for v in p.graph.vertices if v.id != p.anchor]
        edges += [Edge(pre + e.id, name(e.u), name(e.v), e.length) for e in p.graph.edges]
    return OrnamentedTree(tree, tuple(placed), MetricGraph(tuple(vertices), tuple(edges)))


def pendant_lambda1(p: Pendant) -> float:
    return float(eigenvalues(p.graph, 1)[0])


def ornamented_check(ot: OrnamentedTree):
    from .bounds import CERTIFIED, INFORMATIONAL, _check

    sp = eigenvalues(ot.graph, 2)
    lam1, lam2 = float(sp[0]), float(sp[1])
    pl = [pendant_lambda1(p) for p in ot.pendants]
    ellmax = float(np.max(ot.base.lengths))
    sizes = [p.graph.total_length for p in ot.pendants]
    hyp = all(lam1 <= x * (1 + 1e-12) for x in pl)
    small = all(s <= 0.5 * ellmax for s in sizes)
    out = [
        _check("pendant_hypothesis", lam1, "<=", min(pl), INFORMATIONAL),
        _check("pendant_size", max(sizes), "<=", 0.5 * ellmax, INFORMATIONAL),
    ]
    if small:
        out.append(_check("pendant_size_implies_hypothesis", lam1, "<=", min(pl), CERTIFIED))
    out.append(_check("ornamented_ratio", lam2 / lam1, "<=", 5.0, CERTIFIED if hyp else INFORMATIONAL))
    return out


def _pendant_shape(rng: random.Random, size: float) -> tuple[MetricGraph, str]:
    kind = rng.choice(("edge", "fork", "lollipop"))
    if kind == "edge":
        return make_graph({"q": STANDARD, "d": DIRICHLET}, [("a", "q", "d", size)]), "q"
    if kind == "fork":
        w = rng.uniform(0.2, 0.6)
        r = (1 - w) / 2
        return (
            make_graph(
                {"q": STANDARD, "m": STANDARD, "d1": DIRICHLET, "d2": DIRICHLET},
                [("s", "q", "m", w * size), ("a", "m", "d1", r * size), ("b", "m", "d2", r * size)],
            ),
            "q",
        )
    w, loop = rng.uniform(0.2, 0.4), rng.uniform(0.3, 0.5)
    return (
        make_graph(
            {"q": STANDARD, "m": STANDARD, "d": DIRICHLET},
            [("s", "q", "m", w * size), ("o", "m", "m", loop * size), ("a", "m", "d", (1 - w - loop) * size)],
        ),
        "q",
    )


def random_ornamented(
    E: int = 4, pendants: int = 2, seed: int = 0, ell_min: float = 0.1, small: bool = True
) -> OrnamentedTree:
    """Random Dirichlet-leaved tree with small pendants (total length ≤ ℓmax/2 when ``small``)."""
    from .corpus import make_random_tree

    rng = random.Random(10007 * seed + 31 * E + pendants)
    base = make_random_tree(max(E, 3), seed=rng.randrange(2**31), ell_min=ell_min).graph
    ellmax = float(np.max(base.lengths))
    inner = [v.id for i, v in enumerate(base.vertices) if base.degree(i) >= 2]
    spec = []
    for j in range(pendants):
        size = rng.uniform(0.3, 0.5) * ellmax if small else rng.uniform(0.6, 1.5) * ellmax
        P, anchor = _pendant_shape(rng, size)
        if rng.random() < 0.3:
            e = base.edges[rng.randrange(base.E)]
            where: str | PointOnGraph = PointOnGraph(e.id, round(rng.uniform(0.25, 0.75) * e.length, 12))
            base_ids = {x.id for x in base.edges}
            if any(isinstance(s[2], PointOnGraph) and s[2].edge == e.id for s in spec) or e.id not in base_ids:
                where = rng.choice(inner)
        else:
            where = rng.choice(inner)
        spec.append((P, anchor, where))
    return ornament(base, spec)
