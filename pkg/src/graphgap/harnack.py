"""The trimmed graph Γ₁, the Harnack ratio bound, and the ground-state envelope.

From every Dirichlet vertex the ground state ``φ₁ = A sin(σx)`` rises until
its first interior maximum (or the far end of the edge); removing those
rising pieces leaves Γ₁, where ``φ₁`` is bounded below by a computable
fraction of its maximum.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .eigen import EdgeWaveFunction, eigenfunction
from .graph import (
    GraphError,
    MetricGraph,
    PointOnGraph,
    dist_to_dirichlet,
    insert_artificial_vertex,
    suppress_artificial,
)

_SNAP = 1e-9


@dataclass(frozen=True)
class TrimmedInterval:
    """``I_j``: the rising piece of length ``length`` starting at Dirichlet vertex ``vertex``."""

    vertex: str
    edge: str
    length: float
    whole_edge: bool


@dataclass(frozen=True, eq=False)
class Gamma1:
    graph: MetricGraph  # Γ (artificial vertices suppressed) with the trim points inserted
    phi: EdgeWaveFunction  # ground state on ``graph``
    edges: tuple[int, ...]  # edge indices of ``graph`` lying in Γ₁
    vertices: tuple[int, ...]  # vertex indices of ``graph`` lying in Γ₁
    intervals: tuple[TrimmedInterval, ...]
    parent: dict  # edge id of ``graph`` -> edge id of the suppressed Γ

    @property
    def single_point(self) -> bool:
        return not self.edges

    @property
    def length(self) -> float:
        return math.fsum(self.graph.edges[i].length for i in self.edges)


def _working(g: MetricGraph, phi: EdgeWaveFunction) -> tuple[MetricGraph, EdgeWaveFunction]:
    if phi.graph is not g:
        raise ValueError("eigenfunction lives on a different graph")
    gs = suppress_artificial(g)
    if gs is g:
        return g, phi
    return gs, eigenfunction(gs, phi.sigma)


def gamma1(g: MetricGraph, phi: EdgeWaveFunction) -> Gamma1:
    if not g.has_dirichlet:
        raise GraphError("Γ₁ needs at least one Dirichlet vertex")
    gs, phi = _working(g, phi)
    sigma = phi.sigma
    rise = math.pi / (2.0 * sigma)
    intervals = []
    cuts = []  # (edge id, position, Dirichlet end) of interior maxima
    for vi in gs.dirichlet:
        h = gs.incident(vi)[0]
        e = gs.edges[h.edge]
        whole = rise >= e.length * (1.0 - _SNAP)
        t = e.length if whole else rise
        intervals.append(TrimmedInterval(gs.vertices[vi].id, e.id, t, whole))
        if not whole:
            cuts.append((e.id, t if h.end == 0 else e.length - t, h.end))
    # on the Dirichlet interval both rising pieces meet at the midpoint
    g1 = gs
    parent = {e.id: (e.id, 0.0) for e in gs.edges}
    for eid, pos, _ in cuts:
        if eid not in parent:
            continue  # already split from its other end
        g1 = insert_artificial_vertex(g1, PointOnGraph(eid, pos))
        del parent[eid]
        i = _split_index(g1, eid)
        parent[g1.edges[i].id] = (eid, 0.0)
        parent[g1.edges[i + 1].id] = (eid, pos)
    trimmed = {g1.incident(g1.vertex_index(iv.vertex))[0].edge for iv in intervals}
    edges = tuple(i for i in range(g1.E) if i not in trimmed)
    if edges:
        vs = {g1.vertex_index(x) for i in edges for x in (g1.edges[i].u, g1.edges[i].v)}
    else:
        vs = {g1.vertex_index(x) for i in trimmed for x in (g1.edges[i].u, g1.edges[i].v)}
        vs -= set(g1.dirichlet)
    phi1 = phi if g1 is gs else _transfer(phi, g1, gs, parent)
    return Gamma1(g1, phi1, edges, tuple(sorted(vs)), tuple(intervals), {k: v[0] for k, v in parent.items()})


def _split_index(g: MetricGraph, eid: str) -> int:
    # insert_artificial_vertex puts the two halves where the original edge was
    for i, e in enumerate(g.edges):
        if e.id.startswith(eid + ".a"):
            return i
    raise GraphError(f"split halves of {eid!r} not found")


def _transfer(phi: EdgeWaveFunction, g1: MetricGraph, gs: MetricGraph, parent: dict) -> EdgeWaveFunction:
    """The same function on the subdivided graph ``g1``."""
    s = phi.sigma
    a = np.empty(g1.E)
    b = np.empty(g1.E)
    for i, e in enumerate(g1.edges):
        src, shift = parent[e.id]
        j = gs.edge_index(src)
        c, sn = math.cos(s * shift), math.sin(s * shift)
        a[i] = phi.a[j] * c + phi.b[j] * sn
        b[i] = phi.b[j] * c - phi.a[j] * sn
    return EdgeWaveFunction(g1, s, a, b)


# ---------------------------------------------------------------------------


def reduced_lengths(g: MetricGraph) -> tuple[float, float]:
    """``(L, ℓ₀)`` of the graph with artificial vertices suppressed."""
    cached = g.__dict__.get("_reduced_lengths")
    if cached is None:
        gs = suppress_artificial(g)
        cached = (gs.total_length, float(min(gs.lengths)))
        g.__dict__["_reduced_lengths"] = cached
    return cached


def upsilon(g: MetricGraph, p: PointOnGraph) -> float:
    if not g.has_dirichlet:
        raise GraphError("Υ needs at least one Dirichlet vertex")
    ell0 = reduced_lengths(g)[1]
    d = dist_to_dirichlet(g, p)
    return 1.0 if d >= 0.5 * ell0 else math.sin(math.pi * d / ell0)


def upsilon_edge(g: MetricGraph, i: int, xs: np.ndarray) -> np.ndarray:
    """Vectorized Υ along edge ``i``."""
    ell0 = reduced_lengths(g)[1]
    e = g.edges[i]
    dd = g.dirichlet_distance
    d = np.minimum(xs + dd[g.vertex_index(e.u)], e.length - xs + dd[g.vertex_index(e.v)])
    return np.where(d >= 0.5 * ell0, 1.0, np.sin(np.pi * np.minimum(d, 0.5 * ell0) / ell0))


# ---------------------------------------------------------------------------


def _floor_ratio(L: float, ell0: float) -> int:
    return int(math.floor(L / ell0 * (1.0 + 1e-12)))


def log_universal_c(L: float, ell0: float) -> float:
    """``log c(L, ℓ₀)``; ``c = 1`` when ``⌊L/ℓ₀⌋ ≤ 1`` (a single edge)."""
    n = _floor_ratio(L, ell0)
    if n <= 1:
        return 0.0
    b = math.tan(math.pi * ell0 / (2.0 * L)) / (n - 1)
    return n * (math.log(b) - 0.5 * math.log1p(b * b))


def universal_c(L: float, ell0: float) -> float:
    return math.exp(log_universal_c(L, ell0))


def log_C_gap(L: float, ell0: float) -> float:
    """``log C(L, ℓ₀)`` with ``C = (c · sin(πℓ₀/4L))⁴ / L²``."""
    return 4.0 * (log_universal_c(L, ell0) + math.log(math.sin(math.pi * ell0 / (4.0 * L)))) - 2.0 * math.log(L)


def C_gap(L: float, ell0: float) -> float:
    return math.exp(log_C_gap(L, ell0))


def c1_envelope(L: float, ell0: float) -> float:
    return universal_c(L, ell0) * math.sqrt(2.0 / L) * math.sin(math.pi * ell0 / (4.0 * L))


def exceptional_c1(g: MetricGraph) -> float:
    """Envelope constant when Γ₁ is a point: ``φ₁ = √(2/L) sin(σx)`` on every edge.

    On the Dirichlet interval ``φ₁ = √(2/L) Υ``; on an equilateral Dirichlet
    star ``φ₁/Υ = √(2/L) / (2cos(πx/2a))`` near the leaves, so ``1/√(2L)``.
    """
    gs = suppress_artificial(g)
    L = gs.total_length
    if gs.E == 1 and len(gs.dirichlet) == 2:
        return math.sqrt(2.0 / L)
    return 1.0 / math.sqrt(2.0 * L)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HarnackData:
    m1: float
    M1: float
    gamma1: Gamma1
    q: int
    d0: int
    b: float
    delta0: float
    v0: str
    ell_k: float
    per_graph_bound: float
    universal_bound: float
    log_universal_bound: float

    @property
    def ratio(self) -> float:
        return self.m1 / self.M1

    @property
    def sharpness(self) -> float:
        return self.per_graph_bound / self.ratio


def _inward_phase(phi: EdgeWaveFunction, i: int, end: int) -> float:
    v = phi.end_value(i, end)
    d = phi.outgoing_derivative(i, end) / phi.sigma
    return math.atan2(v, d)


def _hops(g: MetricGraph, edges: tuple[int, ...], src: int) -> dict[int, int]:
    adj: dict[int, list[int]] = {}
    for i in edges:
        e = g.edges[i]
        u, v = g.vertex_index(e.u), g.vertex_index(e.v)
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    dist = {src: 0}
    todo = deque([src])
    while todo:
        x = todo.popleft()
        for y in adj.get(x, ()):
            if y not in dist:
                dist[y] = dist[x] + 1
                todo.append(y)
    return dist


def harnack(g: MetricGraph, phi: EdgeWaveFunction, rtol: float = 1e-12) -> HarnackData:
    G1 = gamma1(g, phi)
    if G1.single_point:
        raise GraphError("Γ₁ is a single point; use the closed-form spectrum instead")
    g1, f = G1.graph, G1.phi
    ext = [f.edge_extrema(i) for i in range(g1.E)]
    M1 = max(x[2] for x in ext)
    m1 = min(ext[i][0] for i in G1.edges)

    # argmin vertices of Γ₁ and argmax locations (vertex or edge interior)
    tol = rtol * M1
    mins = [vi for vi in G1.vertices if f.vertex_value(vi) <= m1 + tol]
    maxv: set[int] = set()
    maxe: set[int] = set()
    for i in G1.edges:
        _, _, hi, xhi = ext[i]
        if hi >= M1 - tol:
            e = g1.edges[i]
            if xhi <= 0.0:
                maxv.add(g1.vertex_index(e.u))
            elif xhi >= e.length:
                maxv.add(g1.vertex_index(e.v))
            else:
                maxe.add(i)
    for vi in G1.vertices:
        if f.vertex_value(vi) >= M1 - tol:
            maxv.add(vi)
    if not maxv and not maxe:
        raise GraphError("maximum of the ground state lies outside Γ₁")
    q = None
    for s in mins:
        dist = _hops(g1, G1.edges, s)
        cands = [dist[v] for v in maxv if v in dist]
        for i in maxe:
            e = g1.edges[i]
            ends = [dist[x] for x in (g1.vertex_index(e.u), g1.vertex_index(e.v)) if x in dist]
            if ends:
                cands.append(1 + min(ends))
        if cands:
            q = min(cands) if q is None else min(q, min(cands))
    if q is None:
        raise GraphError("Γ₁ does not connect the minimum to the maximum")

    # minimal inward phase over the ends of Γ₁ edges
    delta0, v0 = math.inf, -1
    for i in G1.edges:
        e = g1.edges[i]
        for end, vid in ((0, e.u), (1, e.v)):
            ph = _inward_phase(f, i, end)
            if ph < delta0:
                delta0, v0 = ph, g1.vertex_index(vid)
    d0 = g1.degree(v0)
    # edge at v0 with the largest derivative pointing toward v0
    hk = max(g1.incident(v0), key=lambda h: -f.outgoing_derivative(h.edge, h.end))
    gs_len = {e.id: e.length for e in suppress_artificial(g).edges}
    ell_k = gs_len.get(G1.parent[g1.edges[hk.edge].id], g1.edges[hk.edge].length)
    if d0 <= 1:
        raise GraphError("minimal-phase vertex is a leaf")
    b = math.tan(f.sigma * ell_k) / (d0 - 1)
    per_graph = (b / math.sqrt(1.0 + b * b)) ** q

    L, ell0 = reduced_lengths(g)
    logc = log_universal_c(L, ell0)
    return HarnackData(
        m1=m1,
        M1=M1,
        gamma1=G1,
        q=q,
        d0=d0,
        b=b,
        delta0=delta0,
        v0=g1.vertices[v0].id,
        ell_k=ell_k,
        per_graph_bound=per_graph,
        universal_bound=math.exp(logc),
        log_universal_bound=logc,
    )


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnvelopePoint:
    edge: str
    position: float
    phi: float
    upsilon: float
    lower: float
    upper: float

    @property
    def lower_margin(self) -> float:
        return self.phi - self.lower

    @property
    def upper_margin(self) -> float:
        return self.upper - self.phi


@dataclass(frozen=True)
class EnvelopeReport:
    c1: float
    upper_constant: float
    passed: bool
    lower_ok: bool
    upper_ok: bool
    worst_lower: EnvelopePoint
    worst_upper: EnvelopePoint
    points: int

    def table(self) -> str:
        rows = ["check,edge_id,position,phi,upsilon,bound,margin"]
        for name, p, bound, m in (
            ("lower", self.worst_lower, self.worst_lower.lower, self.worst_lower.lower_margin),
            ("upper", self.worst_upper, self.worst_upper.upper, self.worst_upper.upper_margin),
        ):
            rows.append(
                f"{name},{p.edge},{p.position:.15g},{p.phi:.15g},{p.upsilon:.15g},{bound:.15g},{m:.15g}"
            )
        return "\n".join(rows) + "\n"


def envelope_check(g: MetricGraph, phi: EdgeWaveFunction, grid: int = 200, rtol: float = 1e-12) -> EnvelopeReport:
    """Check ``c1·Υ ≤ φ₁ ≤ √(2/ℓ₀)·Υ`` at ``grid`` uniform points per edge (ends included)."""
    if not g.has_dirichlet:
        raise GraphError("the envelope needs at least one Dirichlet vertex")
    if phi.graph is not g:
        raise ValueError("eigenfunction lives on a different graph")
    grid = max(int(grid), 2)
    L, ell0 = reduced_lengths(g)
    c1 = exceptional_c1(g) if gamma1(g, phi).single_point else c1_envelope(L, ell0)
    top = math.sqrt(2.0 / ell0)
    slack = rtol * top
    worst_lo = worst_hi = None
    lo_ok = hi_ok = True
    for i, e in enumerate(g.edges):
        xs = np.linspace(0.0, e.length, grid)
        ph = np.asarray(phi.value(i, xs))
        up = upsilon_edge(g, i, xs)
        lo_m = ph - c1 * up
        hi_m = top * up - ph
        lo_ok &= bool(np.all(lo_m >= -slack))
        hi_ok &= bool(np.all(hi_m >= -slack))
        j = int(np.argmin(lo_m))
        k = int(np.argmin(hi_m))
        p = EnvelopePoint(e.id, float(xs[j]), float(ph[j]), float(up[j]), c1 * float(up[j]), top * float(up[j]))
        r = EnvelopePoint(e.id, float(xs[k]), float(ph[k]), float(up[k]), c1 * float(up[k]), top * float(up[k]))
        if worst_lo is None or p.lower_margin < worst_lo.lower_margin:
            worst_lo = p
        if worst_hi is None or r.upper_margin < worst_hi.upper_margin:
            worst_hi = r
    return EnvelopeReport(c1, top, lo_ok and hi_ok, lo_ok, hi_ok, worst_lo, worst_hi, grid * g.E)
