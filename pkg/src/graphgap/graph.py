"""Compact metric graphs with standard/Dirichlet vertex conditions.

A :class:`MetricGraph` is an immutable combinatorial multigraph whose edges
carry lengths.  Every edge has a fixed orientation (``x = 0`` at ``u``,
``x = length`` at ``v``); edge ends are addressed as half-edges so parallel
edges and self-loops need no special treatment.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

STANDARD = "standard"
DIRICHLET = "dirichlet"


class GraphError(ValueError):
    """Raised when a graph document or construction violates the data model."""


@dataclass(frozen=True)
class Vertex:
    id: str
    bc: str = STANDARD


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    length: float


@dataclass(frozen=True)
class HalfEdge:
    """One end of an edge; ``end`` is 0 for the ``x = 0`` end and 1 for ``x = length``."""

    edge: int
    end: int


@dataclass(frozen=True)
class PointOnGraph:
    edge: str
    position: float


@dataclass(frozen=True)
class GraphMetrics:
    L: float
    ell0: float
    ellmax: float
    E: int
    V: int
    V_N: int
    V_0: int
    beta: int
    diameter: float
    girth: float  # math.inf when the Dirichlet-identified graph is acyclic
    has_cycle: bool

    @property
    def girth_finite(self) -> bool:
        return math.isfinite(self.girth)


@dataclass(frozen=True, eq=False)
class MetricGraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        vidx: dict[str, int] = {}
        for i, vx in enumerate(self.vertices):
            if vx.bc not in (STANDARD, DIRICHLET):
                raise GraphError(f"vertex {vx.id!r}: unknown condition {vx.bc!r}")
            if vx.id in vidx:
                raise GraphError(f"duplicate vertex id {vx.id!r}")
            vidx[vx.id] = i
        eidx: dict[str, int] = {}
        for i, e in enumerate(self.edges):
            if e.id in eidx:
                raise GraphError(f"duplicate edge id {e.id!r}")
            for end in (e.u, e.v):
                if end not in vidx:
                    raise GraphError(f"edge {e.id!r} references unknown vertex {end!r}")
            if not (e.length > 0 and math.isfinite(e.length)):
                raise GraphError(f"edge {e.id!r} has nonpositive length {e.length!r}")
            eidx[e.id] = i
        if not self.edges:
            raise GraphError("graph has no edges")
        object.__setattr__(self, "_index", {"v": vidx, "e": eidx})

        incident: list[list[HalfEdge]] = [[] for _ in self.vertices]
        for i, e in enumerate(self.edges):
            incident[vidx[e.u]].append(HalfEdge(i, 0))
            incident[vidx[e.v]].append(HalfEdge(i, 1))
        self._index["inc"] = tuple(tuple(h) for h in incident)

        for i, vx in enumerate(self.vertices):
            if vx.bc == DIRICHLET and len(incident[i]) != 1:
                raise GraphError(
                    f"Dirichlet vertex {vx.id!r} has degree {len(incident[i])}, expected 1"
                )
        if not self._connected():
            raise GraphError("graph is not connected")

    # -- lookups --------------------------------------------------------

    def vertex_index(self, vid: str) -> int:
        return self._index["v"][vid]

    def edge_index(self, eid: str) -> int:
        try:
            return self._index["e"][eid]
        except KeyError:
            raise GraphError(f"unknown edge {eid!r}") from None

    def edge(self, eid: str) -> Edge:
        return self.edges[self.edge_index(eid)]

    def vertex(self, vid: str) -> Vertex:
        return self.vertices[self.vertex_index(vid)]

    def incident(self, vid: str | int) -> tuple[HalfEdge, ...]:
        i = vid if isinstance(vid, int) else self.vertex_index(vid)
        return self._index["inc"][i]

    def degree(self, vid: str | int) -> int:
        return len(self.incident(vid))

    def end_vertex(self, h: HalfEdge) -> int:
        e = self.edges[h.edge]
        return self.vertex_index(e.u if h.end == 0 else e.v)

    @property
    def E(self) -> int:
        return len(self.edges)

    @property
    def V(self) -> int:
        return len(self.vertices)

    @cached_property
    def lengths(self) -> np.ndarray:
        return np.array([e.length for e in self.edges], dtype=float)

    @cached_property
    def total_length(self) -> float:
        return math.fsum(e.length for e in self.edges)

    @cached_property
    def dirichlet(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.vertices) if v.bc == DIRICHLET)

    @property
    def has_dirichlet(self) -> bool:
        return bool(self.dirichlet)

    def is_artificial(self, vid: str | int) -> bool:
        """Degree-2 standard vertex (invisible to the spectrum)."""
        i = vid if isinstance(vid, int) else self.vertex_index(vid)
        return self.vertices[i].bc == STANDARD and len(self._index["inc"][i]) == 2

    @property
    def artificial_vertices(self) -> tuple[str, ...]:
        return tuple(v.id for i, v in enumerate(self.vertices) if self.is_artificial(i))

    def _connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for h in self._index["inc"][i]:
                e = self.edges[h.edge]
                for w in (e.u, e.v):
                    j = self._index["v"][w]
                    if j not in seen:
                        seen.add(j)
                        stack.append(j)
        return len(seen) == len(self.vertices)

    # -- distances ------------------------------------------------------

    @cached_property
    def vertex_distances(self) -> np.ndarray:
        """All-pairs shortest-path distances between vertices."""
        n = self.V
        best: dict[tuple[int, int], float] = {}
        for e in self.edges:
            a, b = self.vertex_index(e.u), self.vertex_index(e.v)
            if a == b:
                continue
            key = (min(a, b), max(a, b))
            best[key] = min(best.get(key, math.inf), e.length)
        rows, cols, vals = [], [], []
        for (a, b), w in best.items():
            rows += [a, b]
            cols += [b, a]
            vals += [w, w]
        mat = csr_matrix((vals, (rows, cols)), shape=(n, n))
        return dijkstra(mat, directed=False)

    @cached_property
    def dirichlet_distance(self) -> np.ndarray:
        """Distance from each vertex to the nearest Dirichlet vertex."""
        if not self.dirichlet:
            raise GraphError("graph has no Dirichlet vertex")
        return self.vertex_distances[:, list(self.dirichlet)].min(axis=1)

    def to_dict(self) -> dict:
        return {
            "vertices": [{"id": v.id, "bc": v.bc} for v in self.vertices],
            "edges": [
                {"id": e.id, "from": e.u, "to": e.v, "length": repr(e.length)}
                for e in self.edges
            ],
        }

    def __repr__(self) -> str:
        return f"MetricGraph(V={self.V}, E={self.E}, L={self.total_length:.6g})"


def make_graph(
    vertices: Mapping[str, str] | Iterable[tuple[str, str]],
    edges: Iterable[tuple[str, str, str, float]],
) -> MetricGraph:
    """Build a graph from ``{id: bc}`` and ``(id, u, v, length)`` tuples."""
    items = vertices.items() if isinstance(vertices, Mapping) else vertices
    return MetricGraph(
        tuple(Vertex(vid, bc) for vid, bc in items),
        tuple(Edge(eid, u, v, float(length)) for eid, u, v, length in edges),
    )


# -- parsing --------------------------------------------------------------


def _parse_length(raw) -> float:
    if isinstance(raw, bool):
        raise GraphError(f"invalid length {raw!r}")
    if isinstance(raw, (int, float)):
        return float(raw)
    if isinstance(raw, str):
        try:
            return float(raw.strip())
        except ValueError:
            raise GraphError(f"invalid length {raw!r}") from None
    raise GraphError(f"invalid length {raw!r}")


def graph_from_dict(doc: Mapping) -> MetricGraph:
    if not isinstance(doc, Mapping):
        raise GraphError("graph document must be a mapping")
    unknown = set(doc) - {"vertices", "edges", "name"}
    if unknown:
        raise GraphError(f"unknown top-level keys: {sorted(unknown)}")
    vs, es = doc.get("vertices"), doc.get("edges")
    if not isinstance(vs, list) or not isinstance(es, list):
        raise GraphError("'vertices' and 'edges' must both be arrays")
    vertices = []
    for item in vs:
        if not isinstance(item, Mapping) or "id" not in item:
            raise GraphError(f"malformed vertex entry {item!r}")
        bc = item.get("bc", STANDARD)
        if bc not in (STANDARD, DIRICHLET):
            raise GraphError(f"vertex {item['id']!r}: bc must be 'standard' or 'dirichlet'")
        vertices.append(Vertex(str(item["id"]), bc))
    edges = []
    for item in es:
        if not isinstance(item, Mapping) or not {"id", "from", "to", "length"} <= set(item):
            raise GraphError(f"malformed edge entry {item!r}")
        edges.append(
            Edge(str(item["id"]), str(item["from"]), str(item["to"]), _parse_length(item["length"]))
        )
    return MetricGraph(tuple(vertices), tuple(edges))


def parse_graph(text: str) -> MetricGraph:
    """Parse a JSON graph document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"graph document is not valid JSON: {exc}") from None
    return graph_from_dict(doc)


def load_graph(path: str | Path) -> MetricGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def dump_graph(g: MetricGraph, path: str | Path | None = None) -> str:
    text = json.dumps(g.to_dict(), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text


# -- metrics --------------------------------------------------------------


def _same_edge_max(length: float, d_ends: float) -> float:
    # two points on one edge: max over x<y of min(y - x, x + d(u, v) + length - y)
    return 0.5 * (length + d_ends)


def _edge_pair_max(a: float, b: float, d: np.ndarray) -> float:
    """Max distance between a point on edge e (length a) and one on f (length b).

    ``d[i, j]`` is the vertex distance from end i of e to end j of f.  For a
    point at x on e and y on f the distance is ``min(x + g0(y), a - x + g1(y))``
    with ``gi(y) = min(d[i,0] + y, d[i,1] + b - y)``.  Since |g0 - g1| <= a the
    optimal x gives ``(a + g0 + g1)/2``; g0 + g1 is concave piecewise linear in y
    so its max is at an endpoint or at a breakpoint of g0 or g1.
    """
    cand = [0.0, b]
    for i in (0, 1):
        y = 0.5 * (d[i, 1] + b - d[i, 0])
        if 0.0 < y < b:
            cand.append(y)
    best = 0.0
    for y in cand:
        g0 = min(d[0, 0] + y, d[0, 1] + b - y)
        g1 = min(d[1, 0] + y, d[1, 1] + b - y)
        best = max(best, 0.5 * (a + g0 + g1))
    return best


def diameter(g: MetricGraph) -> float:
    D = g.vertex_distances
    ends = [(g.vertex_index(e.u), g.vertex_index(e.v)) for e in g.edges]
    best = 0.0
    for i, e in enumerate(g.edges):
        ui, vi = ends[i]
        best = max(best, _same_edge_max(e.length, D[ui, vi]))
        for j in range(i + 1, g.E):
            uj, vj = ends[j]
            d = np.array([[D[ui, uj], D[ui, vj]], [D[vi, uj], D[vi, vj]]])
            best = max(best, _edge_pair_max(e.length, g.edges[j].length, d))
    return best


def girth(g: MetricGraph) -> float:
    """Minimum cycle length after identifying all Dirichlet vertices."""
    node = {}
    for i, v in enumerate(g.vertices):
        node[i] = -1 if v.bc == DIRICHLET else i
    relabel = {k: n for n, k in enumerate(sorted(set(node.values())))}
    arcs = [
        (relabel[node[g.vertex_index(e.u)]], relabel[node[g.vertex_index(e.v)]], e.length)
        for e in g.edges
    ]
    n = len(relabel)
    best = math.inf
    for k, (a, b, w) in enumerate(arcs):
        if a == b:
            best = min(best, w)
            continue
        rows, cols, vals = [], [], []
        for j, (p, q, wl) in enumerate(arcs):
            if j == k or p == q:
                continue
            rows += [p, q]
            cols += [q, p]
            vals += [wl, wl]
        if not vals:
            continue
        # duplicates are summed by csr_matrix, so reduce to minima first
        mins: dict[tuple[int, int], float] = {}
        for r, c, val in zip(rows, cols, vals):
            mins[(r, c)] = min(mins.get((r, c), math.inf), val)
        mat = csr_matrix(
            ([v for v in mins.values()], ([r for r, _ in mins], [c for _, c in mins])),
            shape=(n, n),
        )
        dist = dijkstra(mat, directed=False, indices=a)[b]
        best = min(best, w + dist)
    return best


def metrics(g: MetricGraph) -> GraphMetrics:
    lengths = [e.length for e in g.edges]
    beta = g.E - g.V + 1
    v0 = len(g.dirichlet)
    return GraphMetrics(
        L=g.total_length,
        ell0=min(lengths),
        ellmax=max(lengths),
        E=g.E,
        V=g.V,
        V_N=g.V - v0,
        V_0=v0,
        beta=beta,
        diameter=diameter(g),
        girth=girth(g),
        has_cycle=beta > 0,
    )


def is_tree(g: MetricGraph) -> bool:
    return g.E - g.V + 1 == 0


def is_cycle_graph(g: MetricGraph) -> bool:
    """True when the graph is a single closed loop (every vertex of degree 2)."""
    return all(g.degree(i) == 2 for i in range(g.V))


# -- points and distances ---------------------------------------------------


def vertex_point(g: MetricGraph, vid: str) -> PointOnGraph:
    h = g.incident(vid)[0]
    e = g.edges[h.edge]
    return PointOnGraph(e.id, 0.0 if h.end == 0 else e.length)


def _check_point(g: MetricGraph, p: PointOnGraph) -> tuple[int, Edge]:
    i = g.edge_index(p.edge)
    e = g.edges[i]
    if not (0.0 <= p.position <= e.length):
        raise GraphError(f"position {p.position} outside edge {e.id!r} of length {e.length}")
    return i, e


def distance(g: MetricGraph, p: PointOnGraph, q: PointOnGraph) -> float:
    D = g.vertex_distances
    ip, ep = _check_point(g, p)
    iq, eq = _check_point(g, q)
    pe = [(g.vertex_index(ep.u), p.position), (g.vertex_index(ep.v), ep.length - p.position)]
    qe = [(g.vertex_index(eq.u), q.position), (g.vertex_index(eq.v), eq.length - q.position)]
    best = min(dp + D[a, b] + dq for a, dp in pe for b, dq in qe)
    if ip == iq:
        best = min(best, abs(p.position - q.position))
    return float(best)


def dist_to_dirichlet(g: MetricGraph, p: PointOnGraph) -> float:
    dd = g.dirichlet_distance
    _, e = _check_point(g, p)
    return float(
        min(p.position + dd[g.vertex_index(e.u)], e.length - p.position + dd[g.vertex_index(e.v)])
    )


# -- surgery ----------------------------------------------------------------


def _fresh(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    k = 1
    while f"{base}~{k}" in taken:
        k += 1
    return f"{base}~{k}"


def insert_artificial_vertex(
    g: MetricGraph, p: PointOnGraph, vertex_id: str | None = None
) -> MetricGraph:
    """Split the edge carrying ``p`` at ``p`` with a new degree-2 standard vertex."""
    i, e = _check_point(g, p)
    if not (0.0 < p.position < e.length):
        raise GraphError("artificial vertex must be strictly interior to an edge")
    vids = {v.id for v in g.vertices}
    eids = {x.id for x in g.edges}
    w = vertex_id or _fresh(f"{e.id}@{p.position:.12g}", vids)
    if w in vids:
        raise GraphError(f"vertex id {w!r} already in use")
    eids.discard(e.id)
    a = _fresh(f"{e.id}.a", eids)
    eids.add(a)
    b = _fresh(f"{e.id}.b", eids)
    first = Edge(a, e.u, w, p.position)
    second = Edge(b, w, e.v, e.length - p.position)
    edges = g.edges[:i] + (first, second) + g.edges[i + 1 :]
    return MetricGraph(g.vertices + (Vertex(w, STANDARD),), edges)


def suppress_artificial(g: MetricGraph) -> MetricGraph:
    """Merge every degree-2 standard vertex into a single edge (idempotent)."""
    vertices = list(g.vertices)
    edges = list(g.edges)
    while True:
        inc: dict[str, list[tuple[int, int]]] = {v.id: [] for v in vertices}
        for k, e in enumerate(edges):
            inc[e.u].append((k, 0))
            inc[e.v].append((k, 1))
        target = None
        for v in vertices:
            hs = inc[v.id]
            if v.bc == STANDARD and len(hs) == 2 and hs[0][0] != hs[1][0]:
                target = v
                break
        if target is None:
            break
        (k1, end1), (k2, end2) = inc[target.id]
        e1, e2 = edges[k1], edges[k2]
        # orient e1 so it ends at target, e2 so it starts there
        start = e1.u if end1 == 1 else e1.v
        stop = e2.v if end2 == 0 else e2.u
        merged = Edge(f"{e1.id}+{e2.id}", start, stop, e1.length + e2.length)
        lo, hi = sorted((k1, k2))
        edges = edges[:lo] + [merged] + edges[lo + 1 : hi] + edges[hi + 1 :]
        vertices = [v for v in vertices if v.id != target.id]
    if len(edges) == g.E:
        return g
    return MetricGraph(tuple(vertices), tuple(edges))


def canonical_form(g: MetricGraph, digits: int = 12) -> tuple:
    """Relabeling-invariant fingerprint: sorted multiset of (edge length, end conditions/degrees)."""
    rows = []
    for e in g.edges:
        ends = sorted(
            (g.vertex(x).bc, g.degree(x)) for x in (e.u, e.v)
        )
        rows.append((round(e.length, digits), tuple(ends), e.u == e.v))
    return tuple(sorted(rows))


def point_along(g: MetricGraph, edge_ids: Sequence[str], s: float) -> PointOnGraph:
    """Point at arc length ``s`` along a walk given by consecutive edge ids."""
    start = _walk_orientation(g, edge_ids)
    for eid, forward in zip(edge_ids, start):
        e = g.edge(eid)
        if s <= e.length or eid == edge_ids[-1]:
            s = min(max(s, 0.0), e.length)
            return PointOnGraph(eid, s if forward else e.length - s)
        s -= e.length
    raise GraphError("empty walk")


def _walk_orientation(g: MetricGraph, edge_ids: Sequence[str]) -> list[bool]:
    if not edge_ids:
        raise GraphError("empty walk")
    edges = [g.edge(x) for x in edge_ids]
    if len(edges) == 1:
        return [True]
    first, second = edges[0], edges[1]
    if first.v in (second.u, second.v):
        cur, out = first.v, [True]
    elif first.u in (second.u, second.v):
        cur, out = first.u, [False]
    else:
        raise GraphError(f"edges {first.id!r} and {second.id!r} are not adjacent")
    for e in edges[1:]:
        if e.u == cur:
            out.append(True)
            cur = e.v
        elif e.v == cur:
            out.append(False)
            cur = e.u
        else:
            raise GraphError(f"edge {e.id!r} does not continue the walk")
    return out


def walk_orientation(g: MetricGraph, edge_ids: Sequence[str]) -> list[bool]:
    return _walk_orientation(g, edge_ids)
