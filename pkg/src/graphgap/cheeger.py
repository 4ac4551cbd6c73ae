"""Cheeger cuts, weighted and unweighted.

A cut is a finite set ``S`` of points together with a 2-colouring of
``Γ \\ S`` that is constant on each connected piece; the ratio is

    (sum over S of w(s)) / min(mass of colour 0, mass of colour 1)

with ``w = φ²`` and mass ``∫ φ²`` in the weighted case, and ``w = 1``, mass =
length otherwise.  A cut point at a vertex counts once whatever its degree.

Two independent routes estimate the infimum: :func:`cheeger_search`
(vertex-state enumeration, a binned dynamic programme over per-edge cut
patterns, then continuous refinement of the cut positions) and
:func:`cheeger_oracle` (exact optimum of the problem discretized at ``n``
points per edge, solved as a sequence of mixed-integer programmes).
"""

from __future__ import annotations

import csv
import heapq
import io
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, brentq, milp, minimize_scalar
from scipy.sparse import coo_matrix

from . import kernels
from .graph import DIRICHLET, MetricGraph, PointOnGraph

CUT = 2
SEEDS = 16
NBINS = 128
ORACLE_MAX_EDGES = 8


class CutError(ValueError):
    """The cut does not split the graph into two labelled non-empty parts."""


@dataclass(frozen=True)
class CheegerCut:
    """Cut points plus segment labels (0 or 1) per edge, in edge orientation.

    Points at an edge end denote a cut at that vertex.
    """

    points: tuple[PointOnGraph, ...]
    labels: tuple[tuple[str, tuple[int, ...]], ...]

    def label_map(self) -> dict[str, tuple[int, ...]]:
        return dict(self.labels)

    def to_csv(self, g: MetricGraph) -> str:
        interior, cverts, labels = _decode(g, self)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["edge_id", "position", "component"])
        for i, e in enumerate(g.edges):
            bounds = [0.0] + interior[i]
            for x, c in zip(bounds, labels[i]):
                w.writerow([e.id, f"{x:.15g}", f"Y{c + 1}"])
            for x in interior[i]:
                w.writerow([e.id, f"{x:.15g}", "S"])
        for vi in sorted(cverts):
            h = g.incident(vi)[0]
            x = 0.0 if h.end == 0 else g.edges[h.edge].length
            w.writerow([g.edges[h.edge].id, f"{x:.15g}", "S"])
        return buf.getvalue()


@dataclass(frozen=True)
class CheegerEstimate:
    value: float
    cut: CheegerCut
    weighted: bool
    history: tuple[float, ...]
    skeletons: int
    truncated: bool


# ---------------------------------------------------------------------------
# weights


class _Weight:
    """Point weights and segment masses for ``φ²`` (or 1 and length)."""

    def __init__(self, g: MetricGraph, phi=None):
        self.g = g
        self.phi = phi
        if phi is not None and phi.graph is not g:
            raise ValueError("weight function lives on a different graph")
        self.lengths = [e.length for e in g.edges]
        self.edge_mass = [self.mass(i, 0.0, ell) for i, ell in enumerate(self.lengths)]
        self.total = math.fsum(self.edge_mass)

    def point(self, i: int, x: float) -> float:
        if self.phi is None:
            return 1.0
        s = self.phi.sigma
        v = self.phi.a[i] * math.cos(s * x) + self.phi.b[i] * math.sin(s * x)
        return v * v

    def points(self, i: int, xs: np.ndarray) -> np.ndarray:
        if self.phi is None:
            return np.ones_like(xs)
        return np.asarray(self.phi.value(i, xs)) ** 2

    def density(self, i: int, x: float) -> float:
        return self.point(i, x)

    def vertex(self, vi: int) -> float:
        if self.phi is None:
            return 1.0
        v = self.phi.vertex_value(vi)
        return v * v

    def mass(self, i: int, a, b):
        if self.phi is None:
            if np.ndim(a) or np.ndim(b):
                return np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
            return b - a
        out = self.phi.mass(i, a, b)
        return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# evaluation


def _decode(g: MetricGraph, cut: CheegerCut):
    labels_in = cut.label_map()
    interior: list[list[float]] = [[] for _ in g.edges]
    cverts: set[int] = set()
    for p in cut.points:
        i = g.edge_index(p.edge)
        ell = g.edges[i].length
        if not 0.0 <= p.position <= ell:
            raise CutError(f"cut point {p} outside its edge")
        if p.position in (0.0, ell):
            e = g.edges[i]
            vi = g.vertex_index(e.u if p.position == 0.0 else e.v)
            if g.vertices[vi].bc == DIRICHLET:
                raise CutError(f"cut point at Dirichlet vertex {g.vertices[vi].id!r}")
            if vi in cverts:
                raise CutError(f"vertex {g.vertices[vi].id!r} cut twice")
            cverts.add(vi)
        else:
            interior[i].append(p.position)
    labels: list[tuple[int, ...]] = []
    for i, e in enumerate(g.edges):
        xs = sorted(interior[i])
        if len(set(xs)) != len(xs):
            raise CutError(f"coincident cut points on edge {e.id!r}")
        interior[i] = xs
        lab = labels_in.get(e.id)
        if lab is None or len(lab) != len(xs) + 1 or any(c not in (0, 1) for c in lab):
            raise CutError(f"edge {e.id!r} needs {len(xs) + 1} labels in {{0, 1}}")
        labels.append(tuple(lab))
    for vi in range(g.V):
        if vi in cverts:
            continue
        seen = {labels[h.edge][0] if h.end == 0 else labels[h.edge][-1] for h in g.incident(vi)}
        if len(seen) > 1:
            raise CutError(f"uncut vertex {g.vertices[vi].id!r} joins both parts")
    return interior, cverts, labels


def cut_parts(g: MetricGraph, cut: CheegerCut, weight=None) -> tuple[float, float, float]:
    """``(numerator, mass of part 0, mass of part 1)``."""
    w = _Weight(g, weight)
    interior, cverts, labels = _decode(g, cut)
    num = [w.vertex(vi) for vi in cverts]
    m = ([], [])
    for i, ell in enumerate(w.lengths):
        bounds = [0.0] + interior[i] + [ell]
        for j, c in enumerate(labels[i]):
            m[c].append(w.mass(i, bounds[j], bounds[j + 1]))
        num.extend(w.point(i, x) for x in interior[i])
    return math.fsum(num), math.fsum(m[0]), math.fsum(m[1])


def evaluate_cut(g: MetricGraph, cut: CheegerCut, weight=None) -> float:
    """Cheeger ratio of ``cut``; ``weight`` is φ (the ratio uses φ²)."""
    num, m0, m1 = cut_parts(g, cut, weight)
    if not (m0 > 0 and m1 > 0):
        raise CutError("both parts must be non-empty")
    return num / min(m0, m1)


def f_of(x: float, sigma: float) -> float:
    """``sin²(σx) / ∫₀ˣ sin²(σt) dt``; strictly decreasing on ``(0, π/σ)``."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if not 0 < x < math.pi / sigma:
        raise ValueError(f"x={x!r} outside (0, pi/sigma)")
    t = sigma * x
    if t < 1e-3:
        # x - sin(2t)/(2σ) = (2/3) σ² x³ (1 - t²/5 + 2t⁴/105 - ...)
        den = (2.0 / 3.0) * sigma**2 * x**3 * (1.0 - t * t / 5.0 + 2.0 * t**4 / 105.0)
    else:
        den = x - math.sin(2.0 * t) / (2.0 * sigma)
    return 2.0 * math.sin(t) ** 2 / den


# ---------------------------------------------------------------------------
# search


@dataclass
class _Candidate:
    ratio: float
    cut_vertices: tuple[int, ...]
    colors: list[tuple[int, ...]]
    cuts: list[list[float]]


def _skeletons(g: MetricGraph, cap: int):
    cuttable = [vi for vi, v in enumerate(g.vertices) if v.bc != DIRICHLET and g.degree(vi) >= 2]
    n = len(cuttable)
    count = 0
    for ncut in range(n + 1):
        for cset in itertools.combinations(range(n), ncut):
            rest = [j for j in range(n) if j not in cset]
            ncol = 2 ** max(len(rest) - 1, 0)
            for code in range(ncol):
                if count >= cap:
                    return
                state = {cuttable[j]: CUT for j in cset}
                for t, j in enumerate(rest):
                    state[cuttable[j]] = 0 if t == 0 else (code >> (t - 1)) & 1
                count += 1
                yield state


def _edge_options(w: _Weight, i: int, cu: int, cv: int):
    """Seed options for edge ``i`` with end colours ``cu``/``cv``: (costs, masses1, colours, cuts)."""
    ell = w.lengths[i]
    xs = ell * np.arange(1, SEEDS + 1) / (SEEDS + 1)
    pw = w.points(i, xs)
    M = w.edge_mass[i]
    head = np.asarray(w.mass(i, np.zeros_like(xs), xs), dtype=float)
    costs, masses, cols, cuts = [], [], [], []
    if cu == cv:
        costs.append(0.0)
        masses.append(M if cu == 1 else 0.0)
        cols.append((cu,))
        cuts.append(())
        a, b = np.triu_indices(SEEDS, k=1)
        mid = head[b] - head[a]
        costs.extend(pw[a] + pw[b])
        masses.extend(mid if cu == 0 else M - mid)
        cols.extend([(cu, 1 - cu, cu)] * len(a))
        cuts.extend(zip(xs[a], xs[b]))
    else:
        costs.extend(pw)
        masses.extend(head if cu == 1 else M - head)
        cols.extend([(cu, cv)] * SEEDS)
        cuts.extend((x,) for x in xs)
    return costs, masses, cols, [tuple(float(v) for v in c) for c in cuts]


def _end_colors(g: MetricGraph, state: dict, vi: int) -> tuple[int, ...]:
    s = state.get(vi)
    return (0, 1) if s is None or s == CUT else (s,)


class _Refiner:
    def __init__(self, w: _Weight, cand: _Candidate):
        self.w = w
        self.cut_vertices = cand.cut_vertices
        self.vc = math.fsum(w.vertex(vi) for vi in cand.cut_vertices)
        self.colors = cand.colors
        self.cuts = [list(c) for c in cand.cuts]
        self.vars = [(i, k) for i, c in enumerate(self.cuts) for k in range(len(c))]

    def edge_terms(self, i: int, cuts) -> tuple[float, float]:
        w, cols = self.w, self.colors[i]
        bounds = [0.0, *cuts, w.lengths[i]]
        m1 = math.fsum(w.mass(i, bounds[j], bounds[j + 1]) for j, c in enumerate(cols) if c == 1)
        return math.fsum(w.point(i, x) for x in cuts), m1

    def totals(self) -> tuple[float, float]:
        num, m1 = [self.vc], []
        for i, c in enumerate(self.cuts):
            a, b = self.edge_terms(i, c)
            num.append(a)
            m1.append(b)
        return math.fsum(num), math.fsum(m1)

    def ratio_from(self, num: float, m1: float) -> float:
        den = min(m1, self.w.total - m1)
        return num / den if den > 1e-300 else math.inf

    def value(self) -> float:
        return self.ratio_from(*self.totals())

    def bounds(self, i: int, k: int) -> tuple[float, float]:
        c = self.cuts[i]
        lo = c[k - 1] if k > 0 else 0.0
        hi = c[k + 1] if k + 1 < len(c) else self.w.lengths[i]
        return lo, hi

    def _line(self, f, lo: float, hi: float, cur_t: float, cur_val: float):
        ts = np.linspace(lo, hi, SEEDS + 2)[1:-1]
        vals = [f(t) for t in ts]
        j = int(np.argmin(vals))
        best_t, best = (float(ts[j]), vals[j]) if vals[j] < cur_val else (cur_t, cur_val)
        a = ts[j - 1] if j > 0 else lo
        b = ts[j + 1] if j + 1 < len(ts) else hi
        res = minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": 1e-10 * max(hi - lo, 1e-300)})
        if res.fun < best:
            best_t, best = float(res.x), float(res.fun)
        return best_t, best

    def coordinate(self, v: int, cur: float) -> float:
        i, k = self.vars[v]
        lo, hi = self.bounds(i, k)
        eps = 1e-13 * self.w.lengths[i]
        lo, hi = lo + eps, hi - eps
        if hi <= lo:
            return cur
        base_num, base_m1 = self.totals()
        old = list(self.cuts[i])
        on, om = self.edge_terms(i, old)

        def f(x):
            c = list(old)
            c[k] = x
            n, m = self.edge_terms(i, c)
            return self.ratio_from(base_num - on + n, base_m1 - om + m)

        t, val = self._line(f, lo, hi, old[k], cur)
        if val < cur:
            self.cuts[i][k] = t
            return val
        return cur

    def _dm(self, v: int) -> float:
        i, k = self.vars[v]
        cols = self.colors[i]
        return self.w.density(i, self.cuts[i][k]) * (cols[k] - cols[k + 1])

    def pair(self, p: int, q: int, cur: float) -> float:
        (ip, kp), (iq, kq) = self.vars[p], self.vars[q]
        dp, dq = self._dm(p), self._dm(q)
        nrm = math.hypot(dp, dq)
        if nrm == 0.0:
            return cur
        up, uq = dq / nrm, -dp / nrm
        xp, xq = self.cuts[ip][kp], self.cuts[iq][kq]
        tl, th = -math.inf, math.inf
        for (i, k), x, u in (((ip, kp), xp, up), ((iq, kq), xq, uq)):
            lo, hi = self.bounds(i, k)
            eps = 1e-13 * self.w.lengths[i]
            lo, hi = lo + eps, hi - eps
            if u > 0:
                tl, th = max(tl, (lo - x) / u), min(th, (hi - x) / u)
            elif u < 0:
                tl, th = max(tl, (hi - x) / u), min(th, (lo - x) / u)
        if ip == iq or not (tl < 0 < th) or not math.isfinite(tl) or not math.isfinite(th):
            return cur
        saved = (list(self.cuts[ip]), list(self.cuts[iq]))

        def f(t):
            self.cuts[ip][kp] = xp + t * up
            self.cuts[iq][kq] = xq + t * uq
            val = self.value()
            self.cuts[ip][kp], self.cuts[iq][kq] = saved[0][kp], saved[1][kq]
            return val

        t, val = self._line(f, tl, th, 0.0, cur)
        if val < cur:
            self.cuts[ip][kp] = xp + t * up
            self.cuts[iq][kq] = xq + t * uq
            return val
        return cur

    def run(self, max_sweeps: int = 60, pairs: bool = True) -> float:
        cur = self.value()
        for _ in range(max_sweeps):
            start = cur
            for v in range(len(self.vars)):
                cur = self.coordinate(v, cur)
            if pairs:
                for p, q in itertools.combinations(range(len(self.vars)), 2):
                    cur = self.pair(p, q, cur)
            if not cur < start * (1.0 - 1e-13):
                break
        return self.snap(cur)

    def snap(self, cur: float) -> float:
        # optima often sit on the balance set m1 = M/2; solve for it exactly per coordinate
        half = 0.5 * self.w.total
        for i, k in self.vars:
            lo, hi = self.bounds(i, k)
            eps = 1e-13 * self.w.lengths[i]
            old = list(self.cuts[i])
            base_num, base_m1 = self.totals()
            _, om = self.edge_terms(i, old)

            def gap(x):
                c = list(old)
                c[k] = x
                return base_m1 - om + self.edge_terms(i, c)[1] - half

            a, b = lo + eps, hi - eps
            if not (a < b and gap(a) * gap(b) < 0):
                continue
            x = brentq(gap, a, b, xtol=1e-15 * self.w.lengths[i], rtol=1e-15)
            self.cuts[i][k] = x
            val = self.value()
            if val < cur:
                cur = val
            else:
                self.cuts[i] = old
        return cur


def _to_cut(g: MetricGraph, cut_vertices, colors, cuts) -> CheegerCut:
    pts = []
    for vi in sorted(cut_vertices):
        h = g.incident(vi)[0]
        e = g.edges[h.edge]
        pts.append(PointOnGraph(e.id, 0.0 if h.end == 0 else e.length))
    for i, e in enumerate(g.edges):
        pts.extend(PointOnGraph(e.id, float(x)) for x in cuts[i])
    labels = tuple((e.id, tuple(int(c) for c in colors[i])) for i, e in enumerate(g.edges))
    return CheegerCut(tuple(pts), labels)


def cheeger_search(
    g: MetricGraph,
    weight=None,
    max_skeletons: int = 4096,
    refine: int = 6,
) -> CheegerEstimate:
    """Upper estimate of the (weighted) Cheeger constant; ``weight`` is φ."""
    w = _Weight(g, weight)
    cache: dict[tuple[int, int, int], tuple] = {}
    pool: list[tuple[float, int, _Candidate]] = []
    serial = 0
    nsk = 0
    for state in _skeletons(g, max_skeletons):
        nsk += 1
        cut_vertices = tuple(sorted(vi for vi, s in state.items() if s == CUT))
        vc = math.fsum(w.vertex(vi) for vi in cut_vertices)
        opts = []
        for i, e in enumerate(g.edges):
            iu, iv = g.vertex_index(e.u), g.vertex_index(e.v)
            cus, cvs = _end_colors(g, state, iu), _end_colors(g, state, iv)
            if iu == iv and state.get(iu) != CUT:
                combos = [(c, c) for c in cus]
            else:
                combos = [(cu, cv) for cu in cus for cv in cvs]
            acc = ([], [], [], [])
            for cu, cv in combos:
                key = (i, cu, cv)
                if key not in cache:
                    cache[key] = _edge_options(w, i, cu, cv)
                for dst, src in zip(acc, cache[key]):
                    dst.extend(src)
            opts.append(acc)
        cost, mass, choice, parent = kernels.binned_minplus(
            [np.asarray(o[0], dtype=float) for o in opts],
            [np.asarray(o[1], dtype=float) for o in opts],
            NBINS,
            w.total,
        )
        den = np.minimum(mass, w.total - mass)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where((den > 1e-12 * w.total) & np.isfinite(cost), (cost + vc) / den, np.inf)
        for t in np.argsort(ratio, kind="stable")[:2]:
            if not np.isfinite(ratio[t]):
                break
            picks = []
            b = int(t)
            for i in range(g.E - 1, -1, -1):
                picks.append(int(choice[i, b]))
                b = int(parent[i, b])
            picks.reverse()
            cand = _Candidate(
                float(ratio[t]),
                cut_vertices,
                [opts[i][2][o] for i, o in enumerate(picks)],
                [list(opts[i][3][o]) for i, o in enumerate(picks)],
            )
            heapq.heappush(pool, (-cand.ratio, -serial, cand))
            serial += 1
            if len(pool) > 4 * refine:
                heapq.heappop(pool)
    if not pool:
        raise CutError("no admissible cut found")
    cands = [c for _, _, c in sorted(pool, key=lambda t: (-t[0], -t[1]))]
    best_val = math.inf
    best = None
    history = [min(c.ratio for c in cands)]
    seen = set()
    tried = 0
    for cand in cands:
        key = (cand.cut_vertices, tuple(cand.colors), tuple(len(c) for c in cand.cuts))
        if key in seen:
            continue
        seen.add(key)
        r = _Refiner(w, cand)
        val = r.run(pairs=False)
        if val < best_val:
            best_val, best = val, r
        history.append(min(history[-1], best_val))
        tried += 1
        if tried >= refine:
            break
    val = best.run(pairs=True)
    best_val = min(best_val, val)
    history.append(min(history[-1], best_val))
    cut = _to_cut(g, best.cut_vertices, best.colors, best.cuts)
    value = evaluate_cut(g, cut, weight)
    return CheegerEstimate(value, cut, weight is not None, tuple(history), nsk, nsk >= max_skeletons)


# ---------------------------------------------------------------------------
# discretized oracle


@dataclass(frozen=True)
class OracleResult:
    value: float
    n: int
    iterations: int
    max_cuts_per_edge: int | None


def cheeger_oracle(
    g: MetricGraph,
    weight=None,
    n: int = 128,
    max_cuts_per_edge: int | None = 2,
    start: float | None = None,
    max_edges: int = ORACLE_MAX_EDGES,
) -> OracleResult:
    """Exact optimum over cuts at the points ``j ℓ_e / n``, via Dinkelbach iterations of a MILP.

    Binary ``x`` colours each of the ``n`` segments per edge, binary ``y``
    marks cut nodes; an uncut node forces equal colours on its segments.
    """
    if n < 8:
        raise ValueError("n must be at least 8")
    if g.E > max_edges:
        raise ValueError(f"oracle is capped at {max_edges} edges, graph has {g.E}")
    w = _Weight(g, weight)
    nodes_w: list[float] = [w.vertex(vi) for vi in range(g.V)]
    fixed: list[bool] = [g.vertices[vi].bc == DIRICHLET or g.degree(vi) < 2 for vi in range(g.V)]
    seg_m: list[float] = []
    inc: list[list[int]] = [[] for _ in range(g.V)]
    edge_nodes: list[list[int]] = []
    for i, e in enumerate(g.edges):
        ell = e.length
        xs = ell * np.arange(n + 1) / n
        ids = [g.vertex_index(e.u)]
        for j in range(1, n):
            ids.append(len(nodes_w))
            nodes_w.append(w.point(i, float(xs[j])))
            fixed.append(False)
            inc.append([])
        ids.append(g.vertex_index(e.v))
        edge_nodes.append(ids[1:-1])
        masses = np.asarray(w.mass(i, xs[:-1], xs[1:]), dtype=float)
        for j in range(n):
            s = len(seg_m)
            seg_m.append(float(masses[j]))
            inc[ids[j]].append(s)
            inc[ids[j + 1]].append(s)
    ns, nn = len(seg_m), len(nodes_w)
    m = np.asarray(seg_m)
    wy = np.asarray(nodes_w)
    M = float(m.sum())
    rows, cols, vals = [], [], []
    r = 0
    for u in range(nn):
        if fixed[u] or len(inc[u]) < 2:
            continue
        s0 = inc[u][0]
        for s in inc[u][1:]:
            for sg in (1.0, -1.0):
                rows += [r, r, r]
                cols += [s, s0, ns + u]
                vals += [sg, -sg, -1.0]
                r += 1
    cons = [LinearConstraint(coo_matrix((vals, (rows, cols)), shape=(r, ns + nn)).tocsr(), -np.inf, 0.0)]
    cons.append(LinearConstraint(np.concatenate([m, np.zeros(nn)])[None, :], -np.inf, M / 2.0))
    cons.append(LinearConstraint(np.concatenate([np.ones(ns), np.zeros(nn)])[None, :], 1.0, np.inf))
    if max_cuts_per_edge is not None:
        for ids in edge_nodes:
            row = np.zeros(ns + nn)
            row[[ns + u for u in ids]] = 1.0
            cons.append(LinearConstraint(row[None, :], -np.inf, float(max_cuts_per_edge)))
    ub = np.ones(ns + nn)
    ub[ns:][np.asarray(fixed)] = 0.0
    integrality = np.ones(ns + nn)
    rate = float(start) if start is not None else 0.0
    feasible = False
    best = math.inf
    it = 0
    for it in range(1, 60):
        c = np.concatenate([-rate * m, wy])
        res = milp(c, constraints=cons, integrality=integrality, bounds=Bounds(0.0, ub),
                   options={"mip_rel_gap": 1e-9})
        if res.x is None:
            raise RuntimeError(f"oracle MILP failed: {res.message}")
        if feasible and res.fun >= -1e-10 * max(1.0, rate) * M:
            break
        x = np.round(res.x)
        cur = float(wy @ x[ns:]) / float(m @ x[:ns])
        best = min(best, cur)
        if feasible and not cur < rate * (1.0 - 1e-13):
            break
        rate, feasible = cur, True
    return OracleResult(best, n, it, max_cuts_per_edge)


@dataclass(frozen=True)
class ConvergedCheeger:
    value: float
    search: CheegerEstimate
    oracle: OracleResult | None

    @property
    def agreement(self) -> float | None:
        if self.oracle is None:
            return None
        return abs(self.search.value - self.oracle.value) / self.oracle.value


def converged_cheeger(g: MetricGraph, weight=None, n: int = 128) -> ConvergedCheeger:
    """``min(search, oracle)``; the oracle is skipped above its edge cap."""
    est = cheeger_search(g, weight)
    orc = None
    if g.E <= ORACLE_MAX_EDGES:
        orc = cheeger_oracle(g, weight, n=n, start=est.value)
    value = est.value if orc is None else min(est.value, orc.value)
    return ConvergedCheeger(value, est, orc)
