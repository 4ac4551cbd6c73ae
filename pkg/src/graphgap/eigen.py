"""Eigenvalues and eigenfunctions of the metric-graph Laplacian.

On every edge an eigenfunction for ``lambda = sigma**2`` is
``a cos(sigma x) + b sin(sigma x)``.  The vertex conditions give a square
``2E x 2E`` system ``M(sigma) (a, b) = 0``; eigenvalues are the sigma where
``M`` drops rank.  Roots are located by scanning the smallest singular value
and polished by bracketing, and the number found below each gap is checked
against an independent count (decoupled edge spectrum plus the inertia of the
vertex Dirichlet-to-Neumann matrix).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import kernels
from .edgefunc import TrigPoly
from .graph import DIRICHLET, MetricGraph

RANK_RTOL = 1e-7
ROOT_RTOL = 1e-9
_CHUNK = 256


class SolverCertificationError(RuntimeError):
    """The eigenvalue count could not be certified."""


# ---------------------------------------------------------------------------
# secular matrix


@dataclass(frozen=True)
class _Rows:
    row_ptr: np.ndarray
    ent_edge: np.ndarray
    ent_end: np.ndarray
    ent_qty: np.ndarray
    ent_sign: np.ndarray


def _row_structure(g: MetricGraph) -> _Rows:
    ptr, edge, end, qty, sign = [0], [], [], [], []

    def push(entries):
        for h, q, s in entries:
            edge.append(h.edge)
            end.append(h.end)
            qty.append(q)
            sign.append(s)
        ptr.append(len(edge))

    for i, v in enumerate(g.vertices):
        inc = g.incident(i)
        if v.bc == DIRICHLET:
            push([(inc[0], 0, 1.0)])
            continue
        for h in inc[1:]:
            push([(inc[0], 0, 1.0), (h, 0, -1.0)])
        push([(h, 1, 1.0) for h in inc])
    return _Rows(
        np.asarray(ptr, dtype=np.int64),
        np.asarray(edge, dtype=np.int64),
        np.asarray(end, dtype=np.int64),
        np.asarray(qty, dtype=np.int64),
        np.asarray(sign, dtype=float),
    )


def _rows(g: MetricGraph) -> _Rows:
    cache = g.__dict__.setdefault("_secular_rows", None)
    if cache is None:
        cache = _row_structure(g)
        g.__dict__["_secular_rows"] = cache
    return cache


def secular_matrices(g: MetricGraph, sigmas) -> np.ndarray:
    r = _rows(g)
    return kernels.secular_batch(
        np.atleast_1d(np.asarray(sigmas, dtype=float)),
        g.lengths, r.row_ptr, r.ent_edge, r.ent_end, r.ent_qty, r.ent_sign,
    )


def secular_matrix(g: MetricGraph, sigma: float) -> np.ndarray:
    return secular_matrices(g, [sigma])[0]


def singular_values(g: MetricGraph, sigma: float) -> np.ndarray:
    """Singular values of ``M(sigma)`` in ascending order."""
    return np.linalg.svd(secular_matrix(g, sigma), compute_uv=False)[::-1]


def secular_smin(g: MetricGraph, sigma: float) -> float:
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    return float(singular_values(g, sigma)[0])


def _smin_grid(g: MetricGraph, sigmas: np.ndarray) -> np.ndarray:
    out = np.empty(len(sigmas))
    for k in range(0, len(sigmas), _CHUNK):
        mats = secular_matrices(g, sigmas[k : k + _CHUNK])
        out[k : k + _CHUNK] = np.linalg.svd(mats, compute_uv=False)[:, -1]
    return out


# ---------------------------------------------------------------------------
# independent eigenvalue count


def dtn_matrix(g: MetricGraph, sigma: float) -> np.ndarray:
    """Dirichlet-to-Neumann matrix on the standard vertices at ``sigma``."""
    std = [i for i, v in enumerate(g.vertices) if v.bc != DIRICHLET]
    pos = {v: j for j, v in enumerate(std)}
    lam = np.zeros((len(std), len(std)))
    for e in g.edges:
        t = sigma * e.length
        s, c = math.sin(t), math.cos(t)
        iu, iv = g.vertex_index(e.u), g.vertex_index(e.v)
        if iu == iv:
            lam[pos[iu], pos[iu]] += 2.0 * sigma * (1.0 - c) / s
            continue
        for a in (iu, iv):
            if a in pos:
                lam[pos[a], pos[a]] -= sigma * c / s
        if iu in pos and iv in pos:
            lam[pos[iu], pos[iv]] += sigma / s
            lam[pos[iv], pos[iu]] += sigma / s
    return lam


def eigencount(g: MetricGraph, sigma: float) -> tuple[int, bool]:
    """Number of eigenvalues strictly below ``sigma**2``, and whether the count is well conditioned."""
    t = sigma * g.lengths / math.pi
    m = np.floor(t)
    decoupled = int(np.sum(np.where(m == t, m - 1, m)))
    sep = float(np.min(np.abs(np.sin(sigma * g.lengths))))
    lam = dtn_matrix(g, sigma)
    if lam.size == 0:
        return decoupled, sep > 1e-6
    ev = np.linalg.eigvalsh(lam)
    scale = max(1.0, float(np.max(np.abs(ev))))
    ok = sep > 1e-6 and float(np.min(np.abs(ev))) > 1e-9 * scale
    return decoupled + int(np.sum(ev > 0)), ok


_PROBES = (0.5, 0.4, 0.6, 0.3, 0.7, 0.45, 0.55, 0.2, 0.8, 0.35, 0.65)


def _count_between(g: MetricGraph, lo: float, hi: float) -> int | None:
    cands = [lo + t * (hi - lo) for t in _PROBES]
    score = [float(np.min(np.abs(np.sin(s * g.lengths)))) for s in cands]
    for j in np.argsort(score)[::-1]:
        n, ok = eigencount(g, cands[j])
        if ok:
            return n
    return None


# ---------------------------------------------------------------------------
# spectrum


@dataclass(frozen=True)
class Level:
    lam: float
    sigma: float
    multiplicity: int


@dataclass(frozen=True, eq=False)
class Spectrum:
    graph: MetricGraph
    levels: tuple[Level, ...]
    k: int
    grid_step: float
    halvings: int
    refine_iterations: int
    certified: bool
    weyl_ok: bool
    count_checks: int
    window_top: float

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        out = [lv.lam for lv in self.levels for _ in range(lv.multiplicity)]
        return np.asarray(out[: self.k])

    @cached_property
    def sigmas(self) -> np.ndarray:
        out = [lv.sigma for lv in self.levels for _ in range(lv.multiplicity)]
        return np.asarray(out[: self.k])

    def multiplicity_of(self, j: int) -> int:
        return self.levels[self.level_of(j)[0]].multiplicity

    def level_of(self, j: int) -> tuple[int, int]:
        """``(level index, index within the level)`` for the 0-based eigenvalue ``j``."""
        if not 0 <= j < self.k:
            raise IndexError(j)
        acc = 0
        for li, lv in enumerate(self.levels):
            if j < acc + lv.multiplicity:
                return li, j - acc
            acc += lv.multiplicity
        raise IndexError(j)

    def __len__(self) -> int:
        return self.k

    def __getitem__(self, j: int) -> float:
        return float(self.eigenvalues[j])

    def eigenfunction(self, j: int) -> "EdgeWaveFunction":
        li, idx = self.level_of(j)
        return eigenfunction(self.graph, self.levels[li].sigma, idx)

    def metadata(self) -> dict:
        return {
            "grid_step": self.grid_step,
            "halvings": self.halvings,
            "refine_iterations": self.refine_iterations,
            "certified": self.certified,
            "weyl_ok": self.weyl_ok,
            "count_checks": self.count_checks,
            "window_top": self.window_top,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "lambda", "multiplicity"])
        for j in range(self.k):
            w.writerow([j + 1, f"{self.eigenvalues[j]:.15g}", self.multiplicity_of(j)])
        return buf.getvalue()


def _det(g: MetricGraph, sigma: float) -> float:
    sign, logdet = np.linalg.slogdet(secular_matrix(g, sigma))
    return float(sign * math.exp(max(logdet, -700.0)))


def _golden(f, lo: float, hi: float, width: float, maxit: int = 200) -> tuple[float, int]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    it = 0
    while hi - lo > width and it < maxit:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
        it += 1
    return (c if fc <= fd else d), it


def _refine(g: MetricGraph, lo: float, hi: float) -> tuple[float, int, int] | None:
    """Polish a singular-value minimum in ``[lo, hi]``; ``(sigma, multiplicity, iterations)`` or None."""
    smin = lambda s: secular_smin(g, s)  # noqa: E731
    res = minimize_scalar(smin, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13 * hi})
    s0, iters = float(res.x), int(res.nfev)
    sv = singular_values(g, s0)
    if sv[0] > 1e-4 * sv[-1]:
        return None
    root = None
    delta = max(1e-7 * s0, 1e-14)
    for _ in range(4):
        a, b = max(lo, s0 - delta), min(hi, s0 + delta)
        fa, fb = _det(g, a), _det(g, b)
        if fa == 0.0:
            root = a
        elif fb == 0.0:
            root = b
        elif fa * fb < 0:
            root, rr = brentq(lambda s: _det(g, s), a, b, xtol=1e-300, rtol=1e-15, full_output=True)
            iters += rr.function_calls
        if root is not None:
            break
        delta *= 4.0
    if root is None:
        a, b = max(lo, s0 - 1e-6 * s0), min(hi, s0 + 1e-6 * s0)
        root, it = _golden(smin, a, b, 4e-16 * s0)
        iters += it
    sv = singular_values(g, root)
    if sv[0] > ROOT_RTOL * sv[-1]:
        return None
    mult = int(np.sum(sv < RANK_RTOL * sv[-1]))
    return float(root), max(mult, 1), iters


def _find_top(g: MetricGraph, k: int) -> float:
    L, step = g.total_length, math.pi / (2.0 * g.total_length)
    s = max(math.pi * (k - g.E - g.V - 1) / L, step)
    for _ in range(100000):
        n = _count_between(g, s, s + step / 2.0)
        if n is not None and n >= k:
            # make the window top a well-conditioned count point
            for t in _PROBES:
                cand = s + t * step / 2.0
                cnt, ok = eigencount(g, cand)
                if ok and cnt >= k:
                    return cand
        s += step
    raise SolverCertificationError("could not bracket the requested eigenvalues")


def eigenvalues(
    g: MetricGraph,
    k: int,
    tol: float = 1e-9,
    grid_factor: int = 8,
    max_halvings: int = 5,
) -> Spectrum:
    """First ``k`` eigenvalues (with multiplicity) of the Laplacian on ``g``."""
    if k < 1:
        raise ValueError("k must be positive")
    if not tol > 0:
        raise ValueError("tol must be positive")
    L = g.total_length
    zero = not g.has_dirichlet
    base = [Level(0.0, 0.0, 1)] if zero else []
    if k <= len(base):
        return Spectrum(g, tuple(base), k, 0.0, 0, 0, True, True, 0, 0.0)

    top = _find_top(g, k)
    n_top, _ = eigencount(g, top)
    bracket = g.E + g.V + 1
    for attempt in range(max_halvings + 1):
        h = math.pi / (grid_factor * 2**attempt * L)
        grid = h * np.arange(1, int(math.ceil(top / h)) + 3)
        s = _smin_grid(g, grid)
        found: list[tuple[float, int]] = []
        iters = 0
        for i in range(1, len(grid) - 1):
            if s[i] <= s[i - 1] and s[i] <= s[i + 1] and (s[i] < s[i - 1] or s[i] < s[i + 1]):
                r = _refine(g, grid[i - 1], grid[i + 1])
                if r is None:
                    continue
                iters += r[2]
                if r[0] < top:
                    found.append((r[0], r[1]))
        found.sort()
        roots: list[tuple[float, int]] = []
        for sg, m in found:
            if roots and abs(sg - roots[-1][0]) <= max(tol, 1e-12) * sg:
                roots[-1] = (roots[-1][0], max(m, roots[-1][1]))
            else:
                roots.append((sg, m))

        ok = True
        checks = 0
        acc = len(base)
        for j in range(len(roots) + 1):
            if j < len(roots):
                lo = roots[j - 1][0] if j else 0.0
                n = _count_between(g, lo, roots[j][0])
            else:
                n = n_top
            checks += 1
            if n is None or n != acc:
                ok = False
                break
            if j < len(roots):
                acc += roots[j][1]
        if ok:
            cum = np.searchsorted([r[0] for r in roots], grid, side="left")
            mults = np.concatenate([[0], np.cumsum([r[1] for r in roots])])
            counts = len(base) + mults[cum]
            weyl_ok = bool(np.all(np.abs(counts - L * grid / math.pi) <= bracket))
            levels = base + [Level(sg * sg, sg, m) for sg, m in roots]
            total = sum(lv.multiplicity for lv in levels)
            if total < k:
                raise SolverCertificationError(f"found {total} eigenvalues below window top, need {k}")
            return Spectrum(g, tuple(levels), k, h, attempt, iters, True, weyl_ok, checks, top)
    raise SolverCertificationError(
        f"eigenvalue count not certified after {max_halvings} grid halvings"
    )


# ---------------------------------------------------------------------------
# eigenfunctions


@dataclass(frozen=True, eq=False)
class EdgeWaveFunction:
    """``a_e cos(sigma x) + b_e sin(sigma x) = A_e sin(sigma x + theta_e)`` on each edge."""

    graph: MetricGraph
    sigma: float
    a: np.ndarray
    b: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def lam(self) -> float:
        return self.sigma**2

    @property
    def amplitudes(self) -> np.ndarray:
        return np.hypot(self.a, self.b)

    @property
    def phases(self) -> np.ndarray:
        return np.mod(np.arctan2(self.a, self.b), 2.0 * math.pi)

    def records(self) -> list[tuple[str, float, float]]:
        A, th = self.amplitudes, self.phases
        return [(e.id, float(A[i]), float(th[i])) for i, e in enumerate(self.graph.edges)]

    def edge_poly(self, i: int) -> TrigPoly:
        if self.sigma == 0.0:
            return TrigPoly.affine(0.0, float(self.a[i]))
        return TrigPoly.wave(float(self.a[i]), float(self.b[i]), self.sigma)

    def value(self, i: int, x):
        x = np.asarray(x, dtype=float)
        return self.a[i] * np.cos(self.sigma * x) + self.b[i] * np.sin(self.sigma * x)

    def derivative(self, i: int, x):
        x = np.asarray(x, dtype=float)
        s = self.sigma
        return s * (self.b[i] * np.cos(s * x) - self.a[i] * np.sin(s * x))

    def end_value(self, edge: int, end: int) -> float:
        return float(self.value(edge, 0.0 if end == 0 else self.graph.edges[edge].length))

    def outgoing_derivative(self, edge: int, end: int) -> float:
        """Derivative at the edge end, pointing into the edge."""
        if end == 0:
            return float(self.derivative(edge, 0.0))
        return -float(self.derivative(edge, self.graph.edges[edge].length))

    def vertex_value(self, vi: int) -> float:
        h = self.graph.incident(vi)[0]
        return self.end_value(h.edge, h.end)

    def mass(self, i: int, x0, x1):
        """Closed-form integral of the square over ``[x0, x1]`` on edge ``i``."""
        x0 = np.asarray(x0, dtype=float)
        x1 = np.asarray(x1, dtype=float)
        A2 = self.a[i] ** 2 + self.b[i] ** 2
        th = math.atan2(self.a[i], self.b[i])
        d = x1 - x0
        return 0.5 * A2 * (d - np.cos(self.sigma * (x0 + x1) + 2.0 * th) * d * np.sinc(self.sigma * d / math.pi))

    def norm2(self) -> float:
        return math.fsum(float(self.mass(i, 0.0, e.length)) for i, e in enumerate(self.graph.edges))

    def edge_extrema(self, i: int, x0: float = 0.0, x1: float | None = None) -> tuple[float, float, float, float]:
        """``(min, argmin, max, argmax)`` of the function on ``[x0, x1]`` of edge ``i``."""
        if x1 is None:
            x1 = self.graph.edges[i].length
        xs = [x0, x1]
        if self.sigma > 0:
            th = math.atan2(self.a[i], self.b[i])
            # critical points: sigma x + th = pi/2 + m pi
            m_lo = math.ceil((self.sigma * x0 + th - math.pi / 2) / math.pi)
            m_hi = math.floor((self.sigma * x1 + th - math.pi / 2) / math.pi)
            for m in range(m_lo, m_hi + 1):
                x = (math.pi / 2 + m * math.pi - th) / self.sigma
                if x0 < x < x1:
                    xs.append(x)
        vals = self.value(i, np.asarray(xs))
        jmin, jmax = int(np.argmin(vals)), int(np.argmax(vals))
        return float(vals[jmin]), float(xs[jmin]), float(vals[jmax]), float(xs[jmax])

    def residuals(self) -> dict[str, float]:
        """Vertex-condition residuals scaled by the largest amplitude."""
        g = self.graph
        scale = float(np.max(self.amplitudes)) or 1.0
        dscale = scale * max(self.sigma, 1.0)
        cont = kirch = dirich = 0.0
        for vi, v in enumerate(g.vertices):
            inc = g.incident(vi)
            vals = [self.end_value(h.edge, h.end) for h in inc]
            if v.bc == DIRICHLET:
                dirich = max(dirich, abs(vals[0]) / scale)
                continue
            cont = max(cont, (max(vals) - min(vals)) / scale)
            kirch = max(kirch, abs(math.fsum(self.outgoing_derivative(h.edge, h.end) for h in inc)) / dscale)
        return {"continuity": cont, "kirchhoff": kirch, "dirichlet": dirich}

    def scaled(self, c: float) -> "EdgeWaveFunction":
        return EdgeWaveFunction(self.graph, self.sigma, c * self.a, c * self.b)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["edge_id", "A", "theta", "sigma"])
        for eid, A, th in self.records():
            w.writerow([eid, f"{A:.15g}", f"{th:.15g}", f"{self.sigma:.15g}"])
        return buf.getvalue()


def _gram(g: MetricGraph, sigma: float, coeffs: np.ndarray) -> np.ndarray:
    m = coeffs.shape[1]
    polys = [
        [TrigPoly.wave(coeffs[2 * i, j], coeffs[2 * i + 1, j], sigma) for i in range(g.E)]
        for j in range(m)
    ]
    G = np.empty((m, m))
    for p in range(m):
        for q in range(p, m):
            G[p, q] = G[q, p] = math.fsum(
                (polys[p][i] * polys[q][i]).integrate(0.0, e.length) for i, e in enumerate(g.edges)
            )
    return G


def _orient(f: EdgeWaveFunction) -> EdgeWaveFunction:
    # positive integral (the ground state is then nonnegative); fall back to the largest end value
    g = f.graph
    total = math.fsum(f.edge_poly(i).integrate(0.0, e.length) for i, e in enumerate(g.edges))
    scale = float(np.max(f.amplitudes)) * g.total_length
    if abs(total) > 1e-9 * scale:
        return f if total > 0 else f.scaled(-1.0)
    vals = [(abs(f.end_value(i, end)), f.end_value(i, end)) for i in range(g.E) for end in (0, 1)]
    mid = [(abs(float(f.value(i, 0.5 * e.length))), float(f.value(i, 0.5 * e.length))) for i, e in enumerate(g.edges)]
    best = max(vals + mid)
    return f if best[1] >= 0 else f.scaled(-1.0)


def eigenfunction(g: MetricGraph, sigma: float, index: int = 0) -> EdgeWaveFunction:
    """L2-normalized eigenfunction ``index`` of the eigenspace at ``sigma``."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0.0:
        if g.has_dirichlet:
            raise ValueError("0 is not an eigenvalue of a graph with a Dirichlet vertex")
        if index != 0:
            raise ValueError("eigenvalue 0 is simple")
        c = 1.0 / math.sqrt(g.total_length)
        return EdgeWaveFunction(g, 0.0, np.full(g.E, c), np.zeros(g.E))
    M = secular_matrix(g, sigma)
    _, sv, vt = np.linalg.svd(M)
    if sv[-1] > RANK_RTOL * sv[0]:
        raise ValueError(f"sigma={sigma!r} is not an eigenvalue (smallest singular value {sv[-1]:.3g})")
    mult = int(np.sum(sv < RANK_RTOL * sv[0]))
    if not 0 <= index < mult:
        raise ValueError(f"index {index} out of range for multiplicity {mult}")
    basis = vt[-mult:][::-1].T
    G = _gram(g, sigma, basis)
    C = np.linalg.cholesky(G)
    ortho = basis @ np.linalg.inv(C).T
    v = ortho[:, index]
    f = EdgeWaveFunction(g, float(sigma), v[0::2].copy(), v[1::2].copy())
    return _orient(f)
