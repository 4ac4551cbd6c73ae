"""Independent reference computations used only by the tests.

None of these share code with the package's solvers: spectra come from a
P1 finite-element discretization, extrema from dense sampling, currents from
a small Kirchhoff solve.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
from graphgap.graph import DIRICHLET, MetricGraph


def fem_eigenvalues(g: MetricGraph, k: int, m: int, refine: int = 1) -> np.ndarray:
    """First ``k`` eigenvalues of linear finite elements, about ``m·refine`` cells per unit length."""
    node = {}
    count = 0
    for v in g.vertices:
        if v.bc == DIRICHLET:
            node[v.id] = None
        else:
            node[v.id] = count
            count += 1
    rows = []
    for e in g.edges:
        cells = max(4, int(np.ceil(m * e.length))) * refine
        h = e.length / cells
        ids = [node[e.u]]
        for _ in range(cells - 1):
            ids.append(count)
            count += 1
        ids.append(node[e.v])
        rows.append((ids, h))
    K = np.zeros((count, count))
    M = np.zeros((count, count))
    k_loc = np.array([[1.0, -1.0], [-1.0, 1.0]])
    m_loc = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
    for ids, h in rows:
        for a, b in zip(ids, ids[1:]):
            loc = [a, b]
            for i in range(2):
                for j in range(2):
                    if loc[i] is None or loc[j] is None:
                        continue
                    K[loc[i], loc[j]] += k_loc[i, j] / h
                    M[loc[i], loc[j]] += m_loc[i, j] * h
    w = scipy.linalg.eigh(K, M, eigvals_only=True, subset_by_index=[0, k - 1])
    return np.clip(w, 0.0, None)


def fem_extrapolated(g: MetricGraph, k: int, m: int = 200) -> np.ndarray:
    """Richardson extrapolation of two FEM levels (error O(h⁴))."""
    a = fem_eigenvalues(g, k, m)
    b = fem_eigenvalues(g, k, m, refine=2)
    return (4.0 * b - a) / 3.0


def sampled_gamma1_min(phi, samples: int = 4001) -> tuple[float, float]:
    """(min of φ₁ off the rising Dirichlet pieces, max of φ₁), by dense sampling."""
    g = phi.graph
    lo, hi = np.inf, -np.inf
    for i, e in enumerate(g.edges):
        xs = np.linspace(0.0, e.length, samples)
        ys = np.asarray(phi.value(i, xs), dtype=float)
        hi = max(hi, float(ys.max()))
        keep = np.ones_like(xs, dtype=bool)
        for end, bc in ((0, g.vertex(e.u).bc), (1, g.vertex(e.v).bc)):
            if bc != DIRICHLET:
                continue
            seq = ys if end == 0 else ys[::-1]
            rise = np.nonzero(np.diff(seq) <= 0.0)[0]
            stop = rise[0] if rise.size else len(seq) - 1
            if end == 0:
                keep[:stop] = False
            else:
                keep[len(seq) - stop:] = False
        if keep.any():
            lo = min(lo, float(ys[keep].min()))
    return lo, hi


def harmonic_slopes(g: MetricGraph, boundary: dict[str, float]) -> np.ndarray:
    """Edge slopes of the edgewise-affine function with given Dirichlet-vertex values
    that satisfies Kirchhoff at every standard vertex."""
    ids = [v.id for v in g.vertices]
    idx = {v: i for i, v in enumerate(ids)}
    n = len(ids)
    A = np.zeros((n, n))
    rhs = np.zeros(n)
    for e in g.edges:
        c = 1.0 / e.length
        a, b = idx[e.u], idx[e.v]
        A[a, a] += c
        A[b, b] += c
        A[a, b] -= c
        A[b, a] -= c
    for v, val in boundary.items():
        i = idx[v]
        A[i, :] = 0.0
        A[i, i] = 1.0
        rhs[i] = val
    pot = np.linalg.solve(A, rhs)
    return np.array([(pot[idx[e.v]] - pot[idx[e.u]]) / e.length for e in g.edges])
