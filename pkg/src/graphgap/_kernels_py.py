"""Pure-numpy versions of the hot kernels (used when the compiled module is absent)."""

from __future__ import annotations

import numpy as np

BACKEND = "python"

# entry quantities
VALUE, OUTDER = 0, 1


def secular_batch(sigmas, lengths, row_ptr, ent_edge, ent_end, ent_qty, ent_sign):
    """Row-normalized secular matrices, shape ``(len(sigmas), R, 2E)``."""
    sigmas = np.ascontiguousarray(sigmas, dtype=float)
    lengths = np.ascontiguousarray(lengths, dtype=float)
    n, E = sigmas.shape[0], lengths.shape[0]
    R = row_ptr.shape[0] - 1
    arg = np.outer(sigmas, lengths)
    c, s = np.cos(arg), np.sin(arg)
    one, zero = np.ones(n), np.zeros(n)
    M = np.zeros((n, R, 2 * E))
    for r in range(R):
        for j in range(row_ptr[r], row_ptr[r + 1]):
            e, end, sg = ent_edge[j], ent_end[j], ent_sign[j]
            if ent_qty[j] == VALUE:
                ca, cb = (one, zero) if end == 0 else (c[:, e], s[:, e])
            else:
                ca, cb = (zero, one) if end == 0 else (s[:, e], -c[:, e])
            M[:, r, 2 * e] += sg * ca
            M[:, r, 2 * e + 1] += sg * cb
    norms = np.sqrt(np.einsum("nrc,nrc->nr", M, M))
    norms[norms == 0.0] = 1.0
    M /= norms[:, :, None]
    return M


def binned_minplus(costs, masses, nbins, total_mass):
    """Min-cost combination of per-item options, binned by accumulated mass.

    ``costs[i]`` / ``masses[i]`` list the options of item ``i``.  Returns
    ``(best_cost, best_mass, choice, parent)``; ``choice[i, b]`` is
    the option chosen for item ``i`` at the state reaching bin ``b`` after
    item ``i`` and ``parent[i, b]`` the bin before it.
    """
    m = len(costs)
    width = total_mass / nbins if total_mass > 0 else 1.0
    cost = np.full(nbins + 1, np.inf)
    mass = np.zeros(nbins + 1)
    cost[0] = 0.0
    choice = np.full((m, nbins + 1), -1, dtype=np.int64)
    parent = np.full((m, nbins + 1), -1, dtype=np.int64)
    for i in range(m):
        ci = np.asarray(costs[i], dtype=float)
        mi = np.asarray(masses[i], dtype=float)
        live = np.nonzero(np.isfinite(cost))[0]
        tot_m = (mass[live][:, None] + mi[None, :]).ravel()
        tot_c = (cost[live][:, None] + ci[None, :]).ravel()
        t = np.minimum((tot_m / width).astype(np.int64), nbins)
        # first minimum per target bin, scanning (bin, option) in order
        order = np.lexsort((np.arange(t.size), tot_c, t))
        tb, first = np.unique(t[order], return_index=True)
        pick = order[first]
        cost = np.full(nbins + 1, np.inf)
        mass = np.zeros(nbins + 1)
        cost[tb] = tot_c[pick]
        mass[tb] = tot_m[pick]
        choice[i, tb] = pick % ci.shape[0]
        parent[i, tb] = live[pick // ci.shape[0]]
    return cost, mass, choice, parent
