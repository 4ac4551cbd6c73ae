"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Prints one line per kernel with both timings and the max abs difference.
"""

import argparse
import timeit

import numpy as np

from graphgap import _kernels_py
from graphgap.corpus import make_random_graph
from graphgap.eigen import _rows

try:
    from graphgap import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def secular_case():
    g = make_random_graph(12, beta=3, seed=1).graph
    r = _rows(g)
    sigmas = np.linspace(0.01, 40.0, 2048)
    return (sigmas, g.lengths, r.row_ptr, r.ent_edge, r.ent_end, r.ent_qty, r.ent_sign)


def minplus_case():
    rng = np.random.default_rng(0)
    costs = [rng.uniform(0, 1, size=rng.integers(2, 9)) for _ in range(40)]
    masses = [rng.uniform(0, 1, size=c.size) for c in costs]
    return (costs, masses, 4096, float(sum(m.max() for m in masses)))


def _diff(a, b):
    if isinstance(a, tuple):
        out = 0.0
        for x, y in zip(a, b):
            x, y = np.asarray(x, float), np.asarray(y, float)
            fin = np.isfinite(x) & np.isfinite(y)
            out = max(out, float(np.max(np.abs(x[fin] - y[fin]), initial=0.0)))
        return out
    return float(np.max(np.abs(a - b)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels_c is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation`")
    for name, case in (("secular_batch", secular_case()), ("binned_minplus", minplus_case())):
        py = getattr(_kernels_py, name)
        t_py = min(timeit.repeat(lambda: py(*case), number=1, repeat=args.repeat))
        line = f"{name:15s} python {t_py * 1e3:9.3f} ms"
        if _kernels_c is not None:
            cy = getattr(_kernels_c, name)
            t_cy = min(timeit.repeat(lambda: cy(*case), number=1, repeat=args.repeat))
            line += f"   cython {t_cy * 1e3:9.3f} ms   speedup {t_py / t_cy:6.1f}x"
            line += f"   max|diff| {_diff(py(*case), cy(*case)):.2e}"
        print(line)


if __name__ == "__main__":
    main()
