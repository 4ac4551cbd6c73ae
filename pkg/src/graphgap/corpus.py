"""Example graphs with known spectra, plus seeded random families."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .graph import DIRICHLET, STANDARD, GraphError, MetricGraph, make_graph

ELL_MIN = 0.1


@dataclass(frozen=True, eq=False)
class CorpusEntry:
    name: str
    params: dict
    graph: MetricGraph
    oracle: dict = field(default_factory=dict)  # 1-based index -> exact eigenvalue
    note: str = ""

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        args = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}:{args}"


def _bc(dirichlet: bool) -> str:
    return DIRICHLET if dirichlet else STANDARD


def make_interval(L: float = 1.0, conditions: str = "DD") -> CorpusEntry:
    """Single edge; ``conditions`` gives the two end conditions, ``D`` or ``N``."""
    conditions = conditions.upper()
    if L <= 0 or len(conditions) != 2 or set(conditions) - {"D", "N"}:
        raise GraphError(f"bad interval parameters L={L!r} conditions={conditions!r}")
    g = make_graph(
        {"a": _bc(conditions[0] == "D"), "b": _bc(conditions[1] == "D")},
        [("e", "a", "b", float(L))],
    )
    nd = conditions.count("D")
    if nd == 2:
        oracle = {k: (k * math.pi / L) ** 2 for k in range(1, 11)}
    elif nd == 1:
        oracle = {k: ((k - 0.5) * math.pi / L) ** 2 for k in range(1, 11)}
    else:
        oracle = {k: ((k - 1) * math.pi / L) ** 2 for k in range(1, 11)}
    return CorpusEntry("interval", {"L": L, "conditions": conditions}, g, oracle, "sine/cosine series")


def make_star4(a: float = 0.5) -> CorpusEntry:
    """Two unit and two length-``a`` Dirichlet edges at one standard vertex."""
    if not 0 < a < 1:
        raise GraphError("star4 needs 0 < a < 1")
    g = make_graph(
        {"c": STANDARD, "d1": DIRICHLET, "d2": DIRICHLET, "d3": DIRICHLET, "d4": DIRICHLET},
        [("l1", "c", "d1", 1.0), ("l2", "c", "d2", 1.0), ("s1", "c", "d3", a), ("s2", "c", "d4", a)],
    )
    oracle = {1: math.pi**2 / (1 + a) ** 2, 2: math.pi**2}
    return CorpusEntry("star4", {"a": a}, g, oracle, "λ1 = π²/(1+a)², λ2 = π²")


def make_star15(k: int = 5) -> CorpusEntry:
    """``k`` unit Dirichlet edges and one Dirichlet edge of length 2 at a common vertex."""
    if k < 1:
        raise GraphError("star15 needs k >= 1")
    vs = {"c": STANDARD, "z": DIRICHLET, **{f"d{i}": DIRICHLET for i in range(k)}}
    es = [("long", "z", "c", 2.0)] + [(f"s{i}", "c", f"d{i}", 1.0) for i in range(k)]
    r = math.atan(math.sqrt(2 * k + 1))
    return CorpusEntry("star15", {"k": k}, make_graph(vs, es), {1: r**2, 2: (math.pi - r) ** 2}, "tan²σ = 2k+1")


def make_balloon(k: int = 3) -> CorpusEntry:
    """A unit Dirichlet stem attached to ``k`` parallel unit edges."""
    if k < 2:
        raise GraphError("balloon needs k >= 2")
    vs = {"z": DIRICHLET, "c": STANDARD, "p": STANDARD}
    es = [("stem", "z", "c", 1.0)] + [(f"p{i}", "c", "p", 1.0) for i in range(k)]
    r = math.atan(1.0 / math.sqrt(k))
    return CorpusEntry("balloon", {"k": k}, make_graph(vs, es), {1: r**2, 2: (math.pi - r) ** 2}, "tan²σ = 1/k")


def make_equilateral_star(k: int = 3, a: float = 1.0) -> CorpusEntry:
    """``k`` Dirichlet edges of length ``a`` at one standard vertex."""
    if k < 1 or a <= 0:
        raise GraphError("equilateral star needs k >= 1 and a > 0")
    vs = {"c": STANDARD, **{f"d{i}": DIRICHLET for i in range(k)}}
    es = [(f"e{i}", "c", f"d{i}", float(a)) for i in range(k)]
    lam2 = (math.pi / a) ** 2 if k >= 2 else (1.5 * math.pi / a) ** 2
    oracle = {1: (math.pi / (2 * a)) ** 2, 2: lam2}
    return CorpusEntry("equilateral_star", {"k": k, "a": a}, make_graph(vs, es), oracle, "λ1 = π²/4a²")


# ---------------------------------------------------------------------------
# random families


def _length(rng: random.Random, ell_min: float) -> float:
    return round(rng.uniform(ell_min, 1.0), 12)


def _tree_topology(E: int, rng: random.Random) -> list[tuple[int, int]]:
    """Sequential leaf attachment without creating degree-2 vertices (``E >= 3``)."""
    edges = [(0, 1), (0, 2), (0, 3)]
    deg = {0: 3, 1: 1, 2: 1, 3: 1}
    nxt = 4
    while len(edges) < E:
        left = E - len(edges)
        inner = [v for v in deg if deg[v] > 1]
        pool = list(deg) if left >= 2 else inner
        v = rng.choice(pool)
        grow = 2 if deg[v] == 1 else 1
        for _ in range(grow):
            edges.append((v, nxt))
            deg[v] += 1
            deg[nxt] = 1
            nxt += 1
    return edges


def make_random_tree(E: int = 6, seed: int = 0, ell_min: float = ELL_MIN) -> CorpusEntry:
    """Random tree, Dirichlet at every leaf, standard elsewhere, lengths uniform in ``[ell_min, 1]``."""
    if E < 1 or not 0 < ell_min <= 1:
        raise GraphError("random tree needs E >= 1 and 0 < ell_min <= 1")
    rng = random.Random(seed)
    if E == 1:
        top = [(0, 1)]
    elif E == 2:
        top = [(0, 1), (0, 2)]
    else:
        top = _tree_topology(E, rng)
    deg: dict[int, int] = {}
    for u, v in top:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    vs = {f"v{i}": _bc(deg[i] == 1) for i in sorted(deg)}
    es = [(f"e{j}", f"v{u}", f"v{v}", _length(rng, ell_min)) for j, (u, v) in enumerate(top)]
    params = {"E": E, "seed": seed, "ell_min": ell_min}
    return CorpusEntry("random_tree", params, make_graph(vs, es))


def make_random_graph(E: int = 6, beta: int = 1, seed: int = 0, ell_min: float = ELL_MIN) -> CorpusEntry:
    """A random Dirichlet-leaved tree with ``beta`` extra edges between standard vertices."""
    if beta < 0 or E - beta < 3:
        raise GraphError("random graph needs beta >= 0 and E - beta >= 3")
    rng = random.Random(seed * 7919 + beta)
    base = make_random_tree(E - beta, seed=rng.randrange(2**31), ell_min=ell_min).graph
    inner = [v.id for v in base.vertices if v.bc == STANDARD]
    vs = {v.id: v.bc for v in base.vertices}
    es = [(e.id, e.u, e.v, e.length) for e in base.edges]
    for j in range(beta):
        if len(inner) >= 2:
            u, v = rng.sample(inner, 2)
        else:
            u = v = inner[0]
        es.append((f"x{j}", u, v, _length(rng, ell_min)))
    params = {"E": E, "beta": beta, "seed": seed, "ell_min": ell_min}
    return CorpusEntry("random_graph", params, make_graph(vs, es))


def make_saguaro(tree: MetricGraph, multiplicities) -> CorpusEntry:
    from .trees import build_saguaro

    s = build_saguaro(tree, multiplicities)
    return CorpusEntry("saguaro", {"multiplicities": dict(s.multiplicities)}, s.graph)


def make_ornamented(E: int = 4, pendants: int = 2, seed: int = 0, ell_min: float = ELL_MIN) -> CorpusEntry:
    from .trees import random_ornamented

    ot = random_ornamented(E, pendants, seed=seed, ell_min=ell_min)
    return CorpusEntry("ornamented", {"E": E, "pendants": pendants, "seed": seed}, ot.graph)


# ---------------------------------------------------------------------------
# named lookup (``name:key=value,...``)

GENERATORS = {
    "interval": make_interval,
    "star4": make_star4,
    "star15": make_star15,
    "balloon": make_balloon,
    "equilateral_star": make_equilateral_star,
    "random_tree": make_random_tree,
    "random_graph": make_random_graph,
    "ornamented": make_ornamented,
}


def _coerce(raw: str):
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    return raw


def from_spec(text: str) -> CorpusEntry:
    """Build an entry from ``name`` or ``name:key=value,key=value``."""
    name, _, rest = text.partition(":")
    if name not in GENERATORS:
        raise GraphError(f"unknown corpus family {name!r}; choose from {', '.join(sorted(GENERATORS))}")
    kwargs = {}
    for part in filter(None, rest.split(",")):
        key, eq, val = part.partition("=")
        if not eq:
            raise GraphError(f"corpus parameter {part!r} is not key=value")
        kwargs[key.strip()] = _coerce(val.strip())
    try:
        return GENERATORS[name](**kwargs)
    except TypeError as exc:
        raise GraphError(str(exc)) from None


def named_corpus() -> list[CorpusEntry]:
    """Every closed-form example."""
    return [
        make_interval(1.0, "DD"),
        make_interval(1.0, "DN"),
        make_interval(2.0, "NN"),
        make_star4(0.5),
        make_star4(0.9),
        make_star4(0.2),
        make_star15(1),
        make_star15(3),
        make_star15(5),
        make_star15(10),
        make_balloon(2),
        make_balloon(3),
        make_balloon(6),
        make_equilateral_star(3, 1.0),
        make_equilateral_star(4, 0.7),
    ]


def random_corpus(n_trees: int = 8, n_graphs: int = 6, seed: int = 0) -> list[CorpusEntry]:
    out = [make_random_tree(3 + (i % 4), seed=seed + i) for i in range(n_trees)]
    for i in range(n_graphs):
        out.append(make_random_graph(5 + (i % 2), beta=1 + (i % 2), seed=seed + i))
    return out


def standard_corpus(seed: int = 0) -> list[CorpusEntry]:
    return named_corpus() + random_corpus(seed=seed)
