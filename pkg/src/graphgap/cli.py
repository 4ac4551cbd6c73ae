"""Command-line entry point: ``graphgap <subcommand> [options]``.

Exit codes: 0 success, 1 a certified check failed, 2 bad input,
3 the eigensolver could not certify its output.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bounds import report
from .cheeger import CutError, converged_cheeger
from .corpus import CorpusEntry, from_spec, standard_corpus
from .eigen import SolverCertificationError, eigenvalues
from .graph import GraphError, MetricGraph, is_tree, load_graph, point_along, walk_orientation

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3

# default plotting paths for the named families
_PLOT_PATHS = {
    "interval": ("e",),
    "star4": ("l1", "s1"),
    "star15": ("long", "s0"),
    "balloon": ("stem", "p0"),
    "equilateral_star": ("e0", "e1"),
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    graph: str | None = None
    corpus: str | None = None
    k: int = 6
    tol: float = 1e-9
    seed: int = 0
    weighted: bool = False
    out: str | None = None
    format: str = "csv"
    path: str | None = None
    jobs: int = 1


def _fmt(x) -> str:
    return "nan" if x is None else f"{float(x):.15g}"


def _load(cfg: RunConfig) -> tuple[str, MetricGraph, CorpusEntry | None]:
    if cfg.graph:
        try:
            return Path(cfg.graph).stem, load_graph(cfg.graph), None
        except OSError as exc:
            raise GraphError(f"cannot read {cfg.graph}: {exc.strerror}") from None
    if cfg.corpus:
        entry = from_spec(cfg.corpus)
        return entry.label, entry.graph, entry
    raise GraphError("one of --graph or --corpus is required")


def _write(cfg: RunConfig, name: str, text: str) -> None:
    if cfg.out is None:
        return
    d = Path(cfg.out)
    d.mkdir(parents=True, exist_ok=True)
    (d / name).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# subcommands


def cmd_spectrum(cfg: RunConfig) -> int:
    label, g, _ = _load(cfg)
    sp = eigenvalues(g, cfg.k, tol=cfg.tol)
    table = sp.to_csv()
    sys.stdout.write(table)
    _write(cfg, "spectrum.csv", table)
    if cfg.out is not None:
        for j in range(cfg.k):
            _write(cfg, f"eigenfunction_{j + 1}.csv", sp.eigenfunction(j).to_csv())
        _write(cfg, "spectrum.json", json.dumps({"graph": label, **sp.metadata()}, indent=2) + "\n")
    return EXIT_OK


def cmd_bounds(cfg: RunConfig) -> int:
    label, g, _ = _load(cfg)
    rep = report(g, k=cfg.k, graph_id=label)
    sys.stdout.write(rep.summary())
    _write(cfg, "bounds.csv", rep.to_csv())
    return EXIT_FAIL if rep.certified_failures else EXIT_OK


def cmd_cheeger(cfg: RunConfig) -> int:
    label, g, _ = _load(cfg)
    weight = None
    if cfg.weighted:
        if not g.has_dirichlet:
            raise GraphError("the weighted Cheeger constant needs a Dirichlet vertex")
        weight = eigenvalues(g, 1, tol=cfg.tol).eigenfunction(0)
    res = converged_cheeger(g, weight)
    print(f"graph: {label}")
    print(f"weighted: {str(cfg.weighted).lower()}")
    print(f"value: {_fmt(res.value)}")
    print(f"search: {_fmt(res.search.value)}")
    if res.oracle is not None:
        print(f"oracle: {_fmt(res.oracle.value)}")
        print(f"agreement: {_fmt(res.agreement)}")
    else:
        print("oracle: skipped (edge cap)")
    _write(cfg, "cheeger_cut.csv", res.search.cut.to_csv(g))
    return EXIT_OK


def cmd_affine(cfg: RunConfig) -> int:
    from .trees import affine_triple

    label, g, _ = _load(cfg)
    if not is_tree(g):
        raise GraphError(f"{label} is not a tree; affine triples exist only on trees")
    t = affine_triple(g)
    text = t.to_csv()
    sys.stdout.write(text)
    _write(cfg, "affine.csv", text)
    return EXIT_OK


def _verify_entry(entry: CorpusEntry, k: int, tol: float) -> tuple[str, bool, str]:
    try:
        depth = max(k, max(entry.oracle, default=0))
        sp = eigenvalues(entry.graph, depth, tol=tol)
        bad = [
            j for j, lam in entry.oracle.items()
            if abs(sp[j - 1] - lam) > 1e-8 * max(abs(lam), 1.0)
        ]
        rep = report(entry.graph, k=k, graph_id=entry.label)
    except SolverCertificationError as exc:
        return entry.label, False, f"solver: {exc}"
    notes = []
    if bad:
        notes.append("oracle mismatch at " + ",".join(map(str, bad)))
    notes += [f"{c.name}" for c in rep.certified_failures]
    return entry.label, not notes, "; ".join(notes)


def _verify_star(args):
    return _verify_entry(*args)


def cmd_corpus_verify(cfg: RunConfig) -> int:
    entries = [from_spec(cfg.corpus)] if cfg.corpus else standard_corpus(seed=cfg.seed)
    jobs = [(e, cfg.k, cfg.tol) for e in entries]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_verify_star, jobs))
    else:
        results = [_verify_star(j) for j in jobs]
    lines = ["entry,status,note"]
    for label, ok, note in results:
        print(f"{'PASS' if ok else 'FAIL'} {label}" + (f"  ({note})" if note else ""))
        lines.append(f'"{label}",{"pass" if ok else "fail"},"{note}"')
    failed = sum(not ok for _, ok, _ in results)
    print(f"{len(results) - failed}/{len(results)} entries passed")
    _write(cfg, "corpus_verify.csv", "\n".join(lines) + "\n")
    return EXIT_FAIL if failed else EXIT_OK


def _default_path(g: MetricGraph, entry: CorpusEntry | None) -> tuple[str, ...]:
    if entry is not None and entry.name in _PLOT_PATHS:
        return _PLOT_PATHS[entry.name]
    return (g.edges[0].id,)


def sample_path(g: MetricGraph, path, funcs, n: int = 400):
    """Arc length and function values sampled along a walk of edge ids."""
    walk_orientation(g, path)  # validates adjacency
    total = sum(g.edge(e).length for e in path)
    s = np.linspace(0.0, total, n)
    rows = []
    for t in s:
        p = point_along(g, path, float(t))
        i = g.edge_index(p.edge)
        rows.append((float(t), p.edge, p.position, *(float(f.value(i, p.position)) for f in funcs)))
    return rows


def cmd_plot(cfg: RunConfig) -> int:
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    from .harnack import gamma1, harnack

    label, g, entry = _load(cfg)
    path = tuple(p.strip() for p in cfg.path.split(",")) if cfg.path else _default_path(g, entry)
    for eid in path:
        g.edge(eid)
    sp = eigenvalues(g, 2, tol=cfg.tol)
    funcs = [sp.eigenfunction(0), sp.eigenfunction(1)]
    rows = sample_path(g, path, funcs)
    guides = {}
    if g.has_dirichlet and not gamma1(g, funcs[0]).single_point:
        hd = harnack(g, funcs[0])
        guides = {"m1": hd.m1, "M1": hd.M1}

    out = Path(cfg.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    stem = "profile"
    if cfg.format in ("csv", "both"):
        lines = ["s,edge_id,x,phi1,phi2"]
        lines += [",".join([_fmt(r[0]), r[1], _fmt(r[2]), _fmt(r[3]), _fmt(r[4])]) for r in rows]
        (out / f"{stem}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        if guides:
            text = "name,value\n" + "".join(f"{k},{_fmt(v)}\n" for k, v in guides.items())
            (out / f"{stem}_guides.csv").write_text(text, encoding="utf-8")
    if cfg.format in ("svg", "both"):
        plt.rcParams["svg.hashsalt"] = "graphgap"
        fig, ax = plt.subplots(figsize=(6, 3.5))
        s = [r[0] for r in rows]
        ax.plot(s, [r[3] for r in rows], label="φ₁")
        ax.plot(s, [r[4] for r in rows], label="φ₂")
        for name, val in guides.items():
            ax.axhline(val, linestyle="--", linewidth=0.8, color="gray")
            ax.annotate(name, (s[-1], val), fontsize=8, ha="right", va="bottom")
        ax.axhline(0.0, color="black", linewidth=0.5)
        ax.set_xlabel("arc length along " + "→".join(path))
        ax.set_title(label)
        ax.legend()
        fig.tight_layout()
        fig.savefig(out / f"{stem}.svg", format="svg", metadata={"Date": None})
        plt.close(fig)
    print(f"wrote {stem} ({cfg.format}) to {out}")
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "bounds": cmd_bounds,
    "cheeger": cmd_cheeger,
    "affine": cmd_affine,
    "corpus-verify": cmd_corpus_verify,
    "plot": cmd_plot,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--graph", help="JSON graph file")
    src.add_argument("--corpus", help="corpus entry, e.g. star4:a=0.5")
    common.add_argument("--k", type=int, default=6, help="number of eigenvalues (default 6)")
    common.add_argument("--tol", type=float, default=1e-9, help="eigenvalue tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, default=0, help="seed for the random corpus (default 0)")
    common.add_argument("--weighted", action="store_true", help="use the φ₁-weighted Cheeger constant")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=("csv", "svg", "both"), default="csv")
    common.add_argument("--path", help="plot: comma-separated edge ids forming a walk")
    common.add_argument("--jobs", type=int, default=1, help="corpus-verify: worker processes")

    parser = argparse.ArgumentParser(prog="graphgap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__name__.removeprefix("cmd_").replace("_", " "))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    cfg = RunConfig(**vars(ns))
    if cfg.k < 1 or cfg.tol <= 0 or cfg.jobs < 1:
        print("error: --k and --jobs must be positive, --tol must be > 0", file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[cfg.command](cfg)
    except SolverCertificationError as exc:
        print(f"solver certification failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (GraphError, CutError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
