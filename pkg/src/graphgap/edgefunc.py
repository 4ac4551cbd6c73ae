"""Closed-form calculus for edge functions built from ``x**n * cos(w x)`` / ``sin(w x)``.

Eigenfunctions are ``a cos(sx) + b sin(sx)`` on each edge and affine trial
functions are ``p x + q``; every quantity the bounds need (norms, weighted
inner products, Dirichlet energies, cut masses) is an integral of a product
of such terms, which :class:`TrigPoly` integrates exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np

if TYPE_CHECKING:
    from .graph import MetricGraph

COS, SIN = 0, 1
_SERIES_CUTOFF = 1.0


def _series_integral(n: int, w: float, kind: int, x0: float, x1: float) -> float:
    # Taylor expansion of cos/sin, valid for |w x| <= 1
    total = 0.0
    k = 0
    power = 0 if kind == COS else 1
    fact = 1.0
    sign = 1.0
    while True:
        m = n + power + 1
        term = sign * w**power / fact * (x1**m - x0**m) / m
        total += term
        if k > 2 and abs(term) <= 1e-18 * max(abs(total), 1e-300):
            break
        if k > 60:
            break
        k += 1
        power += 2
        fact *= (power - 1) * power
        sign = -sign
    return total


def _antiderivative(n: int, w: float, kind: int, x: float) -> float:
    c, s = math.cos(w * x), math.sin(w * x)
    if n == 0:
        return s / w if kind == COS else -c / w
    if kind == COS:
        return x**n * s / w - n / w * _antiderivative(n - 1, w, SIN, x)
    return -(x**n) * c / w + n / w * _antiderivative(n - 1, w, COS, x)


def integrate_term(n: int, w: float, kind: int, x0: float, x1: float) -> float:
    """Exact value of the integral of ``x**n * trig(w x)`` over ``[x0, x1]``."""
    if kind == SIN and w == 0.0:
        return 0.0
    if w == 0.0:
        return (x1 ** (n + 1) - x0 ** (n + 1)) / (n + 1)
    if abs(w) * max(abs(x0), abs(x1)) <= _SERIES_CUTOFF:
        return _series_integral(n, w, kind, x0, x1)
    return _antiderivative(n, w, kind, x1) - _antiderivative(n, w, kind, x0)


class TrigPoly:
    """Finite sum of ``coef * x**n * cos(w x)`` or ``coef * x**n * sin(w x)`` with ``w >= 0``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, float, int], float] | None = None):
        self.terms: dict[tuple[int, float, int], float] = {}
        for key, coef in (terms or {}).items():
            self._add(key, coef)

    def _add(self, key: tuple[int, float, int], coef: float) -> None:
        n, w, kind = key
        if w < 0:
            w = -w
            if kind == SIN:
                coef = -coef
        if kind == SIN and w == 0.0:
            return
        if coef == 0.0:
            return
        key = (n, w, kind)
        self.terms[key] = self.terms.get(key, 0.0) + coef

    @classmethod
    def affine(cls, slope: float, offset: float) -> "TrigPoly":
        return cls({(0, 0.0, COS): offset, (1, 0.0, COS): slope})

    @classmethod
    def wave(cls, a: float, b: float, sigma: float) -> "TrigPoly":
        return cls({(0, sigma, COS): a, (0, sigma, SIN): b})

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        out = TrigPoly(self.terms)
        for k, c in other.terms.items():
            out._add(k, c)
        return out

    def scale(self, c: float) -> "TrigPoly":
        return TrigPoly({k: c * v for k, v in self.terms.items()})

    def __mul__(self, other: "TrigPoly") -> "TrigPoly":
        out = TrigPoly()
        for (n1, w1, k1), c1 in self.terms.items():
            for (n2, w2, k2), c2 in other.terms.items():
                n = n1 + n2
                c = 0.5 * c1 * c2
                if k1 == COS and k2 == COS:
                    out._add((n, w1 - w2, COS), c)
                    out._add((n, w1 + w2, COS), c)
                elif k1 == SIN and k2 == SIN:
                    out._add((n, w1 - w2, COS), c)
                    out._add((n, w1 + w2, COS), -c)
                elif k1 == SIN:  # sin(w1) cos(w2)
                    out._add((n, w1 + w2, SIN), c)
                    out._add((n, w1 - w2, SIN), c)
                else:  # cos(w1) sin(w2)
                    out._add((n, w1 + w2, SIN), c)
                    out._add((n, w2 - w1, SIN), c)
        return out

    def derivative(self) -> "TrigPoly":
        out = TrigPoly()
        for (n, w, kind), c in self.terms.items():
            if n > 0:
                out._add((n - 1, w, kind), n * c)
            if w != 0.0:
                if kind == COS:
                    out._add((n, w, SIN), -w * c)
                else:
                    out._add((n, w, COS), w * c)
        return out

    def integrate(self, x0: float, x1: float) -> float:
        return math.fsum(
            c * integrate_term(n, w, kind, x0, x1) for (n, w, kind), c in self.terms.items()
        )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for (n, w, kind), c in self.terms.items():
            trig = np.cos(w * x) if kind == COS else np.sin(w * x)
            out = out + c * x**n * trig
        return out


@dataclass(frozen=True, eq=False)
class PiecewiseAffine:
    """Edge-wise linear function ``slope * x + offset`` in each edge's orientation."""

    graph: "MetricGraph"
    slopes: tuple[float, ...]
    offsets: tuple[float, ...]

    @classmethod
    def from_mapping(
        cls, graph: "MetricGraph", values: Mapping[str, tuple[float, float]]
    ) -> "PiecewiseAffine":
        slopes, offsets = [], []
        for e in graph.edges:
            s, o = values[e.id]
            slopes.append(float(s))
            offsets.append(float(o))
        return cls(graph, tuple(slopes), tuple(offsets))

    def edge_poly(self, i: int) -> TrigPoly:
        return TrigPoly.affine(self.slopes[i], self.offsets[i])

    def value(self, i: int, x):
        return self.slopes[i] * np.asarray(x, dtype=float) + self.offsets[i]

    def shifted(self, c: float) -> "PiecewiseAffine":
        return PiecewiseAffine(self.graph, self.slopes, tuple(o + c for o in self.offsets))

    def continuity_residual(self) -> float:
        g = self.graph
        worst = 0.0
        for vi in range(g.V):
            vals = [
                self.offsets[h.edge] + (self.slopes[h.edge] * g.edges[h.edge].length if h.end else 0.0)
                for h in g.incident(vi)
            ]
            worst = max(worst, max(vals) - min(vals))
        return worst


def edge_polys(f) -> Sequence[TrigPoly]:
    g = f.graph
    return [f.edge_poly(i) for i in range(g.E)]


def inner(f, h, weight=None) -> float:
    """Exact ``∫ f h w²`` over the graph; ``weight`` is a function whose square is the weight."""
    g = f.graph
    if h.graph is not g or (weight is not None and weight.graph is not g):
        raise ValueError("operands live on different graphs")
    total = []
    for i, e in enumerate(g.edges):
        p = f.edge_poly(i) * h.edge_poly(i)
        if weight is not None:
            w = weight.edge_poly(i)
            p = p * (w * w)
        total.append(p.integrate(0.0, e.length))
    return math.fsum(total)


def weighted_derivative_norm2(f, weight=None) -> float:
    """``∫ (f')² w²`` over the graph."""
    g = f.graph
    total = []
    for i, e in enumerate(g.edges):
        d = f.edge_poly(i).derivative()
        p = d * d
        if weight is not None:
            w = weight.edge_poly(i)
            p = p * (w * w)
        total.append(p.integrate(0.0, e.length))
    return math.fsum(total)


def dirichlet_energy(f) -> float:
    return weighted_derivative_norm2(f)
