import math

import pytest
from hypothesis import HealthCheck, settings

from graphgap.corpus import make_random_graph, make_random_tree

settings.register_profile(
    "graphgap",
    max_examples=25,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("graphgap")


def random_family(n: int, seed: int = 1000):
    """``n`` random graphs alternating trees and graphs with 1 <= beta <= 3."""
    out = []
    for i in range(n):
        E = 3 + i % 10
        if i % 2 == 0:
            out.append(make_random_tree(E, seed=seed + i))
        else:
            beta = 1 + (i // 2) % 3
            out.append(make_random_graph(max(E, beta + 3), beta=beta, seed=seed + i))
    return out


def rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


@pytest.fixture
def close():
    def _close(a, b, rtol):
        assert math.isfinite(a) and rel(a, b) <= rtol, (a, b, rel(a, b))

    return _close
