"""
Graph families for tests and benchmarks.

Deterministic families are built from numpy index arithmetic; the random ones come
from networkx and are reproducible for a fixed seed. In grids vertex ``(r, c)`` has id
``r·b + c``.
"""

import logging
from typing import Any, Callable

import networkx as nx
import numpy as np

from minorsep.graph_core import Graph, build_graph
from minorsep.helpers import GraphFamily, ParameterError

logger = logging.getLogger(__name__)


def _positive(name: str, value: int, minimum: int = 1) -> int:
    if int(value) < minimum:
        raise ParameterError(f"{name} must be at least {minimum}, got {value}")
    return int(value)


def grid(a: int, b: int) -> Graph:
    """``a × b`` grid; ``2ab - a - b`` edges."""
    a, b = _positive("a", a), _positive("b", b)
    ids = np.arange(a * b, dtype=np.int64).reshape(a, b)
    horizontal = np.stack([ids[:, :-1].ravel(), ids[:, 1:].ravel()], axis=1)
    vertical = np.stack([ids[:-1, :].ravel(), ids[1:, :].ravel()], axis=1)
    return build_graph(a * b, np.concatenate([horizontal, vertical]))


def grid_torus(a: int, b: int) -> Graph:
    a, b = _positive("a", a, 3), _positive("b", b, 3)
    ids = np.arange(a * b, dtype=np.int64).reshape(a, b)
    horizontal = np.stack([ids.ravel(), np.roll(ids, -1, axis=1).ravel()], axis=1)
    vertical = np.stack([ids.ravel(), np.roll(ids, -1, axis=0).ravel()], axis=1)
    return build_graph(a * b, np.concatenate([horizontal, vertical]))


def path(n: int) -> Graph:
    n = _positive("n", n)
    ids = np.arange(n, dtype=np.int64)
    return build_graph(n, np.stack([ids[:-1], ids[1:]], axis=1))


def cycle(n: int) -> Graph:
    n = _positive("n", n, 3)
    ids = np.arange(n, dtype=np.int64)
    return build_graph(n, np.stack([ids, np.roll(ids, -1)], axis=1))


def star(n: int) -> Graph:
    """Center 0 joined to leaves ``1..n-1``."""
    n = _positive("n", n)
    leaves = np.arange(1, n, dtype=np.int64)
    return build_graph(n, np.stack([np.zeros_like(leaves), leaves], axis=1))


def complete(n: int) -> Graph:
    n = _positive("n", n)
    u, v = np.triu_indices(n, k=1)
    return build_graph(n, np.stack([u, v], axis=1))


def _from_networkx(graph: nx.Graph) -> Graph:
    edges = np.asarray(sorted(graph.edges()), dtype=np.int64).reshape(-1, 2)
    return build_graph(graph.number_of_nodes(), edges)


def random_gnm(n: int, m: int, seed: int = 0) -> Graph:
    n = _positive("n", n)
    if not 0 <= m <= n * (n - 1) // 2:
        raise ParameterError(f"m must lie in [0, {n * (n - 1) // 2}] for n={n}, got {m}")
    return _from_networkx(nx.gnm_random_graph(n, m, seed=seed))


def random_regular(n: int, d: int, seed: int = 0) -> Graph:
    n = _positive("n", n)
    if not 0 <= d < n or (n * d) % 2:
        raise ParameterError(f"no simple {d}-regular graph on {n} vertices")
    return _from_networkx(nx.random_regular_graph(d, n, seed=seed))


FAMILIES: dict[GraphFamily, Callable[..., Graph]] = {
    GraphFamily.GRID: grid,
    GraphFamily.GRID_TORUS: grid_torus,
    GraphFamily.PATH: path,
    GraphFamily.CYCLE: cycle,
    GraphFamily.STAR: star,
    GraphFamily.COMPLETE: complete,
    GraphFamily.RANDOM_GNM: random_gnm,
    GraphFamily.RANDOM_REGULAR: random_regular,
}


def as_family(family: GraphFamily | str) -> GraphFamily:
    try:
        return GraphFamily(family)
    except ValueError:
        raise ParameterError(
            f"unknown graph family {family!r}; expected one of "
            f"{sorted(f.value for f in GraphFamily)}"
        ) from None


def generate(family: GraphFamily | str, **params: Any) -> Graph:
    """
    Build a graph of the named family.

    Examples::

        >>> generate("grid", a=3, b=3).m
        12
        >>> generate("random_regular", n=100, d=3, seed=7).m
        150
    """
    family = as_family(family)
    builder = FAMILIES[family]
    try:
        graph = builder(**params)
    except TypeError as exc:
        raise ParameterError(f"bad parameters for {family.value}: {exc}") from exc
    logger.debug("Generated %s %s: %r", family.value, params, graph)
    return graph


def family_for_size(family: GraphFamily | str, n: int, seed: int = 0) -> Graph:
    """A member of ``family`` with about ``n`` vertices, as used by the benchmarks."""
    family = as_family(family)
    side = max(3, int(round(n**0.5)))
    if family in (GraphFamily.GRID, GraphFamily.GRID_TORUS):
        return generate(family, a=side, b=side)
    if family == GraphFamily.RANDOM_GNM:
        return generate(family, n=n, m=2 * n, seed=seed)
    if family == GraphFamily.RANDOM_REGULAR:
        return generate(family, n=n + (n % 2), d=3, seed=seed)
    return generate(family, n=n)
