"""
Vertex-weighted breadth-first search.

The length of a path is the sum of the weights of its vertices, so a one-vertex path
has length ``w(v)`` and a source sits at distance ``w(source)``.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from minorsep.graph_core import NO_PARENT, UNREACHABLE, Graph, VertexSet, WeightFn
from minorsep.helpers import DomainError, SearchEngine
from minorsep.repository import SearchEngineFactory

logger = logging.getLogger(__name__)

OUTSIDE = -2


@dataclass(frozen=True, eq=False)
class WTree:
    """
    Rooted vertex-weighted shortest-path tree (a forest when there are several roots).

    Arrays are indexed by host vertex id. Vertices that were not reached carry
    ``dist == UNREACHABLE``, ``parent == NO_PARENT``, ``depth == -1`` and
    ``subtree_size == 0``.

    Fields::

        roots         the sources that were actually reached
        parent        parent in the tree, NO_PARENT for roots
        dist          vertex-weighted distance from the nearest source
        order         settle order, nondecreasing in dist, ids ascending on ties
        subtree_size  unweighted number of descendants including the vertex itself
        depth         hop depth below the root
        weights       the weight array the tree was computed with
        radius        truncation radius, None when unlimited
    """

    roots: tuple[int, ...]
    parent: np.ndarray
    dist: np.ndarray
    order: np.ndarray
    subtree_size: np.ndarray
    depth: np.ndarray
    weights: np.ndarray
    radius: int | None = None

    @cached_property
    def members(self) -> VertexSet:
        return VertexSet.from_sorted(np.sort(self.order))

    @property
    def size(self) -> int:
        return int(self.order.shape[0])

    @property
    def n(self) -> int:
        return int(self.parent.shape[0])

    def contains(self, v: int) -> bool:
        return 0 <= v < self.n and int(self.dist[v]) != UNREACHABLE

    def root_of(self, v: int) -> int:
        _require_member(self, v)
        while int(self.parent[v]) != NO_PARENT:
            v = int(self.parent[v])
        return v

    @cached_property
    def root_labels(self) -> np.ndarray:
        """Root of every member, NO_PARENT outside the tree."""
        labels = [NO_PARENT] * self.n
        parent = self.parent.tolist()
        for v in self.order.tolist():
            p = parent[v]
            labels[v] = v if p == NO_PARENT else labels[p]
        return np.asarray(labels, dtype=np.int64)

    @property
    def max_level(self) -> int:
        """Deepest level occupied by any member, that is the largest distance."""
        return int(self.dist[self.order].max()) if self.size else 0


def tree_from_parents(parent: Sequence[int], weights: WeightFn) -> WTree:
    """
    Build a WTree from explicit parent pointers.

    ``parent[v]`` is NO_PARENT for a root and OUTSIDE for a vertex left out of the
    tree. Distances follow the vertex-weight convention.
    """
    n = len(parent)
    children: list[list[int]] = [[] for _ in range(n)]
    roots = []
    for v, p in enumerate(parent):
        if p == NO_PARENT:
            roots.append(v)
        elif p >= 0:
            if not 0 <= p < n:
                raise DomainError(f"parent {p} of vertex {v} is not a vertex")
            children[p].append(v)
    w = weights.weights.tolist()
    dist = [UNREACHABLE] * n
    stack = list(roots)
    for r in roots:
        dist[r] = w[r]
    visited = 0
    while stack:
        u = stack.pop()
        visited += 1
        for c in children[u]:
            dist[c] = dist[u] + w[c]
            stack.append(c)
    if visited != sum(1 for p in parent if p != OUTSIDE):
        raise DomainError("parent pointers form a cycle or hang off an excluded vertex")
    reached = [v for v in range(n) if dist[v] != UNREACHABLE]
    order = sorted(reached, key=lambda v: (dist[v], v))
    clean = [p if p >= 0 else NO_PARENT for p in parent]
    return _assemble(n, weights.weights, dist, clean, order, None)


def _require_member(tree: WTree, v: int) -> None:
    if not tree.contains(v):
        raise DomainError(f"vertex {v} is not in the tree")


def _as_sources(sources: VertexSet | Iterable[int] | int) -> list[int]:
    if isinstance(sources, (int, np.integer)):
        return [int(sources)]
    if isinstance(sources, VertexSet):
        return sources.tolist()
    return sorted({int(s) for s in sources})


def weighted_bfs(
    graph: Graph,
    weights: WeightFn,
    sources: VertexSet | Iterable[int] | int,
    radius: int | None = None,
    *,
    alive: VertexSet | np.ndarray | None = None,
    engine: SearchEngine | str = SearchEngine.BUCKET,
) -> WTree:
    """
    Truncated multi-source vertex-weighted shortest-path forest.

    The tree holds exactly the vertices at distance at most ``radius`` from the
    source set. ``alive`` restricts the search to an induced subgraph. Ties among
    equal distances go to the smaller vertex id, both in settle order and in the
    choice of parent, so the result is deterministic.
    """
    if isinstance(alive, VertexSet):
        alive = alive.mask(graph.n)
    searcher = SearchEngineFactory.get_engine(
        engine, graph=graph, weights=weights.weights, alive=alive
    )
    dist, parent, order = searcher.search(_as_sources(sources), radius)
    tree = _assemble(graph.n, weights.weights, dist, parent, order, radius)
    logger.debug(
        "wbfs from %d source(s) reached %d/%d vertices (radius=%s)",
        len(tree.roots),
        tree.size,
        graph.n,
        radius,
    )
    return tree


def _assemble(n, weights, dist, parent, order, radius) -> WTree:
    depth = [-1] * n
    size = [0] * n
    roots = []
    for v in order:
        p = parent[v]
        if p == NO_PARENT:
            depth[v] = 0
            roots.append(v)
        else:
            depth[v] = depth[p] + 1
        size[v] = 1
    for v in reversed(order):
        p = parent[v]
        if p != NO_PARENT:
            size[p] += size[v]
    arrays = [
        np.asarray(a, dtype=np.int64) for a in (parent, dist, order, size, depth)
    ]
    for arr in arrays:
        arr.setflags(write=False)
    return WTree(
        roots=tuple(roots),
        parent=arrays[0],
        dist=arrays[1],
        order=arrays[2],
        subtree_size=arrays[3],
        depth=arrays[4],
        weights=weights,
        radius=radius,
    )


def path_to_root(tree: WTree, v: int) -> list[int]:
    """Vertices from ``v`` up to its root, following parent pointers."""
    _require_member(tree, v)
    path = [int(v)]
    parent = tree.parent
    while int(parent[path[-1]]) != NO_PARENT:
        path.append(int(parent[path[-1]]))
    return path


def tree_path(tree: WTree, u: int, v: int) -> list[int]:
    """
    The unique tree path from ``u`` to ``v``.

    Raises :class:`DomainError` if either endpoint is outside the tree or the two
    lie under different roots.
    """
    _require_member(tree, u)
    _require_member(tree, v)
    parent, depth = tree.parent, tree.depth
    up, down = [int(u)], [int(v)]
    a, b = int(u), int(v)
    while depth[a] > depth[b]:
        a = int(parent[a])
        up.append(a)
    while depth[b] > depth[a]:
        b = int(parent[b])
        down.append(b)
    while a != b:
        a, b = int(parent[a]), int(parent[b])
        if a == NO_PARENT or b == NO_PARENT:
            raise DomainError(f"vertices {u} and {v} lie in different trees")
        up.append(a)
        down.append(b)
    down.pop()
    return up + down[::-1]


def levels(tree: WTree, v: int) -> tuple[int, int]:
    """
    Level interval ``(lo, hi)`` of ``v``: ``hi = dist(v)`` and the interval holds
    ``w(v)`` consecutive levels.
    """
    _require_member(tree, v)
    hi = int(tree.dist[v])
    return hi - int(tree.weights[v]) + 1, hi


def tree_distance(tree: WTree, ancestor: int, v: int) -> int:
    """Weight of the tree path from ``v`` up to its ancestor, both ends included."""
    return int(tree.dist[v]) - int(tree.dist[ancestor]) + int(tree.weights[ancestor])
