import heapq
from abc import ABC, abstractmethod
from collections import deque

import numpy as np

from minorsep.graph_core import INT64_MAX, NO_PARENT, UNREACHABLE, Graph
from minorsep.helpers import (
    DomainError,
    ParameterError,
    SearchEngine,
    WeightOverflowError,
)

SearchResult = tuple[list[int], list[int], list[int]]


class BaseSearchEngine(ABC):
    """
    Abstract base for vertex-weighted shortest-path searches.

    A search settles vertices in order of (distance, id). The distance of a source
    ``s`` is ``w(s)``, and a vertex ``v`` reached from ``u`` gets ``dist(u) + w(v)``.
    """

    def __init__(self, graph: Graph, weights: np.ndarray, alive=None):
        """
        Initialize the engine with the graph, weights and an optional alive mask.
        """
        self.graph = graph
        self.weights = weights.tolist()
        self.alive = None if alive is None else np.asarray(alive, dtype=bool).tolist()

    @abstractmethod
    def search(self, sources: list[int], radius: int | None) -> SearchResult:
        """
        Return ``(dist, parent, order)`` for the truncated search from ``sources``.
        """
        raise NotImplementedError

    def _check_sources(self, sources: list[int]) -> None:
        if not sources:
            raise DomainError("a search needs at least one source")
        n = self.graph.n
        for s in sources:
            if not 0 <= s < n:
                raise DomainError(f"source {s} is not a vertex")
            if self.alive is not None and not self.alive[s]:
                raise DomainError(f"source {s} is outside the alive set")

    def _is_alive(self, v: int) -> bool:
        return self.alive is None or self.alive[v]


class BucketQueueEngine(BaseSearchEngine):
    """
    Integer Dijkstra over a monotone bucket queue.

    Buckets are keyed by exact distance and only the distinct keys go through a heap,
    so the cost does not depend on how large the weights are. Each bucket is popped
    whole and settled in ascending id order.
    """

    def search(self, sources, radius):
        self._check_sources(sources)
        n = self.graph.n
        adj = self.graph.adjacency
        w = self.weights
        dist = [UNREACHABLE] * n
        parent = [NO_PARENT] * n
        settled = bytearray(n)
        buckets: dict[int, list[int]] = {}
        keys: list[int] = []
        for s in sorted(set(sources)):
            d = w[s]
            if radius is not None and d > radius:
                continue
            dist[s] = d
            if d in buckets:
                buckets[d].append(s)
            else:
                buckets[d] = [s]
                heapq.heappush(keys, d)
        order = []
        alive = self.alive
        while keys:
            key = heapq.heappop(keys)
            bucket = buckets.pop(key)
            bucket.sort()
            for u in bucket:
                if settled[u] or dist[u] != key:
                    continue
                settled[u] = 1
                order.append(u)
                for v in adj[u]:
                    if settled[v] or (alive is not None and not alive[v]):
                        continue
                    nd = key + w[v]
                    if nd > INT64_MAX:
                        raise WeightOverflowError(
                            f"distance to vertex {v} exceeds 64 bits"
                        )
                    if radius is not None and nd > radius:
                        continue
                    if dist[v] == UNREACHABLE or nd < dist[v]:
                        dist[v] = nd
                        parent[v] = u
                        slot = buckets.get(nd)
                        if slot is None:
                            buckets[nd] = [v]
                            heapq.heappush(keys, nd)
                        else:
                            slot.append(v)
        for v in range(n):
            if not settled[v]:
                dist[v] = UNREACHABLE
                parent[v] = NO_PARENT
        return dist, parent, order


class SplitVertexEngine(BaseSearchEngine):
    """
    Literal split-vertex search: every vertex ``v`` becomes a chain of ``w(v)`` unit
    steps and the search is a plain breadth-first sweep over the chains.

    Runs in O(m + W) and is only practical for small total weight W.
    """

    def search(self, sources, radius):
        self._check_sources(sources)
        n = self.graph.n
        adj = self.graph.adjacency
        w = self.weights
        dist = [UNREACHABLE] * n
        parent = [NO_PARENT] * n
        entered = bytearray(n)
        current: deque[tuple[int, int]] = deque()
        for s in sorted(set(sources)):
            entered[s] = 1
            current.append((s, 1))
        order = []
        level = 1
        while current and (radius is None or level <= radius):
            upcoming: deque[tuple[int, int]] = deque()
            completed = []
            for v, step in current:
                if step == w[v]:
                    completed.append(v)
                else:
                    upcoming.append((v, step + 1))
            completed.sort()
            for u in completed:
                dist[u] = level
                order.append(u)
            for u in completed:
                for v in adj[u]:
                    if entered[v] or not self._is_alive(v):
                        continue
                    entered[v] = 1
                    parent[v] = u
                    upcoming.append((v, 1))
            current = upcoming
            level += 1
        for v in range(n):
            if dist[v] == UNREACHABLE:
                parent[v] = NO_PARENT
        return dist, parent, order


class SearchEngineFactory:
    """
    Factory to choose the shortest-path engine.
    """

    @staticmethod
    def get_engine(engine_type, **kwargs) -> BaseSearchEngine:
        """
        Return the engine registered under ``engine_type``.
        """
        if engine_type in (SearchEngine.BUCKET, SearchEngine.BUCKET.value):
            return BucketQueueEngine(**kwargs)
        elif engine_type in (SearchEngine.SPLIT, SearchEngine.SPLIT.value):
            return SplitVertexEngine(**kwargs)
        else:
            raise ParameterError(f"Unknown engine type: {engine_type}")
