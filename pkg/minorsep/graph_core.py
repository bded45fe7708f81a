"""
Graph representation shared by every other module.

Graphs are immutable, undirected and simple. Vertex ids are dense 0-based integers;
every derived graph (induced, quotient) is relabelled densely and returned together
with an explicit map back to the ids it came from.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from minorsep.helpers import (
    ContractError,
    DomainError,
    InputError,
    ParameterError,
    WeightOverflowError,
)

logger = logging.getLogger(__name__)

INT64_MAX = int(np.iinfo(np.int64).max)
UNREACHABLE = -1
NO_PARENT = -1


class VertexSet:
    """
    Sorted, duplicate-free set of vertex ids.

    Membership is a binary search on the id array; ``mask`` materialises a boolean
    vector when a caller needs O(1) lookups over a whole graph.

    Examples::

        >>> s = VertexSet([4, 1, 4, 2])
        >>> s.tolist()
        [1, 2, 4]
        >>> 2 in s, 3 in s
        (True, False)
    """

    __slots__ = ("_ids",)

    def __init__(self, ids: Iterable[int] = ()) -> None:
        arr = np.asarray(list(ids) if not isinstance(ids, np.ndarray) else ids)
        self._ids = np.unique(arr.astype(np.int64, copy=False))
        self._ids.setflags(write=False)

    @classmethod
    def from_sorted(cls, ids: np.ndarray) -> "VertexSet":
        obj = cls.__new__(cls)
        obj._ids = np.asarray(ids, dtype=np.int64)
        obj._ids.setflags(write=False)
        return obj

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "VertexSet":
        return cls.from_sorted(np.flatnonzero(mask))

    @property
    def ids(self) -> np.ndarray:
        return self._ids

    def __len__(self) -> int:
        return int(self._ids.shape[0])

    def __iter__(self) -> Iterator[int]:
        return iter(self._ids.tolist())

    def __contains__(self, vertex: object) -> bool:
        if not isinstance(vertex, (int, np.integer)):
            return False
        pos = int(np.searchsorted(self._ids, vertex))
        return pos < len(self) and int(self._ids[pos]) == int(vertex)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VertexSet):
            return NotImplemented
        return np.array_equal(self._ids, other._ids)

    def __hash__(self) -> int:
        return hash(self._ids.tobytes())

    def __repr__(self) -> str:
        head = self._ids[:8].tolist()
        more = "..." if len(self) > 8 else ""
        return f"VertexSet({head}{more}, size={len(self)})"

    def tolist(self) -> list[int]:
        return self._ids.tolist()

    def min(self) -> int:
        if not len(self):
            raise DomainError("min() of an empty vertex set")
        return int(self._ids[0])

    def mask(self, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=bool)
        out[self._ids] = True
        return out

    def union(self, other: "VertexSet") -> "VertexSet":
        return VertexSet.from_sorted(np.union1d(self._ids, other._ids))

    def difference(self, other: "VertexSet") -> "VertexSet":
        return VertexSet.from_sorted(np.setdiff1d(self._ids, other._ids))

    def intersection(self, other: "VertexSet") -> "VertexSet":
        return VertexSet.from_sorted(np.intersect1d(self._ids, other._ids))

    def isdisjoint(self, other: "VertexSet") -> bool:
        return not len(np.intersect1d(self._ids, other._ids))

    def check_range(self, n: int) -> None:
        if len(self) and (self._ids[0] < 0 or self._ids[-1] >= n):
            raise InputError(f"vertex ids must lie in [0, {n}); got {self!r}")

    def map_through(self, id_map: np.ndarray) -> "VertexSet":
        """Translate local ids to the ids ``id_map`` points at."""
        return VertexSet(np.asarray(id_map)[self._ids])


class Graph:
    """
    Undirected simple graph in compressed adjacency (CSR) form.

    ``indptr`` has n+1 monotone offsets and ``indices`` holds, for each vertex, its
    neighbours in ascending order. Every edge is stored once in each endpoint list, so
    ``len(indices) == 2 * m``.

    Use :func:`build_graph` to construct one from an edge list.
    """

    def __init__(self, indptr: np.ndarray, indices: np.ndarray) -> None:
        self._indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self._indices = np.ascontiguousarray(indices, dtype=np.int64)
        self._indptr.setflags(write=False)
        self._indices.setflags(write=False)

    @property
    def indptr(self) -> np.ndarray:
        return self._indptr

    @property
    def indices(self) -> np.ndarray:
        return self._indices

    @property
    def n(self) -> int:
        return int(self._indptr.shape[0] - 1)

    @property
    def m(self) -> int:
        return int(self._indices.shape[0] // 2)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self._indptr)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @property
    def min_degree(self) -> int:
        return int(self.degrees.min()) if self.n else 0

    @cached_property
    def adjacency(self) -> list[list[int]]:
        """Neighbour lists as Python lists, for tight traversal loops."""
        flat = self._indices.tolist()
        ptr = self._indptr.tolist()
        return [flat[ptr[v] : ptr[v + 1]] for v in range(self.n)]

    def neighbors(self, v: int) -> np.ndarray:
        return self._indices[self._indptr[v] : self._indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        pos = int(np.searchsorted(row, v))
        return pos < row.shape[0] and int(row[pos]) == v

    def edges(self) -> np.ndarray:
        """Edges as an (m, 2) array with u < v, sorted by (u, v)."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = src < self._indices
        return np.stack([src[keep], self._indices[keep]], axis=1)

    def to_scipy(self) -> sparse.csr_matrix:
        data = np.ones(self._indices.shape[0], dtype=np.int8)
        return sparse.csr_matrix(
            (data, self._indices, self._indptr), shape=(self.n, self.n)
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class WeightFn:
    """
    Positive 64-bit vertex weights with a cached exact total.
    """

    __slots__ = ("_weights", "_total")

    def __init__(self, weights: Sequence[int] | np.ndarray) -> None:
        try:
            arr = np.array(weights, dtype=np.int64)
        except OverflowError as exc:
            raise WeightOverflowError("vertex weight exceeds 64 bits") from exc
        if arr.ndim != 1:
            raise ParameterError("weights must be a one-dimensional sequence")
        if arr.size and int(arr.min()) < 1:
            raise ParameterError("every vertex weight must be at least 1")
        self._total = _exact_sum(arr)
        if self._total > INT64_MAX:
            raise WeightOverflowError(
                "total weight exceeds 64 bits", total_weight=self._total
            )
        arr.setflags(write=False)
        self._weights = arr

    @classmethod
    def constant(cls, n: int, value: int) -> "WeightFn":
        return cls(np.full(n, value, dtype=np.int64))

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def total(self) -> int:
        return self._total

    @property
    def n(self) -> int:
        return int(self._weights.shape[0])

    def __getitem__(self, v: int) -> int:
        return int(self._weights[v])

    def __len__(self) -> int:
        return self.n


def _exact_sum(arr: np.ndarray) -> int:
    if not arr.size:
        return 0
    if int(arr.max()) <= INT64_MAX // arr.size:
        return int(arr.sum())
    return int(np.sum(arr, dtype=object))


@dataclass(frozen=True)
class Partition:
    """
    Disjoint vertex parts with a vertex-to-part lookup.

    ``part_of[v]`` is the part id of ``v`` or -1 when ``v`` is outside the declared
    domain.
    """

    part_of: np.ndarray
    parts: tuple[VertexSet, ...]

    @classmethod
    def from_parts(cls, n: int, parts: Iterable[Iterable[int]]) -> "Partition":
        part_of = np.full(n, -1, dtype=np.int64)
        built = []
        for idx, part in enumerate(parts):
            vs = part if isinstance(part, VertexSet) else VertexSet(part)
            vs.check_range(n)
            if np.any(part_of[vs.ids] >= 0):
                raise DomainError(f"part {idx} overlaps an earlier part")
            part_of[vs.ids] = idx
            built.append(vs)
        return cls(part_of=part_of, parts=tuple(built))

    @classmethod
    def from_labels(cls, labels: np.ndarray) -> "Partition":
        labels = np.asarray(labels, dtype=np.int64)
        return cls(part_of=labels, parts=tuple(component_sets(labels)))

    def __len__(self) -> int:
        return len(self.parts)

    @property
    def sizes(self) -> list[int]:
        return [len(p) for p in self.parts]


def build_graph(n: int, edges: Iterable[Sequence[int]] | np.ndarray) -> Graph:
    """
    Build a simple graph on ``n`` vertices from an edge list.

    Parallel edges are merged and self-loops dropped. Any id outside ``[0, n)`` raises
    :class:`InputError`.
    """
    if n < 0:
        raise ParameterError(f"vertex count must be non-negative, got {n}")
    arr = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges))
    arr = arr.astype(np.int64, copy=False).reshape(-1, 2)
    if arr.size:
        bad = np.flatnonzero((arr < 0).any(axis=1) | (arr >= n).any(axis=1))
        if bad.size:
            u, v = arr[bad[0]].tolist()
            raise InputError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
    arr = arr[arr[:, 0] != arr[:, 1]]
    src = np.concatenate([arr[:, 0], arr[:, 1]])
    dst = np.concatenate([arr[:, 1], arr[:, 0]])
    mat = sparse.coo_matrix(
        (np.ones(src.shape[0], dtype=np.int32), (src, dst)), shape=(n, n)
    ).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return Graph(mat.indptr, mat.indices)


def _alive_mask(n: int, alive: VertexSet | np.ndarray | None) -> np.ndarray | None:
    if alive is None:
        return None
    if isinstance(alive, VertexSet):
        return alive.mask(n)
    return np.asarray(alive, dtype=bool)


def connected_components(
    graph: Graph, alive: VertexSet | np.ndarray | None = None
) -> tuple[np.ndarray, list[int]]:
    """
    Label the connected components of the subgraph induced by ``alive``.

    Label 0 is the largest component; ties go to the component holding the smaller
    minimum vertex id. Vertices outside ``alive`` get label -1.
    """
    n = graph.n
    mask = _alive_mask(n, alive)
    ids = np.arange(n, dtype=np.int64) if mask is None else np.flatnonzero(mask)
    labels = np.full(n, -1, dtype=np.int64)
    if not ids.size:
        return labels, []
    mat = graph.to_scipy()
    if mask is not None:
        mat = mat[ids][:, ids]
    count, raw = csgraph.connected_components(mat, directed=False)
    sizes = np.bincount(raw, minlength=count)
    _, first = np.unique(raw, return_index=True)
    mins = ids[first]
    order = np.lexsort((mins, -sizes))
    remap = np.empty(count, dtype=np.int64)
    remap[order] = np.arange(count, dtype=np.int64)
    labels[ids] = remap[raw]
    return labels, sizes[order].tolist()


def component_sets(labels: np.ndarray) -> list[VertexSet]:
    """Vertex sets of each labelled component, in label order."""
    if not labels.size or int(labels.max()) < 0:
        return []
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(int(labels.max()) + 2))
    return [
        VertexSet.from_sorted(order[bounds[c] : bounds[c + 1]])
        for c in range(int(labels.max()) + 1)
    ]


def largest_component(
    graph: Graph, alive: VertexSet | np.ndarray | None = None
) -> VertexSet:
    labels, sizes = connected_components(graph, alive)
    if not sizes:
        return VertexSet()
    return VertexSet.from_sorted(np.flatnonzero(labels == 0))


def induced_subgraph(
    graph: Graph, vertices: VertexSet | np.ndarray
) -> tuple[Graph, np.ndarray]:
    """
    Subgraph induced by ``vertices``, relabelled densely in ascending id order.

    Returns the subgraph and ``id_map`` with ``id_map[new] == old``.
    """
    ids = vertices.ids if isinstance(vertices, VertexSet) else np.unique(vertices)
    new_id = np.full(graph.n, -1, dtype=np.int64)
    new_id[ids] = np.arange(ids.shape[0], dtype=np.int64)
    edges = graph.edges()
    keep = (new_id[edges[:, 0]] >= 0) & (new_id[edges[:, 1]] >= 0)
    sub = build_graph(int(ids.shape[0]), new_id[edges[keep]])
    return sub, ids.astype(np.int64, copy=True)


def delete_vertices(graph: Graph, removed: VertexSet) -> tuple[Graph, np.ndarray]:
    """G − S with an id map from the new ids back to the originals."""
    removed.check_range(graph.n)
    keep = ~removed.mask(graph.n)
    return induced_subgraph(graph, np.flatnonzero(keep))


def contract_partition(
    graph: Graph, partition: Partition
) -> tuple[Graph, list[VertexSet]]:
    """
    Contract every part of ``partition`` to a single vertex.

    Each part must induce a connected subgraph; otherwise :class:`ContractError`
    names the first offending part. Quotient vertex ``i`` corresponds to part ``i``
    and ``lift[i]`` returns its original vertices.
    """
    part_of = np.asarray(partition.part_of, dtype=np.int64)
    if part_of.shape[0] != graph.n or np.any(part_of < 0):
        raise DomainError("contraction needs a partition covering every vertex")
    edges = graph.edges()
    pu = part_of[edges[:, 0]]
    pv = part_of[edges[:, 1]]
    inner = pu == pv
    local = build_graph(graph.n, edges[inner])
    labels, _ = connected_components(local)
    for idx, part in enumerate(partition.parts):
        if len(part) and np.unique(labels[part.ids]).shape[0] != 1:
            raise ContractError(f"part {idx} does not induce a connected subgraph")
        if not len(part):
            raise ContractError(f"part {idx} is empty")
    quotient = build_graph(len(partition), np.stack([pu[~inner], pv[~inner]], axis=1))
    logger.debug(
        "Contracted %d vertices into %d parts (%d quotient edges)",
        graph.n,
        quotient.n,
        quotient.m,
    )
    return quotient, list(partition.parts)
