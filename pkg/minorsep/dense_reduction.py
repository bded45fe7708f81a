"""
Deterministic clique minors in dense graphs.

A graph with at least ``d·n`` edges is first shrunk by a measure-decreasing sequence of
deletions, edge trims and contractions to a minor on at most 2d vertices with minimum
degree d. There a clique is either routed with at most two subdivision vertices per
edge, or the search exposes a subgraph so dense that every pair of chosen branch
vertices has a private common neighbour.
"""

import itertools
import logging
import math

import numpy as np

from minorsep.graph_core import Graph, VertexSet, build_graph, induced_subgraph
from minorsep.helpers import DomainError, InternalError, ParameterError
from minorsep.models import DenserSubgraph, MinorModel
from minorsep.verify import verify_minor_model

logger = logging.getLogger(__name__)


def clique_order(d: int) -> int:
    """``⌊√d / 10⌋``, the clique order the dense lemmas guarantee."""
    return math.isqrt(d) // 10


def upper_vertex_bound(d: int) -> int:
    """``⌊1.02 d⌋``"""
    return (102 * d) // 100


def lower_degree_bound(d: int) -> int:
    """``⌈0.94 d⌉``"""
    return -(-94 * d // 100)


class MutableMinorState:
    """
    Editable minor of an input graph.

    Vertices keep the ids of the input graph; ``f[v]`` lists the original vertices
    contracted into ``v``. ``buckets[i]`` holds the live vertices of degree ``i`` in
    insertion order and ``delta`` is the smallest nonempty bucket.
    """

    def __init__(self, n: int, edges: np.ndarray) -> None:
        self.n = n
        self.adj: list[set[int] | None] = [set() for _ in range(n)]
        for u, v in edges.tolist():
            self.adj[u].add(v)
            self.adj[v].add(u)
        self.f: list[list[int] | None] = [[v] for v in range(n)]
        self.vertex_count = n
        self.edge_count = sum(len(a) for a in self.adj) // 2
        self.buckets: list[dict[int, None]] = [{} for _ in range(max(n, 1))]
        for v in range(n):
            self.buckets[len(self.adj[v])][v] = None
        self.delta = 0
        self._settle_delta()

    @property
    def mu(self) -> int:
        return 2 * self.edge_count + self.vertex_count + (self.n - self.delta)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def is_live(self, v: int) -> bool:
        return self.adj[v] is not None

    def first_of_min_degree(self) -> int:
        return next(iter(self.buckets[self.delta]))

    def _move(self, v: int, old: int, new: int) -> None:
        del self.buckets[old][v]
        self.buckets[new][v] = None
        if new < self.delta:
            self.delta = new

    def _settle_delta(self) -> None:
        while self.delta < len(self.buckets) - 1 and not self.buckets[self.delta]:
            self.delta += 1

    def remove_edge(self, u: int, v: int) -> None:
        self.adj[u].remove(v)
        self.adj[v].remove(u)
        self._move(u, len(self.adj[u]) + 1, len(self.adj[u]))
        self._move(v, len(self.adj[v]) + 1, len(self.adj[v]))
        self.edge_count -= 1
        self._settle_delta()

    def add_edge(self, u: int, v: int) -> None:
        self.adj[u].add(v)
        self.adj[v].add(u)
        self._move(u, len(self.adj[u]) - 1, len(self.adj[u]))
        self._move(v, len(self.adj[v]) - 1, len(self.adj[v]))
        self.edge_count += 1
        self._settle_delta()

    def remove_vertex(self, u: int) -> None:
        neighbours = self.adj[u]
        for w in neighbours:
            self.adj[w].remove(u)
            self._move(w, len(self.adj[w]) + 1, len(self.adj[w]))
        del self.buckets[len(neighbours)][u]
        self.edge_count -= len(neighbours)
        self.vertex_count -= 1
        self.adj[u] = None
        self.f[u] = None
        self._settle_delta()

    def contract(self, u: int, v: int) -> None:
        """Merge ``u`` into its neighbour ``v``."""
        for w in sorted(self.adj[u] - self.adj[v] - {v}):
            self.add_edge(v, w)
        self.f[v].extend(self.f[u])
        self.remove_vertex(u)


def _first_edges(graph: Graph, count: int) -> np.ndarray:
    edges = graph.edges()
    if edges.shape[0] < count:
        raise ParameterError(
            f"the graph has {edges.shape[0]} edges, at least {count} are needed"
        )
    return edges[:count]


def densify(
    graph: Graph, d: int, *, mu_trace: list[int] | None = None
) -> tuple[Graph, list[VertexSet]]:
    """
    Minor ``H`` of ``graph`` with at most ``2d`` vertices and minimum degree ``d``.

    Only the first ``d·n`` edges (in ``(u, v)`` order) are read. Returns ``H`` and, for
    every vertex of ``H``, the original vertices contracted into it. The measure
    ``2|E| + |V| + (n - δ)`` of the working graph strictly decreases at every step and
    the working graph never drops below average degree ``2d``; both are checked as the
    loop runs. ``mu_trace`` collects the measure after each step.
    """
    if d < 1:
        raise ParameterError(f"d must be at least 1, got {d}")
    n = graph.n
    state = MutableMinorState(n, _first_edges(graph, d * n))
    mu = state.mu
    if mu_trace is not None:
        mu_trace.append(mu)
    step_cap = (2 * d + 2) * n
    steps = 0
    while True:
        if not state.vertex_count:
            raise InternalError("densifier deleted every vertex")
        u = state.first_of_min_degree()
        delta = state.delta
        if delta < d:
            state.remove_vertex(u)
        elif delta > 2 * d:
            for w in sorted(state.adj[u], reverse=True)[: delta - 2 * d]:
                state.remove_edge(u, w)
        else:
            around = state.adj[u]
            target = next(
                (v for v in sorted(around) if len(around & state.adj[v]) < d), None
            )
            if target is None:
                break
            state.contract(u, target)
        steps += 1
        new_mu = state.mu
        if new_mu >= mu:
            raise InternalError(f"measure did not decrease at step {steps}")
        if state.edge_count < d * state.vertex_count:
            raise InternalError(f"average degree fell below {2 * d} at step {steps}")
        if steps > step_cap:
            raise InternalError(f"densifier exceeded {step_cap} steps")
        mu = new_mu
        if mu_trace is not None:
            mu_trace.append(mu)
    keep = sorted(state.adj[u])
    local = {v: i for i, v in enumerate(keep)}
    edges = [
        (local[a], local[b])
        for a in keep
        for b in state.adj[a]
        if b in local and a < b
    ]
    minor = build_graph(len(keep), edges)
    images = [VertexSet(state.f[v]) for v in keep]
    logger.info(
        "Densified %d vertices into a minor with %d vertices, min degree %d, in %d steps",
        n,
        minor.n,
        minor.min_degree,
        steps,
    )
    return minor, images


def _check_dense_input(graph: Graph, max_vertices: int, min_degree: int) -> None:
    if graph.n > max_vertices:
        raise DomainError(f"{graph.n} vertices exceed the bound {max_vertices}")
    if graph.n and graph.min_degree < min_degree:
        raise DomainError(f"minimum degree {graph.min_degree} is below {min_degree}")


def _short_path(adj, x, y, blocked) -> list[int] | None:
    """Inner vertices of a shortest x-y path on at most 3 edges avoiding ``blocked``."""
    if y in adj[x]:
        return []
    common = sorted((adj[x] & adj[y]) - blocked)
    if common:
        return [common[0]]
    for z in sorted(adj[x] - blocked - {y}):
        onward = sorted((adj[z] & adj[y]) - blocked - {x})
        if onward:
            return [z, onward[0]]
    return None


def two_subdivision_or_denser(graph: Graph, d: int) -> MinorModel | DenserSubgraph:
    """
    Route a ``K_s`` with ``s = ⌊√d/10⌋`` on the first ``s`` vertices, every edge
    through at most two new vertices, or return the subgraph that blocked the routing.

    The blocked subgraph has at most ``⌊1.02d⌋`` vertices and minimum degree at least
    ``⌈0.94d⌉``; both bounds are recounted before it is returned.
    """
    _check_dense_input(graph, 2 * d, d)
    s = clique_order(d)
    if s <= 0:
        return MinorModel(())
    adj = [set(row) for row in graph.adjacency]
    branch = list(range(s))
    sets = [{x} for x in branch]
    used: set[int] = set()
    for x, y in itertools.combinations(branch, 2):
        blocked = (set(branch) - {x, y}) | used
        inner = _short_path(adj, x, y, blocked)
        if inner is None:
            return _denser(graph, adj, x, set(branch), used, d)
        if inner:
            sets[x].add(inner[0])
            sets[y].update(inner[1:])
            used.update(inner)
    model = MinorModel.from_lists(sets)
    _require_valid(graph, model)
    logger.debug("Routed K_%d with %d subdivision vertices", s, len(used))
    return model


def _denser(graph, adj, x, branch, used, d) -> DenserSubgraph:
    keep = (adj[x] - branch - used) | {x}
    sub, id_map = induced_subgraph(graph, np.array(sorted(keep), dtype=np.int64))
    if sub.n > upper_vertex_bound(d) or sub.min_degree < lower_degree_bound(d):
        raise InternalError(
            f"blocked subgraph has {sub.n} vertices and minimum degree {sub.min_degree}"
        )
    logger.debug("Routing stuck at branch vertex %d; denser subgraph of %d", x, sub.n)
    return DenserSubgraph(graph=sub, id_map=id_map)


def clique_minor_super_dense(graph: Graph, d: int) -> MinorModel:
    """
    ``K_s`` with ``s = ⌊√d/10⌋`` as a 1-subdivision on the first ``s`` vertices: each
    pair takes its smallest unused common neighbour outside the branch vertices.
    """
    _check_dense_input(graph, upper_vertex_bound(d), lower_degree_bound(d))
    s = clique_order(d)
    if s <= 0:
        return MinorModel(())
    adj = [set(row) for row in graph.adjacency]
    branch = set(range(s))
    sets = [{x} for x in range(s)]
    used: set[int] = set()
    for x, y in itertools.combinations(range(s), 2):
        common = (adj[x] & adj[y]) - branch - used
        if not common:
            raise InternalError(f"no free common neighbour of {x} and {y}")
        z = min(common)
        sets[x].add(z)
        used.add(z)
    model = MinorModel.from_lists(sets)
    _require_valid(graph, model)
    return model


def _require_valid(graph: Graph, model: MinorModel) -> None:
    report = verify_minor_model(graph, model)
    if not report:
        raise InternalError(f"built an invalid model: {report.detail}")


def minor_in_dense(graph: Graph, h: int, d: int | None = None) -> MinorModel:
    """
    K_h minor model of a graph with at least ``100h²·n`` edges.

    ``d`` overrides the density parameter; the chain yields a clique of order
    ``⌊√d/10⌋``, which equals ``h`` for the default ``d = 100h²``. Larger cliques are
    cut down to ``h`` sets, and a ``d`` whose order falls short of ``h`` raises
    :class:`ParameterError`.
    """
    if h < 1:
        raise ParameterError(f"h must be at least 1, got {h}")
    if not graph.n:
        raise ParameterError("the graph has no vertices")
    if h == 1:
        return MinorModel.from_lists([[0]])
    d = 100 * h * h if d is None else d
    if clique_order(d) < h:
        raise ParameterError(
            f"d={d} only guarantees K_{clique_order(d)}; K_{h} needs d >= {100 * h * h}"
        )
    if graph.m < d * graph.n:
        raise ParameterError(
            f"need at least {d * graph.n} edges for d={d}, the graph has {graph.m}"
        )
    minor, images = densify(graph, d)
    outcome = two_subdivision_or_denser(minor, d)
    if isinstance(outcome, DenserSubgraph):
        inner = clique_minor_super_dense(outcome.graph, d)
        outcome = MinorModel(
            tuple(s.map_through(outcome.id_map) for s in inner.branch_sets)
        )
    if outcome.t < h:
        raise InternalError(f"the dense chain returned K_{outcome.t} for d={d}, h={h}")
    sets = [
        VertexSet(np.concatenate([images[q].ids for q in branch]))
        for branch in outcome.branch_sets[:h]
    ]
    model = MinorModel(tuple(sets))
    _require_valid(graph, model)
    logger.info("Dense graph yields %s", model)
    return model
