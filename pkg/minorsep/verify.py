"""
Independent certificates and reference oracles.

Nothing here reuses the code it is meant to check: separators are re-analysed with
scipy, minor models with a plain breadth-first walk, distances with a label-correcting
solver. Probabilities are exact fractions.
"""

import logging
from collections import deque
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.sparse import csgraph, csr_matrix

from minorsep.config import ConstantsProfile
from minorsep.graph_core import UNREACHABLE, Graph, VertexSet, WeightFn
from minorsep.helpers import (
    CollisionMethod,
    DomainError,
    InvariantStatus,
    ScaleError,
)
from minorsep.models import (
    ConnectorReport,
    InvariantCheck,
    InvariantReport,
    MinorModel,
    ModelReport,
    RunTrace,
    SepReport,
)
from minorsep.wbfs import WTree, path_to_root, weighted_bfs

logger = logging.getLogger(__name__)

EXACT_FLOAT_LIMIT = 2**53
DEFAULT_MAX_PAIRS = 10**5


def verify_separator(
    graph: Graph, separator: VertexSet, alpha: Fraction = Fraction(2, 3)
) -> SepReport:
    """
    Certify that every component of G − S has at most ``alpha * n`` vertices.
    """
    alpha = Fraction(alpha)
    n = graph.n
    separator.check_range(n)
    keep = np.flatnonzero(~separator.mask(n))
    histogram: dict[int, int] = {}
    largest = 0
    if keep.size:
        sub = graph.to_scipy()[keep][:, keep]
        _, labels = csgraph.connected_components(sub, directed=False)
        sizes = np.bincount(labels)
        for size, count in zip(*np.unique(sizes, return_counts=True)):
            histogram[int(size)] = int(count)
        largest = int(sizes.max())
    fraction = Fraction(largest, n) if n else Fraction(0)
    return SepReport(
        valid=fraction <= alpha,
        n=n,
        alpha=alpha,
        separator_size=len(separator),
        max_component_fraction=fraction,
        components=histogram,
    )


def _connected_within(adjacency: list[list[int]], members: set[int]) -> bool:
    start = next(iter(members))
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if v in members and v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == len(members)


def verify_model_of(
    graph: Graph,
    pattern_edges: Sequence[tuple[int, int]],
    branch_sets: Sequence[VertexSet | Sequence[int]],
) -> ModelReport:
    """
    Check that ``branch_sets`` realise a minor whose edges are ``pattern_edges``.

    Reports the first violation found, in the order: empty set, id out of range,
    overlap, disconnected set, missing pattern edge.
    """
    n = graph.n
    owner = np.full(n, -1, dtype=np.int64)
    sets = []
    for idx, raw in enumerate(branch_sets):
        members = set(int(v) for v in raw)
        if not members:
            return ModelReport(False, "empty", f"branch set {idx} is empty")
        bad = [v for v in members if not 0 <= v < n]
        if bad:
            return ModelReport(False, "range", f"vertex {bad[0]} in set {idx}")
        for v in members:
            if owner[v] >= 0:
                return ModelReport(
                    False,
                    "disjointness",
                    f"vertex {v} lies in sets {int(owner[v])} and {idx}",
                )
            owner[v] = idx
        sets.append(members)
    adjacency = graph.adjacency
    for idx, members in enumerate(sets):
        if not _connected_within(adjacency, members):
            return ModelReport(False, "connectivity", f"set {idx} is disconnected")
    touching: set[tuple[int, int]] = set()
    for idx, members in enumerate(sets):
        for u in members:
            for v in adjacency[u]:
                other = int(owner[v])
                if other >= 0 and other != idx:
                    touching.add((min(idx, other), max(idx, other)))
    for a, b in pattern_edges:
        if (min(a, b), max(a, b)) not in touching:
            return ModelReport(
                False, "adjacency", f"no edge between sets {a} and {b}"
            )
    return ModelReport(True)


def verify_minor_model(graph: Graph, model: MinorModel) -> ModelReport:
    report = verify_model_of(graph, model.pattern_edges(), model.branch_sets)
    if not report:
        logger.debug("Rejected %s: %s", model, report.detail)
    return report


def dist_oracle_all(graph: Graph, weights: WeightFn, source: int) -> np.ndarray:
    """
    Vertex-weighted distances from ``source`` to every vertex.

    Each arc ``u -> v`` carries ``w(v)`` and the label-correcting solver runs on that
    digraph; ``w(source)`` is added afterwards. Unreachable vertices get UNREACHABLE.
    """
    if weights.total >= EXACT_FLOAT_LIMIT:
        raise ScaleError("distance oracle is exact only for total weight below 2**53")
    if not 0 <= source < graph.n:
        raise DomainError(f"vertex {source} is not in the graph")
    arc_weight = weights.weights[graph.indices].astype(np.float64)
    digraph = csr_matrix((arc_weight, graph.indices, graph.indptr), shape=(graph.n,) * 2)
    dist = csgraph.bellman_ford(digraph, directed=True, indices=source)
    out = np.full(graph.n, UNREACHABLE, dtype=np.int64)
    reached = np.isfinite(dist)
    out[reached] = dist[reached].astype(np.int64) + weights[source]
    return out


def dist_oracle(graph: Graph, weights: WeightFn, u: int, v: int) -> int:
    """Exact vertex-weighted u-v distance, or UNREACHABLE."""
    return int(dist_oracle_all(graph, weights, u)[v])


def weak_diameter(graph: Graph, weights: WeightFn, vertices: VertexSet) -> int:
    """
    Largest distance in G between two vertices of ``vertices``; UNREACHABLE if some
    pair is disconnected in G.
    """
    best = 0
    for x in vertices:
        tree = weighted_bfs(graph, weights, x)
        dist = tree.dist[vertices.ids]
        if np.any(dist == UNREACHABLE):
            return UNREACHABLE
        best = max(best, int(dist.max()))
    return best


def _collisions_pairwise(ti: WTree, tj: WTree, max_pairs: int) -> int:
    pairs = ti.size * tj.size
    if pairs > max_pairs:
        raise ScaleError(
            f"{pairs} root-path pairs exceed the enumeration guard of {max_pairs}"
        )
    paths_i = [frozenset(path_to_root(ti, u)) for u in ti.members]
    paths_j = [frozenset(path_to_root(tj, v)) for v in tj.members]
    return sum(1 for p in paths_i for q in paths_j if not p.isdisjoint(q))


def _collisions_subtree(ti: WTree, tj: WTree) -> int:
    # Root paths P(u), Q(v) meet iff some x is an ancestor of u in ti and of v in tj.
    # The tj-subtrees of such x are nested or disjoint, so only the outermost count.
    total = 0
    sizes_j = tj.subtree_size
    for u in ti.members:
        common = [x for x in path_to_root(ti, u) if tj.contains(x)]
        if not common:
            continue
        marked = set(common)
        for x in common:
            ancestors = path_to_root(tj, x)[1:]
            if not any(a in marked for a in ancestors):
                total += int(sizes_j[x])
    return total


def collision_probability_exact(
    ti: WTree,
    tj: WTree,
    method: CollisionMethod | str = CollisionMethod.SUBTREE,
    max_pairs: int = DEFAULT_MAX_PAIRS,
) -> Fraction:
    """
    Exact probability that uniform random root paths of the two trees intersect.
    """
    if not ti.size or not tj.size:
        raise DomainError("collision probability needs two nonempty trees")
    method = CollisionMethod(method)
    if method == CollisionMethod.PAIRWISE:
        hits = _collisions_pairwise(ti, tj, max_pairs)
    else:
        hits = _collisions_subtree(ti, tj)
    return Fraction(hits, ti.size * tj.size)


def is_valid_connector(
    graph: Graph,
    trees: Sequence[WTree],
    k: int,
    method: CollisionMethod | str = CollisionMethod.SUBTREE,
) -> ConnectorReport:
    """
    Check both stochastic-connector conditions exactly: every tree covers at least
    ``n - n/(10k)`` vertices, and every pair of trees collides with probability at
    most ``1/(5k**2)``.
    """
    n = graph.n
    sizes = tuple(t.size for t in trees)
    size_ok = tuple(10 * k * s >= (10 * k - 1) * n for s in sizes)
    collisions = {}
    for i in range(len(trees)):
        for j in range(i + 1, len(trees)):
            collisions[(i, j)] = collision_probability_exact(trees[i], trees[j], method)
    report = ConnectorReport(
        k=k,
        n=n,
        sizes=sizes,
        size_ok=size_ok,
        collisions=collisions,
        threshold=Fraction(1, 5 * k * k),
    )
    logger.info(
        "Connector of %d trees: valid=%s worst collision %s",
        len(trees),
        report.valid,
        report.worst,
    )
    return report


def _exceeding(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Indices where lhs > rhs might hold; float screen with an exact recheck after."""
    with np.errstate(over="ignore", invalid="ignore"):
        return np.flatnonzero(~(lhs < rhs * (1 - 1e-9)))


def _check_ratio_bounds(
    n: int,
    w_init: int,
    numerator: int,
    best: tuple[np.ndarray, np.ndarray],
    second: tuple[np.ndarray, np.ndarray],
    weights_next: np.ndarray,
) -> tuple[int | None, int | None]:
    """First vertices breaking the single-tree and the tree-pair bounds, if any."""
    num1, den1 = best
    num2, den2 = second
    w = weights_next.astype(np.float64)
    # (num1/den1)^2 * (w_init*numerator/2)^2 * n <= w^2
    lhs1 = (num1 / den1) ** 2 * (w_init * numerator / 2.0) ** 2 * n
    single = None
    for v in _exceeding(lhs1, w * w):
        a, b, wv = int(num1[v]), int(den1[v]), int(weights_next[v])
        if a and a * a * (w_init * numerator) ** 2 * n > 4 * wv * wv * b * b:
            single = int(v)
            break
    # (num1/den1) * (num2/den2) * w_init * numerator^2 * n / 4 <= w
    lhs2 = (num1 / den1) * (num2 / den2) * (w_init * numerator**2 * n / 4.0)
    pair = None
    for v in _exceeding(lhs2, w):
        a1, b1 = int(num1[v]), int(den1[v])
        a2, b2 = int(num2[v]), int(den2[v])
        wv = int(weights_next[v])
        if a1 and a2 and a1 * a2 * w_init * numerator**2 * n > 4 * wv * b1 * b2:
            pair = int(v)
            break
    return single, pair


def check_invariants(
    trace: RunTrace, profile: ConstantsProfile | None = None
) -> InvariantReport:
    """
    Evaluate the five loop invariants at every recorded iteration.

    Invariants 1 and 2 use the stored subtree sizes exactly. An iteration that ended
    the loop has no tree and no successor weights, so its tree-based checks are
    NOT_APPLICABLE; missing data makes a check UNVERIFIABLE.
    """
    profile = profile or trace.profile
    n, h = trace.n, trace.h
    k = profile.k(h)
    numerator = profile.numerator(k)
    slack = profile.balance_slack(k)
    w_init = profile.w_init
    checks: list[InvariantCheck] = []
    best = (np.zeros(n, dtype=np.int64), np.ones(n, dtype=np.int64))
    second = (np.zeros(n, dtype=np.int64), np.ones(n, dtype=np.int64))
    history_ok = True

    def add(t, inv, status, detail=""):
        checks.append(InvariantCheck(t, inv, status, detail))

    for record in trace.records:
        t = record.t
        weights = record.weights
        # Invariant 3: total weight
        bound = (w_init + (numerator + 1) * (t - 1)) * n
        if weights is not None and int(np.sum(weights, dtype=object)) != record.total_weight:
            add(t, 3, InvariantStatus.FAIL, "recorded total does not match weights")
        elif record.total_weight > bound:
            add(t, 3, InvariantStatus.FAIL, f"W={record.total_weight} > {bound}")
        else:
            add(t, 3, InvariantStatus.PASS)
        # Invariant 5: weight floor
        if weights is None:
            add(t, 5, InvariantStatus.UNVERIFIABLE, "weights not stored")
        else:
            low = int(np.argmin(weights))
            if int(weights[low]) < w_init:
                add(t, 5, InvariantStatus.FAIL, f"w({low})={int(weights[low])}")
            else:
                add(t, 5, InvariantStatus.PASS)
        if record.returned:
            for inv in (4, 1, 2):
                add(t, inv, InvariantStatus.NOT_APPLICABLE, "loop returned")
            continue
        tree = record.tree
        if tree is None:
            history_ok = False
            for inv in (4, 1, 2):
                add(t, inv, InvariantStatus.UNVERIFIABLE, "tree not stored")
            continue
        # Invariant 4: tree size
        if tree.size * slack.denominator >= (slack.denominator - slack.numerator) * n:
            add(t, 4, InvariantStatus.PASS)
        else:
            add(t, 4, InvariantStatus.FAIL, f"|V(T)|={tree.size}")
        if not history_ok or record.reweighted is None:
            for inv in (1, 2):
                add(t, inv, InvariantStatus.UNVERIFIABLE, "incomplete history")
            continue
        best, second = _merge_ratio(best, second, tree.subtree_size, tree.size)
        single, pair = _check_ratio_bounds(
            n, w_init, numerator, best, second, record.reweighted
        )
        if single is None:
            add(t, 1, InvariantStatus.PASS)
        else:
            add(t, 1, InvariantStatus.FAIL, f"vertex {single}")
        if pair is None:
            add(t, 2, InvariantStatus.PASS)
        else:
            add(t, 2, InvariantStatus.FAIL, f"vertex {pair}")
    report = InvariantReport(tuple(checks))
    logger.info(
        "Checked %d iterations: %d failure(s)", trace.iterations, len(report.failures())
    )
    return report


def _merge_ratio(best, second, sizes, tree_size):
    """Keep the two largest membership ratios per vertex."""
    num1, den1 = best
    num2, den2 = second
    num = np.asarray(sizes, dtype=np.int64)
    den = np.int64(max(tree_size, 1))
    beats_first = num * den1 > num1 * den
    beats_second = num * den2 > num2 * den
    new_num2 = np.where(beats_first, num1, np.where(beats_second, num, num2))
    new_den2 = np.where(beats_first, den1, np.where(beats_second, den, den2))
    new_num1 = np.where(beats_first, num, num1)
    new_den1 = np.where(beats_first, den, den1)
    return (new_num1, new_den1), (new_num2, new_den2)
