"""
Balanced separators by iterated KPR and subtree-size reweighting.

Each iteration runs KPR on the whole graph under the current weights. If the largest
remaining component is already small the union of the cuts so far is returned;
otherwise a truncated weighted BFS tree is grown from that component and every vertex
it covers is made heavier in proportion to its subtree size. After ``k`` iterations
without a balanced cut the trees form a stochastic connector, which is sampled into a
clique minor.
"""

import hashlib
import logging
from fractions import Fraction
from typing import Any

import numpy as np

from minorsep.config import ConstantsProfile, resolve_profile
from minorsep.dense_reduction import clique_order, minor_in_dense
from minorsep.graph_core import (
    INT64_MAX,
    Graph,
    Partition,
    VertexSet,
    WeightFn,
    connected_components,
    contract_partition,
    induced_subgraph,
    largest_component,
)
from minorsep.helpers import (
    DomainError,
    InputError,
    ParameterError,
    SearchEngine,
    SepKind,
    WeightOverflowError,
)
from minorsep.kpr import kpr
from minorsep.minor_model import find_minor, lift_model, required_trees
from minorsep.models import IterationRecord, MinorModel, RunTrace, SepResult
from minorsep.wbfs import WTree, weighted_bfs

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = Fraction(2, 3)


def weights_checksum(weights: WeightFn | np.ndarray) -> str:
    """SHA-256 of the weights as little-endian 64-bit integers."""
    arr = weights.weights if isinstance(weights, WeightFn) else weights
    return hashlib.sha256(np.ascontiguousarray(arr, dtype="<i8").tobytes()).hexdigest()


def reweight(
    weights: WeightFn,
    tree: WTree,
    k: int,
    n: int,
    numerator: int | None = None,
    denominator: int | None = None,
) -> WeightFn:
    """
    Raise the weight of every tree member ``v`` to
    ``w(v) + ⌈|T(v)| · numerator · w(v) / s⌉``.

    ``numerator`` defaults to ``k**3`` and ``s`` to ``⌊√n⌋``. Vertices outside the
    tree keep their weight. Results that do not fit in 64 bits raise
    :class:`WeightOverflowError`.

    Examples::

        w=40, |T(v)|=10, k=20, s=100        ->  32040
        w=40, |T(v)|=1,  k=20, s=10**6      ->  41
    """
    numerator = k**3 if numerator is None else numerator
    s = ConstantsProfile.reweight_denominator(n) if denominator is None else denominator
    members = tree.order
    old = weights.weights
    current = old[members]
    sizes = tree.subtree_size[members]
    # float screen decides whether the int64 product is safe
    approx = sizes.astype(np.float64) * float(numerator) * current.astype(np.float64)
    if not members.size or float(approx.max()) < 2.0**61:
        product = sizes * np.int64(numerator) * current
        increment = -(-product // np.int64(s))
        updated = current + increment
    else:
        exact = [
            w + -(-(z * numerator * w) // s)
            for w, z in zip(current.tolist(), sizes.tolist())
        ]
        if max(exact) > INT64_MAX:
            raise WeightOverflowError(
                "reweighted vertex exceeds 64 bits", total_weight=weights.total
            )
        updated = np.asarray(exact, dtype=np.int64)
    new = old.copy()
    new[members] = updated
    return WeightFn(new)


def _fits_balance(size: int, n: int, slack: Fraction) -> bool:
    return size * slack.denominator <= (slack.denominator - slack.numerator) * n


def _max_component(graph: Graph, separator: VertexSet) -> int:
    if not graph.n:
        return 0
    _, sizes = connected_components(graph, ~separator.mask(graph.n))
    return sizes[0] if sizes else 0


def _require_delta(profile: ConstantsProfile, n: int, h: int) -> int:
    delta = profile.delta(n, h)
    if delta < 1:
        divisor = profile.delta_divisor * (h * h if profile.delta_per_h2 else 1)
        raise ParameterError(
            f"delta is 0 for n={n}, h={h} under profile {profile.name!r}; "
            f"it needs n >= {divisor * divisor} (try --profile desk)"
        )
    return delta


def find_separator_once(
    graph: Graph,
    h: int,
    profile: ConstantsProfile | str | None = None,
    seed: int = 0,
    *,
    dense_guard: bool = True,
    bfs_on_component: bool = False,
    find_minor_on_failure: bool = True,
    simplified: bool = False,
    record_trees: bool = True,
    engine: SearchEngine | str = SearchEngine.BUCKET,
    max_attempts: int = 2,
) -> SepResult:
    """
    One run of the reweighting loop.

    Returns a separator whose largest remaining component has at most
    ``(1 - balance_slack(k))·n`` vertices, a K_h minor model (from KPR or sampled from
    the collected trees), or INDETERMINATE with the trees when no minor was found.

    ``simplified`` runs the reduced loop: no dense guard, KPR minors are ignored and
    an exhausted loop returns its union separator flagged unbalanced.
    ``find_minor_on_failure=False`` stops with INDETERMINATE as soon as the loop is
    exhausted. ``bfs_on_component`` grows the BFS trees inside ``C*`` only.
    """
    if h < 1:
        raise ParameterError(f"h must be at least 1, got {h}")
    profile = resolve_profile(profile)
    n = graph.n
    trace = RunTrace(
        n=n, h=h, profile=profile, seed=seed, bfs_on_component=bfs_on_component
    )
    if not n:
        return SepResult(
            kind=SepKind.SEPARATOR, separator=VertexSet(), traces=(trace,), balanced=True
        )
    dense_d = profile.dense_guard_threshold(h)
    if dense_guard and not simplified and graph.m >= dense_d * n:
        if clique_order(dense_d) >= h:
            logger.info("Graph is dense (m=%d, n=%d); extracting K_%d directly", graph.m, n, h)
            model = minor_in_dense(graph, h, d=dense_d)
            return SepResult(kind=SepKind.MINOR, model=model, traces=(trace,))
        logger.warning(
            "Dense guard skipped: d=%d only guarantees K_%d, fewer than K_%d",
            dense_d,
            clique_order(dense_d),
            h,
        )

    delta = _require_delta(profile, n, h)
    k = profile.k(h)
    slack = profile.balance_slack(k)
    radius = profile.bfs_radius(n)
    numerator = profile.numerator(k)
    denominator = profile.reweight_denominator(n)
    logger.debug("Separator loop: %s", profile.describe(n, h))

    weights = WeightFn.constant(n, profile.w_init)
    separator = VertexSet()
    trees: list[WTree] = []
    for t in range(1, k + 1):
        outcome = kpr(graph, weights, delta, h, engine=engine)
        record = IterationRecord(
            t=t,
            separator=outcome.separator,
            component_size=len(outcome.component),
            root=None,
            total_weight=weights.total,
            checksum=weights_checksum(weights),
            weights=weights.weights,
        )
        trace.records.append(record)
        if outcome.model is not None and not simplified:
            record.returned = True
            logger.info("Iteration %d: KPR returned %s", t, outcome.model)
            return SepResult(
                kind=SepKind.MINOR, model=outcome.model, traces=(trace,), rounds=1
            )
        separator = separator.union(outcome.separator)
        component = outcome.component
        if _fits_balance(len(component), n, slack):
            record.returned = True
            result = SepResult(
                kind=SepKind.SEPARATOR,
                separator=separator,
                traces=(trace,),
                balanced=True,
                max_component=_max_component(graph, separator),
            )
            logger.info("Iteration %d: balanced separator, %s", t, result)
            return result
        root = component.min()
        tree = weighted_bfs(
            graph,
            weights,
            root,
            radius,
            alive=component if bfs_on_component else None,
            engine=engine,
        )
        try:
            weights = reweight(weights, tree, k, n, numerator, denominator)
        except WeightOverflowError as exc:
            raise WeightOverflowError(
                f"iteration {t}: {exc}", iteration=t, total_weight=record.total_weight
            ) from exc
        trees.append(tree)
        record.root = root
        record.reweighted = weights.weights
        record.tree = tree if record_trees else None
        logger.debug(
            "Iteration %d: |S_t|=%d |C*|=%d tree=%d W=%d",
            t,
            len(outcome.separator),
            len(component),
            tree.size,
            record.total_weight,
        )

    if simplified:
        logger.info("Simplified loop exhausted after %d iterations; |S|=%d", k, len(separator))
        return SepResult(
            kind=SepKind.SEPARATOR,
            separator=separator,
            traces=(trace,),
            balanced=False,
            max_component=_max_component(graph, separator),
        )
    if find_minor_on_failure:
        if len(trees) < required_trees(h):
            logger.warning(
                "Only %d trees collected, K_%d needs %d; no minor sampled",
                len(trees),
                h,
                required_trees(h),
            )
        else:
            model = find_minor(graph, trees, h, seed=seed, max_attempts=max_attempts)
            if model:
                return SepResult(kind=SepKind.MINOR, model=model, traces=(trace,))
    logger.info("Loop exhausted after %d iterations without a balanced cut", k)
    return SepResult(
        kind=SepKind.INDETERMINATE,
        separator=separator,
        trees=tuple(trees),
        traces=(trace,),
        max_component=_max_component(graph, separator),
    )


def _lift_model(model: MinorModel, id_map: np.ndarray) -> MinorModel:
    return MinorModel(tuple(s.map_through(id_map) for s in model.branch_sets), model.pattern)


def _as_fraction(alpha: Fraction | float) -> Fraction:
    if isinstance(alpha, float):
        return Fraction(alpha).limit_denominator(10**6)
    return Fraction(alpha)


def _is_balanced(size: int, n: int, alpha: Fraction) -> bool:
    return size <= 1 or size <= alpha * n


def find_balanced_separator(
    graph: Graph,
    h: int,
    alpha: Fraction | float = DEFAULT_ALPHA,
    profile: ConstantsProfile | str | None = None,
    seed: int = 0,
    **options: Any,
) -> SepResult:
    """
    Separator with every component of ``G - S`` of at most ``alpha·n`` vertices.

    The loop is rerun on the current largest component, with seed ``seed + round``,
    and the separators are united until the balance holds. A minor found in any round
    is returned mapped to the ids of ``graph``. After ``repeat_cap`` rounds, or when a
    component becomes too small for Δ ≥ 1, the result is INDETERMINATE and carries
    the best separator reached. ``options`` go to :func:`find_separator_once`.
    """
    alpha = _as_fraction(alpha)
    if not 0 < alpha <= 1:
        raise ParameterError(f"alpha must lie in (0, 1], got {alpha}")
    profile = resolve_profile(profile)
    n = graph.n
    separator = VertexSet()
    traces: list = []
    cap = profile.repeat_cap(h)
    for round_no in range(1, cap + 2):
        component = largest_component(graph, ~separator.mask(n)) if n else VertexSet()
        if _is_balanced(len(component), n, alpha):
            result = SepResult(
                kind=SepKind.SEPARATOR,
                separator=separator,
                traces=tuple(traces),
                balanced=True,
                max_component=len(component),
                rounds=round_no - 1,
            )
            logger.info("Balanced separator after %d round(s): %s", round_no - 1, result)
            return result
        if round_no > cap:
            break
        whole = len(component) == n
        sub, id_map = induced_subgraph(graph, component)
        try:
            inner = find_separator_once(sub, h, profile, seed + round_no - 1, **options)
        except ParameterError:
            if round_no == 1:
                raise
            logger.warning(
                "Component of %d vertices is too small for delta >= 1; stopping", sub.n
            )
            break
        if whole:
            traces.extend(inner.traces)
        else:
            traces.extend(r.relabel(component, id_map) for r in inner.traces)
        if inner.kind == SepKind.MINOR:
            model = inner.model if whole else _lift_model(inner.model, id_map)
            return SepResult(
                kind=SepKind.MINOR, model=model, traces=tuple(traces), rounds=round_no
            )
        if inner.kind == SepKind.INDETERMINATE:
            separator = separator.union(inner.separator.map_through(id_map))
            return SepResult(
                kind=SepKind.INDETERMINATE,
                separator=separator,
                trees=inner.trees if whole else (),
                traces=tuple(traces),
                max_component=_max_component(graph, separator),
                rounds=round_no,
            )
        if not len(inner.separator):
            logger.warning("Round %d made no progress", round_no)
            break
        separator = separator.union(inner.separator.map_through(id_map))
        logger.debug("Round %d: |S|=%d", round_no, len(separator))
    result = SepResult(
        kind=SepKind.INDETERMINATE,
        separator=separator,
        traces=tuple(traces),
        max_component=_max_component(graph, separator),
        rounds=len(traces),
    )
    logger.info("Balance %s not reached: %s", alpha, result)
    return result


def _dfs_tree(graph: Graph) -> tuple[list[int], list[list[int]], list[int], list[int]]:
    """Preorder DFS from vertex 0, neighbours in ascending order."""
    n = graph.n
    adjacency = graph.adjacency
    parent = [-1] * n
    children: list[list[int]] = [[] for _ in range(n)]
    seen = [False] * n
    order = []
    stack = [(0, -1)]
    while stack:
        v, p = stack.pop()
        if seen[v]:
            continue
        seen[v] = True
        parent[v] = p
        if p >= 0:
            children[p].append(v)
        order.append(v)
        stack.extend((u, v) for u in reversed(adjacency[v]) if not seen[u])
    size = [1] * n
    for v in reversed(order):
        if parent[v] >= 0:
            size[parent[v]] += size[v]
    position = [0] * n
    for i, v in enumerate(order):
        position[v] = i
    return order, children, size, position


def connected_partition(graph: Graph, p: int) -> Partition:
    """
    Split a connected graph into connected parts of ``p`` to ``p·(Δ+1)`` vertices.

    A DFS tree is cut top-down: a part starts at the root of the remaining subtree and
    takes vertices in preorder, each together with the subtrees of its children that
    hold fewer than ``p`` vertices, until it reaches ``p`` vertices. Every leftover
    piece is a full subtree of at least ``p`` vertices and is split the same way.

    Examples::

        path on 10 vertices, p=3   ->  parts of 3, 3 and 4
        star with 9 leaves,  p=3   ->  one part of 10
    """
    n = graph.n
    if p < 1 or p > n:
        raise ParameterError(f"p must lie in [1, {n}], got {p}")
    _, sizes = connected_components(graph)
    if len(sizes) != 1:
        raise DomainError(f"graph has {len(sizes)} components, a connected graph is needed")
    order, children, size, position = _dfs_tree(graph)
    small = [s < p for s in size]
    taken = [False] * n
    parts = []
    pending = [0]
    while pending:
        root = pending.pop()
        part = []
        cursor = position[root]
        while len(part) < p:
            while taken[order[cursor]]:
                cursor += 1
            x = order[cursor]
            taken[x] = True
            part.append(x)
            for c in children[x]:
                if small[c]:
                    block = order[position[c] : position[c] + size[c]]
                    for y in block:
                        taken[y] = True
                    part.extend(block)
        pending.extend(c for x in part for c in children[x] if not taken[c])
        parts.append(part)
    partition = Partition.from_parts(n, parts)
    logger.debug(
        "Partitioned %d vertices into %d parts (p=%d, sizes %d..%d)",
        n,
        len(partition),
        p,
        min(partition.sizes),
        max(partition.sizes),
    )
    return partition


def bounded_degree_pipeline(
    graph: Graph,
    h: int,
    p: int | None = None,
    profile: ConstantsProfile | str | None = None,
    seed: int = 0,
    alpha: Fraction | float = DEFAULT_ALPHA,
    **options: Any,
) -> SepResult:
    """
    Balanced separator of a bounded-degree graph through a contracted quotient.

    The current largest component is cut into connected parts of at least ``p``
    vertices (default ``h**13``), the parts are contracted, and the balanced
    separator of the quotient is lifted by expanding each separator vertex into its
    part. Rounds repeat until the balance holds in ``graph``. A quotient minor is
    lifted through the parts. ``p=1`` is the same as calling
    :func:`find_balanced_separator` on ``graph``.
    """
    p = h**13 if p is None else p
    if p < 1:
        raise ParameterError(f"p must be positive, got {p}")
    profile = resolve_profile(profile)
    if p == 1:
        return find_balanced_separator(graph, h, alpha, profile, seed, **options)
    alpha = _as_fraction(alpha)
    n = graph.n
    separator = VertexSet()
    traces: list = []
    cap = profile.repeat_cap(h)
    for round_no in range(1, cap + 2):
        component = largest_component(graph, ~separator.mask(n)) if n else VertexSet()
        if _is_balanced(len(component), n, alpha):
            result = SepResult(
                kind=SepKind.SEPARATOR,
                separator=separator,
                traces=tuple(traces),
                balanced=True,
                max_component=len(component),
                rounds=round_no - 1,
            )
            logger.info("Pipeline balanced after %d round(s): %s", round_no - 1, result)
            return result
        if round_no > cap:
            break
        sub, id_map = induced_subgraph(graph, component)
        seed_r = seed + round_no - 1
        quotient = None
        if sub.n >= p:
            partition = connected_partition(sub, p)
            if len(partition) > 1 and profile.delta(len(partition), h) >= 1:
                quotient, parts = contract_partition(sub, partition)
        if quotient is None:
            logger.debug("Round %d: running on the component of %d directly", round_no, sub.n)
            inner = find_balanced_separator(sub, h, alpha, profile, seed_r, **options)
            lifted_sep = inner.separator
            lifted_model = inner.model
        else:
            logger.debug(
                "Round %d: quotient of %d vertices from %d", round_no, quotient.n, sub.n
            )
            inner = find_balanced_separator(quotient, h, alpha, profile, seed_r, **options)
            lifted_sep = None
            if inner.separator is not None:
                lifted_sep = VertexSet(
                    np.concatenate([parts[q].ids for q in inner.separator] or [[]])
                )
            lifted_model = lift_model(inner.model, parts) if inner.model is not None else None
            for run in inner.traces:
                run.contracted = True
        if len(component) == n or quotient is not None:
            traces.extend(inner.traces)
        else:
            traces.extend(r.relabel(component, id_map) for r in inner.traces)
        if inner.kind == SepKind.MINOR:
            return SepResult(
                kind=SepKind.MINOR,
                model=_lift_model(lifted_model, id_map),
                traces=tuple(traces),
                rounds=round_no,
            )
        if lifted_sep is None or not len(lifted_sep):
            logger.warning("Pipeline round %d made no progress", round_no)
            break
        separator = separator.union(lifted_sep.map_through(id_map))
        if inner.kind == SepKind.INDETERMINATE:
            break
    result = SepResult(
        kind=SepKind.INDETERMINATE,
        separator=separator,
        traces=tuple(traces),
        max_component=_max_component(graph, separator),
        rounds=len(traces),
    )
    logger.info("Pipeline did not reach balance %s: %s", alpha, result)
    return result


def replay_trace(
    graph: Graph, trace: RunTrace, *, engine: SearchEngine | str = SearchEngine.BUCKET
) -> RunTrace:
    """
    Recompute the trees and weights of a recorded run.

    The loop is rerun with the profile, h and BFS mode stored in ``trace`` and each
    iteration is matched against the recorded weight checksum and sizes. Any mismatch
    raises :class:`InputError`. A run recorded on an induced subgraph is replayed on
    that subgraph, rebuilt from ``trace.vertices``.
    """
    host, _ = trace_host(graph, trace)
    result = find_separator_once(
        host,
        trace.h,
        trace.profile,
        trace.seed,
        dense_guard=False,
        bfs_on_component=trace.bfs_on_component,
        find_minor_on_failure=False,
        engine=engine,
    )
    fresh = result.trace
    if fresh.iterations < trace.iterations:
        raise InputError(
            f"trace has {trace.iterations} iterations, the replay stopped after "
            f"{fresh.iterations}"
        )
    for old, new in zip(trace.records, fresh.records):
        if old.checksum != new.checksum:
            raise InputError(f"weight checksum mismatch at iteration {old.t}")
        if old.component_size != new.component_size or old.total_weight != new.total_weight:
            raise InputError(f"recorded sizes differ from the replay at iteration {old.t}")
    fresh.records = fresh.records[: trace.iterations]
    fresh.vertices = trace.vertices
    logger.info("Replayed %d iterations", fresh.iterations)
    return fresh


def trace_host(graph: Graph, trace: RunTrace) -> tuple[Graph, np.ndarray | None]:
    """
    The graph a recorded run worked on, with the id map back into ``graph``.

    The id map is None when the run covered ``graph`` itself.
    """
    if trace.contracted:
        raise InputError("the run was recorded on a contracted quotient")
    host, id_map = graph, None
    if trace.vertices is not None:
        trace.vertices.check_range(graph.n)
        host, id_map = induced_subgraph(graph, trace.vertices)
    if trace.n != host.n:
        raise InputError(f"trace is for {trace.n} vertices, the graph has {host.n}")
    return host, id_map
