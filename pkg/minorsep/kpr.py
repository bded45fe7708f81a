"""
Vertex-weighted KPR decomposition.

Each round grows a BFS forest over the surviving components, rooted at their smallest
vertex, and cuts every component that is too deep along the cheapest family of BFS
layers spaced Δ apart. After h rounds the largest surviving component either has small
weak diameter or the recorded layering is deep enough to route a K_{h,h} minor.
"""

import logging

import numpy as np

from minorsep.graph_core import (
    UNREACHABLE,
    Graph,
    VertexSet,
    WeightFn,
    component_sets,
    connected_components,
)
from minorsep.helpers import (
    DecompositionError,
    InternalError,
    MinorPattern,
    OutcomeKind,
    ParameterError,
    SearchEngine,
)
from minorsep.models import KprDecomposition, KprOutcome, MinorModel
from minorsep.verify import verify_minor_model, weak_diameter
from minorsep.wbfs import WTree, path_to_root, tree_distance, tree_path, weighted_bfs

logger = logging.getLogger(__name__)

GUARDED_PROPERTIES = ("P2", "P3", "P5")
ALL_PROPERTIES = ("P1", "P2", "P3", "P4", "P5")


def _family_ranges(tree: WTree, ids: np.ndarray, delta: int):
    """First family hit (0-based) and number of consecutive families hit per vertex."""
    hi = tree.dist[ids]
    lo = hi - tree.weights[ids] + 1
    start = np.maximum(lo, 2)
    span = hi - start + 1
    first = (start - 2) % delta
    return first, span


def _family_costs(first: np.ndarray, span: np.ndarray, delta: int) -> np.ndarray:
    full = span >= delta
    part = (span > 0) & ~full
    f = first[part]
    end = f + span[part]
    wrapped = end > delta
    size = delta + 1
    diff = np.bincount(f, minlength=size) - np.bincount(
        np.minimum(end, delta), minlength=size
    )
    diff[0] += int(np.count_nonzero(wrapped))
    diff -= np.bincount(end[wrapped] - delta, minlength=size)
    return np.cumsum(diff)[:delta] + int(np.count_nonzero(full))


def _family_members(first, span, delta, family):
    return (span >= delta) | ((span > 0) & ((family - first) % delta < span))


def cheapest_offset_family(
    tree: WTree, delta: int, within: VertexSet | None = None
) -> tuple[int, VertexSet]:
    """
    Cheapest family of layers ``L_{1+i}, L_{1+i+Δ}, ...`` for ``i`` in ``[1, Δ]``.

    A vertex sits in layers ``lo..hi`` of its level interval and belongs to a family
    when one of those layers is in it; the root layer is never cut. Cost is the number
    of vertices cut. A vertex of weight ``w`` meets at most ``min(w, Δ)`` families, so
    the cheapest one holds at most ``W / Δ`` vertices, ``W`` the total weight of the
    tree. Ties go to the smallest offset. ``within`` restricts the choice to one part
    of a forest.
    """
    if delta < 1:
        raise ParameterError(f"delta must be at least 1, got {delta}")
    ids = tree.members.ids if within is None else within.ids
    if not ids.size:
        return 1, VertexSet()
    first, span = _family_ranges(tree, ids, delta)
    costs = _family_costs(first, span, delta)
    family = int(np.argmin(costs))
    cut = ids[_family_members(first, span, delta, family)]
    return family + 1, VertexSet.from_sorted(cut)


def _group_by_label(labels: np.ndarray, ids: np.ndarray) -> list[np.ndarray]:
    labs = labels[ids]
    order = np.argsort(labs, kind="stable")
    bounds = np.flatnonzero(np.diff(labs[order])) + 1
    return np.split(ids[order], bounds)


class _Rounds:
    """Book-keeping for the cutting rounds of one KPR run."""

    def __init__(self, graph, weights, delta, h, engine):
        self.graph = graph
        self.weights = weights
        self.delta = delta
        self.h = h
        self.engine = engine
        n = graph.n
        self.alive = np.ones(n, dtype=bool)
        self.done = np.zeros(n, dtype=bool)
        self.separators: list[VertexSet] = []
        self.trees: list[WTree] = []

    def run(self, round_no: int, early_exit: bool) -> bool:
        """One cutting round. Returns True when no component had to be cut."""
        graph, delta, h = self.graph, self.delta, self.h
        labels, sizes = connected_components(graph, self.alive)
        ids = np.flatnonzero(self.alive)
        groups = _group_by_label(labels, ids)
        roots = [int(g[0]) for g in groups]
        forest = weighted_bfs(
            graph, self.weights, roots, alive=self.alive, engine=self.engine
        )
        cut_parts = []
        offsets = []
        for group in groups:
            depth = int(forest.dist[group].max())
            shallow = 2 * depth <= delta * h * h if early_exit else depth <= 3 * h * h * delta
            if shallow:
                self.done[group] = True
                self.alive[group] = False
                continue
            offset, cut = cheapest_offset_family(
                forest, delta, VertexSet.from_sorted(group)
            )
            offsets.append(offset)
            cut_parts.append(cut.ids)
        cut_ids = np.concatenate(cut_parts) if cut_parts else np.empty(0, np.int64)
        self.alive[cut_ids] = False
        separator = VertexSet(cut_ids)
        self.separators.append(separator)
        self.trees.append(forest)
        logger.debug(
            "KPR round %d: %d component(s), %d cut (offsets %s), %d alive",
            round_no,
            len(sizes),
            len(separator),
            offsets[:8],
            int(self.alive.sum()),
        )
        return not cut_parts

    def largest(self) -> VertexSet:
        labels, sizes = connected_components(self.graph, self.done | self.alive)
        if not sizes:
            return VertexSet()
        return VertexSet.from_sorted(np.flatnonzero(labels == 0))

    def union(self) -> VertexSet:
        out = VertexSet()
        for s in self.separators:
            out = out.union(s)
        return out


def _certified(rounds: _Rounds, component: VertexSet) -> bool:
    if not len(component) or bool(rounds.done[component.ids].all()):
        return True
    h, delta = rounds.h, rounds.delta
    tree = weighted_bfs(
        rounds.graph,
        rounds.weights,
        component.min(),
        radius=3 * h * h * delta,
        engine=rounds.engine,
    )
    return bool(np.all(tree.dist[component.ids] != UNREACHABLE))


def _small_clique(graph: Graph, component: VertexSet, h: int) -> MinorModel:
    u = component.min()
    if h == 1:
        return MinorModel.from_lists([[u]])
    for v in graph.adjacency[u]:
        if v in component:
            return MinorModel.from_lists([[u], [v]])
    raise InternalError(f"vertex {u} has no neighbour inside its component")


def kpr(
    graph: Graph,
    weights: WeightFn,
    delta: int,
    h: int,
    *,
    engine: SearchEngine | str = SearchEngine.BUCKET,
) -> KprOutcome:
    """
    Separate ``graph`` so that the largest component has weak diameter at most
    ``6h²Δ``, or return a K_h minor model.

    Every round cuts at most ``W/Δ`` vertices, ``W`` the total weight of the graph.
    Disconnected inputs are handled per component.
    """
    if delta < 1:
        raise ParameterError(f"delta must be at least 1, got {delta}")
    if h < 1:
        raise ParameterError(f"h must be at least 1, got {h}")
    rounds = _Rounds(graph, weights, delta, h, engine)
    for round_no in range(1, h + 1):
        if not rounds.alive.any():
            break
        nothing_cut = rounds.run(round_no, early_exit=round_no == 1)
        if round_no == 1 and nothing_cut:
            logger.debug("KPR: every component is shallow, nothing to cut")
            break
    component = rounds.largest()
    if _certified(rounds, component):
        return _separated(rounds, component)

    if h < 3:
        model = _small_clique(graph, component, h)
        logger.info("KPR found a deep component of %d vertices: %s", len(component), model)
        return KprOutcome(
            kind=OutcomeKind.MINOR,
            separator=rounds.union(),
            round_separators=tuple(rounds.separators),
            component=component,
            round_trees=tuple(rounds.trees),
            model=model,
        )

    decomposition = KprDecomposition(
        separators=tuple(rounds.separators),
        trees=tuple(rounds.trees),
        delta=delta,
        h=h,
        component=component,
    )
    try:
        biclique = extract_khh(graph, weights, decomposition)
        model = biclique_to_clique(biclique, h)
    except (DecompositionError, InternalError) as exc:
        logger.warning("K_{h,h} extraction failed (%s); cutting further", exc)
    else:
        logger.info("KPR extracted %s", model)
        return KprOutcome(
            kind=OutcomeKind.MINOR,
            separator=rounds.union(),
            round_separators=tuple(rounds.separators),
            component=component,
            round_trees=tuple(rounds.trees),
            model=model,
            biclique=biclique,
        )

    extra = 0
    while rounds.alive.any():
        extra += 1
        if extra > graph.n:
            raise InternalError("fallback rounds made no progress")
        rounds.run(h + extra, early_exit=False)
    return _separated(rounds, rounds.largest(), fallback_rounds=extra)


def _separated(rounds: _Rounds, component: VertexSet, fallback_rounds=0) -> KprOutcome:
    outcome = KprOutcome(
        kind=OutcomeKind.SEPARATED,
        separator=rounds.union(),
        round_separators=tuple(rounds.separators),
        component=component,
        round_trees=tuple(rounds.trees),
        fallback_rounds=fallback_rounds,
    )
    logger.debug(
        "KPR separated: |S|=%d |C*|=%d rounds=%s",
        len(outcome.separator),
        len(component),
        outcome.round_sizes,
    )
    return outcome


def _span_of(tree: WTree, vertex: int) -> np.ndarray:
    """Mask of the tree of a forest that holds ``vertex``."""
    if not tree.contains(vertex):
        return np.zeros(tree.n, dtype=bool)
    return tree.root_labels == tree.root_labels[vertex]


def decomposition_violations(
    graph: Graph,
    weights: WeightFn,
    decomposition: KprDecomposition,
    properties=ALL_PROPERTIES,
) -> dict[str, str]:
    """
    Check the defining properties of a KPR decomposition.

    Returns ``{property: reason}`` for each failing property among ``properties``.
    P1 is the exact weak diameter and costs one BFS per vertex of the component.
    """
    d = decomposition
    n = graph.n
    h, delta = d.h, d.delta
    component = d.component
    out: dict[str, str] = {}
    if not len(component):
        return {p: "empty component" for p in properties}
    anchor = component.min()
    w = weights.weights
    if "P1" in properties:
        diameter = weak_diameter(graph, weights, component)
        if diameter != UNREACHABLE and diameter <= 6 * h * h * delta:
            out["P1"] = f"weak diameter {diameter} <= {6 * h * h * delta}"
    if "P2" in properties and d.trees:
        span = _span_of(d.trees[0], anchor)
        if d.separators:
            span &= ~d.separators[0].mask(n)
        heavy = np.flatnonzero(span & (w > delta))
        if heavy.size:
            out["P2"] = f"vertex {int(heavy[0])} has weight {int(w[heavy[0]])} > {delta}"
    removed = np.zeros(n, dtype=bool)
    for i, tree in enumerate(d.trees, start=1):
        if "P3" in properties and "P3" not in out:
            labels, _ = connected_components(graph, ~removed)
            if removed[anchor] or labels[anchor] < 0:
                out["P3"] = f"round {i}: the component was cut away"
            else:
                host = labels == labels[anchor]
                if not np.array_equal(host, _span_of(tree, anchor)):
                    out["P3"] = f"round {i}: tree does not span its component"
                elif not host[component.ids].all():
                    out["P3"] = f"round {i}: component is split"
        if "P5" in properties and "P5" not in out:
            dist = tree.dist[component.ids]
            need = (h + 1) * delta + 1
            if np.any(dist == UNREACHABLE) or int(dist.min()) < need:
                out["P5"] = f"round {i}: a component vertex is closer than {need}"
        if i <= len(d.separators):
            removed |= d.separators[i - 1].mask(n)
        if "P4" in properties and "P4" not in out:
            reason = _layer_span_violation(graph, tree, removed, anchor, delta)
            if reason:
                out["P4"] = f"round {i}: {reason}"
    return out


def _layer_span_violation(graph, tree, removed, anchor, delta) -> str | None:
    span = _span_of(tree, anchor) & ~removed
    if not span.any():
        return None
    labels, _ = connected_components(graph, span)
    for part in component_sets(labels):
        hi = tree.dist[part.ids]
        lo = hi - tree.weights[part.ids] + 1
        width = int(hi.max()) - int(lo.min()) + 1
        if width > delta:
            return f"component of {part.min()} spans {width} layers"
    return None


def _anchors(graph, weights, component, h, delta, engine) -> list[int]:
    first = component.min()
    inside = weighted_bfs(graph, weights, first, alive=component, engine=engine)
    dist = inside.dist[component.ids]
    last = int(component.ids[int(np.argmax(dist))])
    route = tree_path(inside, first, last)
    gap = 2 * (h + 2) * delta + 2
    anchors = [first]
    near = weighted_bfs(graph, weights, anchors, radius=gap - 1, engine=engine)
    for x in route[1:-1]:
        if len(anchors) == h - 1:
            break
        if not near.contains(x):
            anchors.append(x)
            near = weighted_bfs(graph, weights, anchors, radius=gap - 1, engine=engine)
    if len(anchors) < h - 1 or near.contains(last):
        raise InternalError(
            f"found only {len(anchors)} anchors at pairwise distance >= {gap}"
        )
    anchors.append(last)
    return anchors


def extract_khh(
    graph: Graph,
    weights: WeightFn,
    decomposition: KprDecomposition,
    *,
    engine: SearchEngine | str = SearchEngine.BUCKET,
) -> MinorModel:
    """
    Route a K_{h,h} minor through a deep KPR decomposition.

    Anchors ``a_1..a_h`` are picked along a long path inside the component, pairwise
    far apart. In every round tree, each anchor climbs towards the root until the
    climbed part weighs ``(h+1)Δ + 1``; the climbed prefix joins ``A_i`` and the
    rest of the way to the root joins ``B_j``. The model is verified before it is
    returned.
    """
    d = decomposition
    h, delta = d.h, d.delta
    if h < 3:
        raise ParameterError(f"K_(h,h) extraction needs h >= 3, got {h}")
    violations = decomposition_violations(graph, weights, d, GUARDED_PROPERTIES)
    if violations:
        prop = sorted(violations)[0]
        raise DecompositionError(f"{prop} violated: {violations[prop]}", prop=prop)
    anchors = _anchors(graph, weights, d.component, h, delta, engine)
    climb = (h + 1) * delta + 1
    a_sets = [{a} for a in anchors]
    b_sets: list[set[int]] = []
    for tree in d.trees[:h]:
        b_side: set[int] = set()
        for i, a in enumerate(anchors):
            path = path_to_root(tree, a)
            for idx, x in enumerate(path):
                if tree_distance(tree, x, a) >= climb:
                    break
            else:
                raise InternalError(f"anchor {a} is too close to its root")
            a_sets[i].update(path[:idx])
            b_side.update(path[idx:])
        b_sets.append(b_side)
    model = MinorModel.from_lists(a_sets + b_sets, MinorPattern.BICLIQUE)
    report = verify_minor_model(graph, model)
    if not report:
        raise InternalError(f"extracted K_(h,h) is invalid: {report.detail}")
    logger.debug("Extracted K_(%d,%d) with anchors %s", h, h, anchors)
    return model


def biclique_to_clique(model: MinorModel, order: int) -> MinorModel:
    """
    Contract the matching ``A_i - B_i`` of a K_{h,h} model into a clique model.

    Any order up to ``h + 1`` works: ``A_i ∪ B_i`` for ``i < order``, then ``A_order``,
    and for ``order = h + 1`` the lone ``B_h`` as the last set.
    """
    if model.pattern != MinorPattern.BICLIQUE:
        raise ParameterError("expected a biclique model")
    h = model.t
    if not 1 <= order <= h + 1:
        raise ParameterError(f"order must lie in [1, {h + 1}], got {order}")
    a_side, b_side = model.branch_sets[:h], model.branch_sets[h:]
    if order == h + 1:
        sets = [a_side[i].union(b_side[i]) for i in range(h - 1)]
        sets += [a_side[h - 1], b_side[h - 1]]
    else:
        sets = [a_side[i].union(b_side[i]) for i in range(order - 1)]
        sets.append(a_side[order - 1])
    return MinorModel(tuple(sets), MinorPattern.CLIQUE)
