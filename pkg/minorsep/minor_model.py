"""
Clique minors from a stochastic connector.

A doubly subdivided clique is mapped into the host at random: pattern vertices go to
uniform host vertices and every pattern edge is routed along the tree path of its own
connector tree. A valid sample converts deterministically into a clique minor model.
"""

import itertools
import logging
from collections import defaultdict
from typing import Sequence

import numpy as np

from minorsep.graph_core import Graph, VertexSet
from minorsep.helpers import (
    ConversionError,
    DomainError,
    ParameterError,
    PatternRole,
)
from minorsep.models import (
    AlmostEmbedding,
    EmbeddingFailure,
    MinorModel,
    MinorSearchFailure,
    PatternGraph,
)
from minorsep.verify import verify_minor_model
from minorsep.wbfs import WTree, tree_path

logger = logging.getLogger(__name__)


def double_subdivision(t: int) -> PatternGraph:
    """K_t with every edge replaced by a path through two new vertices."""
    if t < 1:
        raise ParameterError(f"clique order must be at least 1, got {t}")
    roles = [PatternRole.BRANCH] * t
    labels: list[tuple[int, ...]] = [(i,) for i in range(t)]
    edges = []
    for i, j in itertools.combinations(range(t), 2):
        a = len(roles)
        roles += [PatternRole.SUBDIVISION_A, PatternRole.SUBDIVISION_B]
        labels += [(i, j), (i, j)]
        edges += [(i, a), (a, a + 1), (a + 1, j)]
    return PatternGraph(t=t, roles=tuple(roles), labels=tuple(labels), edges=tuple(edges))


def required_trees(t: int) -> int:
    return 3 * t * (t - 1) // 2


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def sample_almost_embedding(
    graph: Graph, trees: Sequence[WTree], t: int, seed=None
) -> AlmostEmbedding | EmbeddingFailure:
    """
    Draw one almost-embedding of the doubly subdivided K_t.

    Pattern vertices are mapped to uniform host vertices, the pattern edges get
    distinct trees in random order, and each edge follows the tree path between its
    mapped ends. Returns an :class:`EmbeddingFailure` when an end is missing from its
    tree, two pattern vertices share a host vertex, or the paths of two pattern edges
    without a common end intersect.
    """
    pattern = double_subdivision(t)
    if len(trees) < pattern.m:
        raise ParameterError(
            f"{pattern.m} trees are needed for K_{t}, only {len(trees)} given"
        )
    if not graph.n:
        raise DomainError("cannot embed into an empty graph")
    rng = _rng(seed)
    vertex_map = rng.integers(0, graph.n, size=pattern.n).tolist()
    assignment = rng.permutation(len(trees))[: pattern.m].tolist()
    if len(set(vertex_map)) < pattern.n:
        return EmbeddingFailure("collision", "two pattern vertices share a host vertex")
    paths = []
    for e, (u, v) in enumerate(pattern.edges):
        tree = trees[assignment[e]]
        hu, hv = vertex_map[u], vertex_map[v]
        if not (tree.contains(hu) and tree.contains(hv)):
            return EmbeddingFailure("outside", f"pattern edge {e} leaves its tree")
        try:
            paths.append(tuple(tree_path(tree, hu, hv)))
        except DomainError:
            return EmbeddingFailure("outside", f"pattern edge {e} spans two trees")
    crossing = _first_crossing(pattern, paths)
    if crossing is not None:
        e, f = crossing
        return EmbeddingFailure("crossing", f"paths of edges {e} and {f} intersect")
    return AlmostEmbedding(
        vertex_map=tuple(vertex_map),
        edge_paths=tuple(paths),
        edge_trees=tuple(assignment),
    )


def _first_crossing(pattern: PatternGraph, paths) -> tuple[int, int] | None:
    users: dict[int, list[int]] = defaultdict(list)
    for e, path in enumerate(paths):
        for x in set(path):
            users[x].append(e)
    edges = pattern.edges
    for x in sorted(users):
        for e, f in itertools.combinations(users[x], 2):
            if not set(edges[e]) & set(edges[f]):
                return e, f
    return None


def _minimal_link(path, left: set[int], right: set[int]) -> list[int] | None:
    """Inner vertices of a shortest stretch of ``path`` from ``left`` to ``right``."""
    last_left = None
    for idx, x in enumerate(path):
        if x in left:
            last_left = idx
        elif x in right and last_left is not None:
            return list(path[last_left + 1 : idx])
    return None


def embedding_to_model(
    graph: Graph, pattern: PatternGraph, embedding: AlmostEmbedding
) -> MinorModel:
    """
    Turn an almost-embedding of the doubly subdivided K_t into a K_t minor model.

    ``C'_i`` gathers the paths of the pattern edges at branch vertex ``i``. For each
    pair ``i < j`` the middle path contributes the inner vertices of its shortest
    stretch from ``C'_i`` to ``C'_j``, and those are added to ``C_i``.
    """
    t = pattern.t
    paths = embedding.edge_paths
    core: list[set[int]] = [{embedding.vertex_map[i]} for i in range(t)]
    for e, (u, v) in enumerate(pattern.edges):
        for end in (u, v):
            if pattern.roles[end] == PatternRole.BRANCH:
                core[end].update(paths[e])
    for i, j in itertools.combinations(range(t), 2):
        if core[i] & core[j]:
            raise ConversionError(f"branch cores {i} and {j} intersect", pair=(i, j))
    sets = [set(c) for c in core]
    for i, j in itertools.combinations(range(t), 2):
        a, _ = pattern.subdivision_of(i, j)
        middle = pattern.edges.index((a, a + 1))
        link = _minimal_link(paths[middle], core[i], core[j])
        if link is None:
            raise ConversionError(f"middle path of pair ({i}, {j}) is broken", pair=(i, j))
        sets[i].update(link)
    model = MinorModel.from_lists(sets)
    report = verify_minor_model(graph, model)
    if not report:
        raise ConversionError(f"converted model is invalid: {report.detail}")
    return model


def find_minor(
    graph: Graph,
    trees: Sequence[WTree],
    t: int,
    seed=None,
    max_attempts: int = 2,
) -> MinorModel | MinorSearchFailure:
    """
    Sample and convert up to ``max_attempts`` times; each attempt gets its own child
    seed, so attempts are independent and reproducible.
    """
    needed = required_trees(t)
    if len(trees) < needed:
        raise ParameterError(f"{needed} trees are needed for K_{t}, only {len(trees)} given")
    if max_attempts < 1:
        raise ParameterError(f"max_attempts must be positive, got {max_attempts}")
    if len(trees) < 20 * t * t:
        logger.warning(
            "Sampling K_%d from %d trees, fewer than the %d the success bound assumes",
            t,
            len(trees),
            20 * t * t,
        )
    pattern = double_subdivision(t)
    children = np.random.SeedSequence(seed).spawn(max_attempts)
    reasons = []
    for attempt, child in enumerate(children, start=1):
        sample = sample_almost_embedding(graph, trees, t, np.random.default_rng(child))
        if isinstance(sample, EmbeddingFailure):
            reasons.append(sample.reason)
            logger.debug("Attempt %d rejected: %s", attempt, sample.detail)
            continue
        try:
            model = embedding_to_model(graph, pattern, sample)
        except ConversionError as exc:
            reasons.append("conversion")
            logger.debug("Attempt %d failed to convert: %s", attempt, exc)
            continue
        logger.info("Found %s on attempt %d", model, attempt)
        return model
    logger.info("No K_%d after %d attempts: %s", t, max_attempts, reasons)
    return MinorSearchFailure(attempts=max_attempts, reasons=tuple(reasons))


def lift_model(model: MinorModel, parts: Sequence[VertexSet]) -> MinorModel:
    """Expand the branch sets of a quotient-graph model through its contraction parts."""
    lifted = []
    for branch in model.branch_sets:
        ids = np.concatenate([parts[q].ids for q in branch]) if len(branch) else []
        lifted.append(VertexSet(ids))
    return MinorModel(tuple(lifted), model.pattern)
