import numpy as np
import pytest

from minorsep.generators import grid, path
from minorsep.graph_core import NO_PARENT, VertexSet, WeightFn, build_graph, largest_component
from minorsep.helpers import DecompositionError, MinorPattern, OutcomeKind, ParameterError
from minorsep.kpr import (
    biclique_to_clique,
    cheapest_offset_family,
    decomposition_violations,
    extract_khh,
    kpr,
)
from minorsep.models import KprDecomposition
from minorsep.verify import verify_minor_model, weak_diameter
from minorsep.wbfs import tree_from_parents, weighted_bfs

SPOKE = 5


def _spoke(r: int, j: int, k: int, length: int) -> int:
    """Vertex k (1 next to the root) of the spoke from root r to path vertex j."""
    return 44 + (r * length + j) * SPOKE + (k - 1)


@pytest.fixture
def spoked_path():
    """
    Path q_0..q_40 with three roots, each joined to every q_j by its own spoke of
    five vertices. Tree r hangs the other roots' spokes below the path.
    """
    length = 41
    roots = [41, 42, 43]
    n = 44 + 3 * length * SPOKE
    edges = [(j, j + 1) for j in range(length - 1)]
    for r, root in enumerate(roots):
        for j in range(length):
            edges.append((root, _spoke(r, j, 1, length)))
            for k in range(1, SPOKE):
                edges.append((_spoke(r, j, k, length), _spoke(r, j, k + 1, length)))
            edges.append((_spoke(r, j, SPOKE, length), j))
    graph = build_graph(n, edges)
    weights = WeightFn.constant(n, 1)
    trees = []
    for r, root in enumerate(roots):
        parent = [NO_PARENT] * n
        for s, other in enumerate(roots):
            for j in range(length):
                if s == r:
                    parent[_spoke(s, j, 1, length)] = root
                    for k in range(2, SPOKE + 1):
                        parent[_spoke(s, j, k, length)] = _spoke(s, j, k - 1, length)
                    parent[j] = _spoke(s, j, SPOKE, length)
                else:
                    parent[_spoke(s, j, SPOKE, length)] = j
                    for k in range(1, SPOKE):
                        parent[_spoke(s, j, k, length)] = _spoke(s, j, k + 1, length)
            if s != r:
                parent[other] = _spoke(s, 0, 1, length)
        trees.append(tree_from_parents(parent, weights))
    return graph, weights, trees


def _decomposition(trees, delta):
    return KprDecomposition(
        separators=(VertexSet(),) * len(trees),
        trees=tuple(trees),
        delta=delta,
        h=3,
        component=VertexSet(range(41)),
    )


def test_offset_family_on_path():
    g = path(11)
    tree = weighted_bfs(g, WeightFn.constant(11, 1), 0)
    offset, cut = cheapest_offset_family(tree, 3)
    # layers 3, 6, 9 hold one vertex fewer than layers 2, 5, 8, 11
    assert offset == 2
    assert cut.tolist() == [2, 5, 8]


def test_offset_family_never_cuts_root():
    g = path(4)
    tree = weighted_bfs(g, WeightFn.constant(4, 1), 0)
    _, cut = cheapest_offset_family(tree, 1)
    assert 0 not in cut
    assert cut.tolist() == [1, 2, 3]


def test_heavy_vertex_is_in_every_family():
    g = path(3)
    tree = weighted_bfs(g, WeightFn([1, 3, 1]), 0)
    offset, cut = cheapest_offset_family(tree, 2)
    assert (offset, cut.tolist()) == (1, [1])


def test_offset_family_cost_bound(grid30):
    tree = weighted_bfs(grid30, WeightFn.constant(900, 1), 0)
    for delta in (2, 3, 7):
        _, cut = cheapest_offset_family(tree, delta)
        assert len(cut) * delta <= 900


@pytest.mark.parametrize("seed", range(5))
def test_offset_family_bound_uses_total_weight(seed):
    g = grid(12, 12)
    w = WeightFn(np.random.default_rng(seed).integers(1, 6, size=g.n))
    tree = weighted_bfs(g, w, 0)
    total = int(w.weights[tree.members.ids].sum())
    for delta in (2, 4, 9):
        _, cut = cheapest_offset_family(tree, delta)
        assert len(cut) * delta <= total


def test_offset_family_rejects_zero_delta(p10):
    tree = weighted_bfs(p10, WeightFn.constant(10, 1), 0)
    with pytest.raises(ParameterError):
        cheapest_offset_family(tree, 0)


def test_shallow_graph_is_not_cut(k5):
    outcome = kpr(k5, WeightFn.constant(5, 1), 1, 2)
    assert outcome.kind == OutcomeKind.SEPARATED
    assert len(outcome.separator) == 0
    assert len(outcome.component) == 5


def test_deep_grid_gives_single_vertex_minor(grid30):
    outcome = kpr(grid30, WeightFn.constant(900, 1), 4, 1)
    assert outcome.kind == OutcomeKind.MINOR
    assert outcome.model.t == 1
    assert verify_minor_model(grid30, outcome.model)


@pytest.mark.parametrize("h", [2, 3])
def test_kpr_outcome_contract(h):
    g = grid(20, 20)
    w = WeightFn.constant(g.n, 1)
    delta = 2
    outcome = kpr(g, w, delta, h)
    for cut in outcome.round_separators:
        assert len(cut) * delta <= g.n
    if outcome.kind == OutcomeKind.MINOR:
        assert verify_minor_model(g, outcome.model)
        assert outcome.model.t == h
        return
    alive = ~outcome.separator.mask(g.n)
    assert largest_component(g, alive) == outcome.component
    assert weak_diameter(g, w, outcome.component) <= 6 * h * h * delta


def test_kpr_rejects_bad_parameters(p10):
    w = WeightFn.constant(10, 1)
    with pytest.raises(ParameterError):
        kpr(p10, w, 0, 2)
    with pytest.raises(ParameterError):
        kpr(p10, w, 1, 0)


def test_decomposition_properties(spoked_path):
    graph, weights, trees = spoked_path
    violations = decomposition_violations(graph, weights, _decomposition(trees, 1))
    # shallow weak diameter and wide layers, but the guarded properties hold
    assert set(violations) == {"P1", "P4"}


def test_extract_biclique(spoked_path):
    graph, weights, trees = spoked_path
    model = extract_khh(graph, weights, _decomposition(trees, 1))
    assert model.pattern == MinorPattern.BICLIQUE
    assert model.t == 3
    assert verify_minor_model(graph, model)
    # anchors sit at both ends of the path and just outside the first one's reach
    assert [s.min() for s in model.branch_sets[:3]] == [0, 11, 40]


@pytest.mark.parametrize("order", [1, 3, 4])
def test_biclique_contracts_to_clique(spoked_path, order):
    graph, weights, trees = spoked_path
    model = biclique_to_clique(extract_khh(graph, weights, _decomposition(trees, 1)), order)
    assert model.pattern == MinorPattern.CLIQUE
    assert model.t == order
    assert verify_minor_model(graph, model)


def test_extract_rejects_shallow_roots(spoked_path):
    graph, weights, trees = spoked_path
    with pytest.raises(DecompositionError) as info:
        extract_khh(graph, weights, _decomposition(trees, 3))
    assert info.value.prop == "P5"


def test_biclique_to_clique_bounds(spoked_path):
    graph, weights, trees = spoked_path
    model = extract_khh(graph, weights, _decomposition(trees, 1))
    with pytest.raises(ParameterError):
        biclique_to_clique(model, 5)
    with pytest.raises(ParameterError):
        biclique_to_clique(biclique_to_clique(model, 2), 1)


def test_round_trees_are_forests_over_alive(grid30):
    outcome = kpr(grid30, WeightFn.constant(900, 1), 3, 2)
    first = outcome.round_trees[0]
    assert first.roots == (0,)
    assert np.all(first.dist >= 1)
