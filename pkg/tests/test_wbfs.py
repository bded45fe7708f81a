import numpy as np
import pytest

from minorsep.generators import grid, random_gnm, star
from minorsep.graph_core import NO_PARENT, UNREACHABLE, VertexSet, WeightFn, build_graph
from minorsep.helpers import DomainError, ParameterError
from minorsep.verify import dist_oracle_all
from minorsep.wbfs import (
    OUTSIDE,
    levels,
    path_to_root,
    tree_distance,
    tree_from_parents,
    tree_path,
    weighted_bfs,
)


@pytest.fixture
def weighted_path():
    return build_graph(3, [(0, 1), (1, 2)]), WeightFn([1, 2, 3])


def test_source_distance_is_its_weight(weighted_path):
    g, w = weighted_path
    tree = weighted_bfs(g, w, 0)
    assert tree.dist.tolist() == [1, 3, 6]
    assert tree.parent.tolist() == [NO_PARENT, 0, 1]
    assert tree.order.tolist() == [0, 1, 2]
    assert tree.subtree_size.tolist() == [3, 2, 1]
    assert tree.depth.tolist() == [0, 1, 2]


def test_radius_truncates(weighted_path):
    g, w = weighted_path
    tree = weighted_bfs(g, w, 0, radius=3)
    assert tree.members.tolist() == [0, 1]
    assert int(tree.dist[2]) == UNREACHABLE
    assert int(tree.subtree_size[2]) == 0
    assert weighted_bfs(g, w, 1, radius=1).size == 0


def test_alive_restricts_search(weighted_path):
    g, w = weighted_path
    tree = weighted_bfs(g, w, 0, alive=VertexSet([0, 2]))
    assert tree.members.tolist() == [0]
    with pytest.raises(DomainError):
        weighted_bfs(g, w, 1, alive=VertexSet([0, 2]))


def test_multi_source_forest():
    g = grid(1, 7)
    tree = weighted_bfs(g, WeightFn.constant(7, 1), [0, 6])
    assert tree.roots == (0, 6)
    assert tree.dist.tolist() == [1, 2, 3, 4, 3, 2, 1]
    # vertex 3 is equidistant and takes the smaller-id parent
    assert int(tree.parent[3]) == 2
    assert tree.root_labels.tolist() == [0, 0, 0, 0, 6, 6, 6]
    with pytest.raises(DomainError):
        tree_path(tree, 1, 5)


def test_engines_agree_on_grid():
    g = grid(6, 6)
    rng = np.random.default_rng(3)
    w = WeightFn(rng.integers(1, 5, size=g.n))
    a = weighted_bfs(g, w, [0, 35], radius=12, engine="bucket")
    b = weighted_bfs(g, w, [0, 35], radius=12, engine="split")
    assert a.dist.tolist() == b.dist.tolist()
    assert a.parent.tolist() == b.parent.tolist()
    assert a.order.tolist() == b.order.tolist()


def test_unknown_engine(weighted_path):
    g, w = weighted_path
    with pytest.raises(ParameterError, match="Unknown engine type"):
        weighted_bfs(g, w, 0, engine="dijkstra")


@pytest.mark.parametrize("seed", range(100))
def test_matches_distance_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(20, 120))
    g = random_gnm(n, int(rng.integers(n, 3 * n)), seed=seed)
    w = WeightFn(rng.integers(1, 11, size=n))
    tree = weighted_bfs(g, w, 0)
    assert tree.dist.tolist() == dist_oracle_all(g, w, 0).tolist()


def test_path_to_root_and_tree_path():
    g = grid(3, 3)
    tree = weighted_bfs(g, WeightFn.constant(9, 1), 0)
    assert path_to_root(tree, 8)[-1] == 0
    assert len(path_to_root(tree, 8)) == 5
    route = tree_path(tree, 2, 6)
    assert route[0] == 2 and route[-1] == 6
    assert all(g.has_edge(a, b) for a, b in zip(route, route[1:]))
    assert tree_path(tree, 4, 4) == [4]


def test_levels_and_tree_distance(weighted_path):
    g, w = weighted_path
    tree = weighted_bfs(g, w, 0)
    assert levels(tree, 0) == (1, 1)
    assert levels(tree, 2) == (4, 6)
    assert tree_distance(tree, 1, 2) == 5
    assert tree_distance(tree, 2, 2) == 3


def test_tree_from_parents():
    w = WeightFn([2, 1, 1, 5])
    tree = tree_from_parents([NO_PARENT, 0, 0, OUTSIDE], w)
    assert tree.dist.tolist() == [2, 3, 3, UNREACHABLE]
    assert tree.subtree_size.tolist() == [3, 1, 1, 0]
    assert not tree.contains(3)
    assert tree.max_level == 3
    with pytest.raises(DomainError):
        path_to_root(tree, 3)


def test_tree_from_parents_rejects_cycle():
    with pytest.raises(DomainError):
        tree_from_parents([1, 0, NO_PARENT], WeightFn.constant(3, 1))


def test_star_from_its_centre():
    tree = weighted_bfs(star(5), WeightFn.constant(5, 1), 0)
    assert tree.dist.tolist() == [1, 2, 2, 2, 2]
    assert tree.parent.tolist() == [NO_PARENT, 0, 0, 0, 0]
    assert tree.subtree_size.tolist() == [5, 1, 1, 1, 1]
    assert tree.depth.tolist() == [0, 1, 1, 1, 1]


@pytest.mark.parametrize("seed", range(10))
def test_larger_radius_keeps_every_member(seed):
    rng = np.random.default_rng(seed)
    g = random_gnm(80, 160, seed=seed)
    w = WeightFn(rng.integers(1, 6, size=g.n))
    small, large = sorted(int(r) for r in rng.integers(1, 30, size=2))
    inner = weighted_bfs(g, w, 0, radius=small)
    outer = weighted_bfs(g, w, 0, radius=large)
    assert set(inner.members.tolist()) <= set(outer.members.tolist())
    assert inner.dist[inner.members].tolist() == outer.dist[inner.members].tolist()


@pytest.mark.parametrize("seed", range(10))
def test_subtree_sizes_count_ancestors(seed):
    rng = np.random.default_rng(seed)
    g = random_gnm(60, 150, seed=seed)
    tree = weighted_bfs(g, WeightFn(rng.integers(1, 9, size=g.n)), 0, radius=40)
    members = tree.members
    total_subtree = int(tree.subtree_size[members].sum())
    assert total_subtree == int((tree.depth[members] + 1).sum())
