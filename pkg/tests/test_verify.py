from fractions import Fraction

import numpy as np
import pytest

from minorsep.config import DESK, parse_profile
from minorsep.generators import complete, path, star
from minorsep.graph_core import NO_PARENT, UNREACHABLE, VertexSet, WeightFn, build_graph
from minorsep.helpers import InputError, InvariantStatus, ScaleError
from minorsep.io import trace_from_dict, trace_to_dict
from minorsep.models import MinorModel
from minorsep.separator import find_separator_once
from minorsep.verify import (
    check_invariants,
    collision_probability_exact,
    dist_oracle,
    is_valid_connector,
    verify_minor_model,
    verify_model_of,
    verify_separator,
    weak_diameter,
)
from minorsep.wbfs import OUTSIDE, tree_from_parents, weighted_bfs


def test_separator_middle_of_path(p3):
    report = verify_separator(p3, VertexSet([1]))
    assert report.valid
    assert report.max_component_fraction == Fraction(1, 3)
    assert report.components == {1: 2}


def test_empty_separator_of_connected_graph(p3):
    report = verify_separator(p3, VertexSet())
    assert not report.valid
    assert report.max_component_fraction == 1


def test_separator_of_everything(p3):
    report = verify_separator(p3, VertexSet([0, 1, 2]), Fraction(1, 10))
    assert report.valid
    assert report.components == {}
    assert report.to_dict()["separator_size"] == 3


def test_separator_out_of_range(p3):
    with pytest.raises(InputError):
        verify_separator(p3, VertexSet([5]))


@pytest.mark.parametrize(
    "sets, violation",
    [
        ([[0], []], "empty"),
        ([[0], [7]], "range"),
        ([[0, 1], [1, 2]], "disjointness"),
        ([[0, 2], [1]], "connectivity"),
        ([[0], [2]], "adjacency"),
    ],
)
def test_model_violations(p3, sets, violation):
    report = verify_model_of(p3, [(0, 1)], sets)
    assert not report
    assert report.violation == violation


def test_valid_clique_model(k5):
    model = MinorModel.from_lists([[v] for v in range(5)])
    assert verify_minor_model(k5, model)
    assert verify_minor_model(k5, model).to_dict()["valid"]


def test_path_contains_k2_but_not_k3(p10):
    assert verify_minor_model(p10, MinorModel.from_lists([[0, 1, 2], [3, 4]]))
    assert not verify_minor_model(p10, MinorModel.from_lists([[0, 1], [2, 3], [4, 5]]))


def test_distance_oracle():
    g = build_graph(4, [(0, 1), (1, 2)])
    w = WeightFn([1, 2, 3, 4])
    assert dist_oracle(g, w, 0, 2) == 6
    assert dist_oracle(g, w, 2, 0) == 6
    assert dist_oracle(g, w, 0, 3) == UNREACHABLE


def test_distance_oracle_scale_guard(p3):
    with pytest.raises(ScaleError):
        dist_oracle(p3, WeightFn([2**53, 1, 1]), 0, 2)


def test_weak_diameter():
    g = build_graph(4, [(0, 1), (1, 2)])
    w = WeightFn.constant(4, 1)
    assert weak_diameter(g, w, VertexSet([0, 2])) == 3
    assert weak_diameter(g, w, VertexSet([0, 3])) == UNREACHABLE


@pytest.mark.parametrize("method", ["pairwise", "subtree"])
def test_collision_of_two_stars(star_connector, method):
    n = 30
    _, trees = star_connector(n, 2)
    probability = collision_probability_exact(trees[0], trees[1], method)
    assert probability == Fraction(3 * n - 3, n * n)


def test_collision_methods_agree_on_path_trees(p10):
    w = WeightFn.constant(10, 1)
    a = weighted_bfs(p10, w, 0)
    b = weighted_bfs(p10, w, 9)
    pairwise = collision_probability_exact(a, b, "pairwise")
    assert pairwise == collision_probability_exact(a, b, "subtree")
    # root paths of a path graph: [0..u] and [v..9] meet iff u >= v
    assert pairwise == Fraction(55, 100)


def test_pairwise_enumeration_guard(star_connector):
    _, trees = star_connector(30, 2)
    with pytest.raises(ScaleError):
        collision_probability_exact(trees[0], trees[1], "pairwise", max_pairs=10)


@pytest.mark.parametrize("k, valid", [(1, True), (10, True), (20, False)])
def test_star_connector_validity(star_connector, k, valid):
    host, trees = star_connector(2000, 2)
    report = is_valid_connector(host, trees, k)
    assert all(report.size_ok)
    assert report.valid is valid
    assert report.worst == Fraction(3 * 2000 - 3, 2000**2)
    assert report.to_dict()["threshold"] == str(Fraction(1, 5 * k * k))


@pytest.fixture(scope="module")
def star_trace():
    return find_separator_once(star(10**4), 2, DESK).trace


def test_decremented_weight_fails_weight_checks(star_trace):
    record = star_trace.records[0]
    original = record.weights
    lowered = original.copy()
    lowered[7] -= 1
    record.weights = lowered
    try:
        report = check_invariants(star_trace)
    finally:
        record.weights = original
    assert report.status(1, 3) == InvariantStatus.FAIL
    assert report.status(1, 5) == InvariantStatus.FAIL
    assert report.status(2, 3) == InvariantStatus.PASS


def test_tampered_total_fails_weight_check(star_trace):
    record = star_trace.records[0]
    original = record.total_weight
    record.total_weight = original + 1
    try:
        report = check_invariants(star_trace)
    finally:
        record.total_weight = original
    assert report.status(1, 3) == InvariantStatus.FAIL
    assert not report.passed


def test_weight_floor(star_trace):
    record = star_trace.records[1]
    original = record.weights
    lowered = original.copy()
    lowered[5] = 1
    record.weights = lowered
    try:
        report = check_invariants(star_trace)
    finally:
        record.weights = original
    assert report.status(2, 5) == InvariantStatus.FAIL


def test_loaded_trace_is_unverifiable_not_failing(star_trace):
    loaded = trace_from_dict(trace_to_dict(star_trace))
    report = check_invariants(loaded)
    assert report.passed
    assert report.status(1, 5) == InvariantStatus.UNVERIFIABLE
    assert report.status(1, 4) == InvariantStatus.UNVERIFIABLE
    assert report.status(2, 1) == InvariantStatus.NOT_APPLICABLE
    payload = report.to_dict()
    assert payload["passed"] is True
    assert {c["status"] for c in payload["checks"]} >= {"pass", "unverifiable"}


def test_invariant_report_lookup(star_trace):
    report = check_invariants(star_trace)
    with pytest.raises(KeyError):
        report.status(9, 1)
    assert np.all([c.status != InvariantStatus.FAIL for c in report.checks])


def test_separator_verifier_on_long_path():
    g = path(99)
    assert verify_separator(g, VertexSet([33, 66])).valid
    assert not verify_separator(g, VertexSet([10])).valid


def _shrunk_star(n: int, root: int, size: int):
    """Star rooted at ``root`` that keeps only its first ``size`` vertices."""
    parent = [OUTSIDE] * n
    for v in range(size):
        parent[v] = root
    parent[root] = NO_PARENT
    return tree_from_parents(parent, WeightFn.constant(n, 1))


def test_tree_size_check_follows_profile_slack(star_trace):
    record = star_trace.records[0]
    original = record.tree
    record.tree = _shrunk_star(star_trace.n, 0, 9800)
    wide = parse_profile("base=desk\nbalance_slack_divisor=1\n", name="wide")
    try:
        strict = check_invariants(star_trace)
        loose = check_invariants(star_trace, wide)
    finally:
        record.tree = original
    assert strict.status(1, 4) == InvariantStatus.FAIL
    assert loose.status(1, 4) == InvariantStatus.PASS


@pytest.mark.parametrize("k", [4, 8])
def test_connector_of_k_stars_on_a_clique(star_connector, k):
    n = 15 * k * k + 100
    host = complete(n)
    _, trees = star_connector(n, k)
    report = is_valid_connector(host, trees, k)
    assert report.valid
    assert report.worst == Fraction(3 * n - 3, n * n)

    at_threshold = n - n // (10 * k)
    assert is_valid_connector(host, [_shrunk_star(n, 0, at_threshold)] + trees[1:], k).valid
    shrunk = is_valid_connector(host, [_shrunk_star(n, 0, at_threshold - 1)] + trees[1:], k)
    assert shrunk.size_ok[0] is False
    assert all(shrunk.size_ok[1:])
    assert not shrunk.valid
