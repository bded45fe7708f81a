import itertools

import numpy as np
import pytest

from minorsep.dense_reduction import (
    MutableMinorState,
    clique_minor_super_dense,
    clique_order,
    densify,
    lower_degree_bound,
    minor_in_dense,
    two_subdivision_or_denser,
    upper_vertex_bound,
)
from minorsep.generators import complete, path
from minorsep.graph_core import build_graph, induced_subgraph, largest_component
from minorsep.helpers import DomainError, ParameterError
from minorsep.models import MinorModel
from minorsep.verify import verify_minor_model


def test_bounds():
    assert clique_order(99) == 0
    assert clique_order(400) == 2
    assert upper_vertex_bound(100) == 102
    assert lower_degree_bound(100) == 94
    assert lower_degree_bound(101) == 95


def test_state_bookkeeping():
    state = MutableMinorState(4, np.array([[0, 1], [1, 2], [2, 3], [0, 2]]))
    assert state.delta == 1
    assert state.first_of_min_degree() == 3
    before = state.mu
    state.contract(3, 2)
    assert not state.is_live(3)
    assert state.f[2] == [2, 3]
    assert state.mu < before
    assert state.degree(2) == 2
    state.remove_edge(0, 1)
    assert state.delta == 1
    assert state.edge_count == 2


def test_densify_measure_and_output():
    g = complete(12)
    trace: list[int] = []
    minor, images = densify(g, 3, mu_trace=trace)
    assert all(b < a for a, b in zip(trace, trace[1:]))
    assert minor.n <= 6
    assert minor.min_degree >= 3
    seen: set[int] = set()
    for image in images:
        assert seen.isdisjoint(image.tolist())
        seen.update(image.tolist())
        sub, _ = induced_subgraph(g, image)
        assert len(largest_component(sub)) == sub.n
    for a, b in minor.edges().tolist():
        assert any(g.has_edge(u, v) for u in images[a] for v in images[b])


def test_densify_needs_enough_edges():
    with pytest.raises(ParameterError):
        densify(path(10), 2)


def test_two_subdivision_routes_missing_edge():
    edges = [e for e in itertools.combinations(range(402), 2) if e != (0, 1)]
    g = build_graph(402, edges)
    model = two_subdivision_or_denser(g, 400)
    assert isinstance(model, MinorModel)
    assert [s.tolist() for s in model.branch_sets] == [[0, 2], [1]]
    assert verify_minor_model(g, model)


def test_two_subdivision_checks_input():
    with pytest.raises(DomainError):
        two_subdivision_or_denser(path(10), 4)


def test_super_dense_uses_common_neighbours():
    g = complete(400)
    model = clique_minor_super_dense(g, 400)
    assert [s.tolist() for s in model.branch_sets] == [[0, 2], [1]]
    assert verify_minor_model(g, model)


def test_small_d_gives_empty_model():
    assert two_subdivision_or_denser(complete(8), 4).t == 0


def test_minor_in_dense_small_cases():
    assert minor_in_dense(path(3), 1).branch_sets[0].tolist() == [0]
    with pytest.raises(ParameterError):
        minor_in_dense(path(10), 2)
    with pytest.raises(ParameterError):
        minor_in_dense(path(10), 0)


@pytest.mark.slow
def test_minor_in_dense_complete_graph():
    g = complete(801)
    model = minor_in_dense(g, 2)
    assert model.t == 2
    assert verify_minor_model(g, model)


def test_minor_in_dense_rejects_d_too_small_for_h():
    with pytest.raises(ParameterError, match="only guarantees K_0"):
        minor_in_dense(complete(30), 2, d=4)
    with pytest.raises(ParameterError, match="K_3 needs d >= 900"):
        minor_in_dense(complete(30), 3, d=899)
