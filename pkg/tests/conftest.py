import pytest

from minorsep.config import DESK, parse_profile
from minorsep.generators import complete, cycle, grid, path, star
from minorsep.graph_core import NO_PARENT, WeightFn, build_graph
from minorsep.wbfs import tree_from_parents


def star_tree(n: int, root: int):
    """Star tree on n vertices rooted at ``root`` with unit weights."""
    parent = [root] * n
    parent[root] = NO_PARENT
    return tree_from_parents(parent, WeightFn.constant(n, 1))


@pytest.fixture
def p3():
    return path(3)


@pytest.fixture
def p10():
    return path(10)


@pytest.fixture
def k5():
    return complete(5)


@pytest.fixture
def c10():
    return cycle(10)


@pytest.fixture
def grid5():
    return grid(5, 5)


@pytest.fixture
def grid30():
    return grid(30, 30)


@pytest.fixture(scope="module")
def big_star():
    return star(10**4)


@pytest.fixture
def desk():
    return DESK


@pytest.fixture
def one_shot():
    """Desk constants with a single loop iteration."""
    return parse_profile("base=desk\nk_base=1\n", name="one-shot")


@pytest.fixture
def star_connector():
    """Hosts where the first `count` vertices see everything, with their star trees."""

    def build(n: int, count: int):
        host = build_graph(n, [(r, v) for r in range(count) for v in range(n) if v != r])
        return host, [star_tree(n, r) for r in range(count)]

    return build


@pytest.fixture
def unit_desk():
    """Desk constants starting from unit weights."""
    return parse_profile("base=desk\nw_init=1\n", name="unit-desk")
