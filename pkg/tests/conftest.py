import pytest

from ranking_forge.graphs import backup_counterexample_graph, generate_family, make_graph


@pytest.fixture
def k2():
    return make_graph(2, [(0, 1)], m_star=[(0, 1)])


@pytest.fixture
def p4():
    # a=0, b=1, c=2, d=3
    return generate_family("path", n=4)


@pytest.fixture
def cex():
    # u=0, u1=1, v=2, v1=3, w=4
    return backup_counterexample_graph()
