from __future__ import annotations

import pytest

from groupgraph.bundle import build_context
from groupgraph.fixtures import courier_graph, four_group_graph
from groupgraph.queries import QueryContext


@pytest.fixture(scope="session")
def courier():
    return courier_graph()


@pytest.fixture(scope="session")
def four_groups():
    return four_group_graph()


@pytest.fixture(scope="session")
def courier_ctx(courier) -> QueryContext:
    return QueryContext.from_graph(courier)


@pytest.fixture(scope="session")
def four_groups_ctx(four_groups) -> QueryContext:
    return QueryContext.from_graph(four_groups)


@pytest.fixture(scope="session")
def four_groups_geo_ctx(four_groups) -> QueryContext:
    return build_context(four_groups, seed=7)
