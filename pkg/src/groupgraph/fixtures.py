"""Built-in demonstration graphs used by tests, docs, and the CLI examples."""

from __future__ import annotations

from .model import ClusteredGraph, Edge, Group, Node


def courier_graph() -> ClusteredGraph:
    """A small courier network: countries grouped by continent.

    Every route between the North-American and Asian groups passes through
    the European one, which makes the continent-level structure a path.
    """
    nodes = [Node(id=n) for n in ("US", "Canada", "UK", "Italy", "India", "China")]
    groups = [Group(id=g) for g in ("NorthAmerica", "Europe", "Asia")]
    membership = {
        "US": "NorthAmerica",
        "Canada": "NorthAmerica",
        "UK": "Europe",
        "Italy": "Europe",
        "India": "Asia",
        "China": "Asia",
    }
    edges = [
        Edge(endpoints=("US", "Canada")),
        Edge(endpoints=("US", "UK")),
        Edge(endpoints=("UK", "Italy")),
        Edge(endpoints=("Italy", "India")),
        Edge(endpoints=("India", "China")),
    ]
    return ClusteredGraph(nodes=nodes, edges=edges, groups=groups, membership=membership)


def four_group_graph(decorated: bool = False) -> ClusteredGraph:
    """Ten nodes in four groups (sizes 3/2/4/1), seven intra and four inter links.

    With ``decorated`` the groups get distinct colors, nodes a shape
    attribute, and edge b1-b2 a uniquely heavy weight, so attribute- and
    weight-based tasks are well posed without changing the topology.
    """
    membership = {
        "a1": "A", "a2": "A", "a3": "A",
        "b1": "B", "b2": "B",
        "c1": "C", "c2": "C", "c3": "C", "c4": "C",
        "d1": "D",
    }
    node_shapes = {
        "a1": "circle", "a2": "square", "a3": "circle",
        "b1": "triangle", "b2": "circle",
        "c1": "square", "c2": "circle", "c3": "triangle", "c4": "square",
        "d1": "triangle",
    }
    colors = {"A": "red", "B": "blue", "C": "green", "D": "orange"}
    nodes = [
        Node(id=nid, attributes={"kind": node_shapes[nid]} if decorated else {})
        for nid in membership
    ]
    groups = [
        Group(id=gid, attributes={"color": colors[gid]} if decorated else {})
        for gid in ("A", "B", "C", "D")
    ]
    edge_pairs = [
        ("a1", "a2"), ("a2", "a3"), ("a1", "a3"),
        ("b1", "b2"),
        ("c1", "c2"), ("c2", "c3"), ("c3", "c4"),
        ("a1", "b1"), ("a3", "c1"), ("b2", "c2"), ("c4", "d1"),
    ]
    edges = [
        Edge(
            endpoints=pair,
            weight=7.0 if decorated and pair == ("b1", "b2") else (1.0 if decorated else None),
        )
        for pair in edge_pairs
    ]
    return ClusteredGraph(nodes=nodes, edges=edges, groups=groups, membership=membership)
