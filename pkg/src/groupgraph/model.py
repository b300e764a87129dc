"""Clustered-graph data model: validation, serialization, and random generation.

A clustered graph is a simple undirected graph together with a total,
single-valued assignment of nodes to named groups.  Graphs are immutable
after construction and safe for concurrent readers.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .errors import GraphFormatError, UnknownIdError, ValidationError

Scalar = str | int | float | bool

GROUP_COLOR_PALETTE = (
    "red", "blue", "green", "orange", "purple", "teal",
    "brown", "magenta", "olive", "navy", "coral", "gold",
)
NODE_KINDS = ("circle", "square", "triangle")


def _check_attributes(owner: str, attributes: Mapping[str, Any]) -> dict[str, Scalar]:
    out: dict[str, Scalar] = {}
    for key, value in attributes.items():
        if not isinstance(key, str):
            raise ValidationError(f"{owner}: attribute name must be a string, got {key!r}")
        if not isinstance(value, (str, int, float, bool)):
            raise ValidationError(f"{owner}: non-scalar attribute {key!r}={value!r}")
        out[key] = value
    return out


@dataclass(frozen=True)
class Node:
    id: str
    label: str = ""
    attributes: Mapping[str, Scalar] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.id or not isinstance(self.id, str):
            raise ValidationError("empty node id")
        if not self.label:
            object.__setattr__(self, "label", self.id)
        object.__setattr__(self, "attributes", _check_attributes(f"node {self.id!r}", self.attributes))


@dataclass(frozen=True)
class Edge:
    """Undirected edge; endpoints are stored sorted."""

    endpoints: tuple[str, str]
    weight: float | None = None
    attributes: Mapping[str, Scalar] = field(default_factory=dict)

    def __post_init__(self) -> None:
        a, b = self.endpoints
        if not a or not b:
            raise ValidationError("empty edge endpoint id")
        object.__setattr__(self, "endpoints", (a, b) if a <= b else (b, a))
        if self.weight is not None:
            if not isinstance(self.weight, (int, float)) or isinstance(self.weight, bool):
                raise ValidationError(f"edge {a}-{b}: weight must be a number")
            if self.weight < 0:
                raise ValidationError(f"edge {a}-{b}: negative edge weight")
        name = f"edge {a}-{b}"
        object.__setattr__(self, "attributes", _check_attributes(name, self.attributes))

    @property
    def effective_weight(self) -> float:
        """Weight used by predicate queries; unweighted edges count as 1.0."""
        return 1.0 if self.weight is None else float(self.weight)


@dataclass(frozen=True)
class Group:
    id: str
    label: str = ""
    attributes: Mapping[str, Scalar] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.id or not isinstance(self.id, str):
            raise ValidationError("empty group id")
        if not self.label:
            object.__setattr__(self, "label", self.id)
        object.__setattr__(self, "attributes", _check_attributes(f"group {self.id!r}", self.attributes))


class ClusteredGraph:
    """Immutable simple graph plus a non-overlapping grouping of its nodes.

    Validation runs once at construction; the first violated invariant is
    reported.  Derived indexes (membership lists, adjacency, degrees, and
    intra/inter edge tallies) are precomputed so queries never mutate state.
    """

    def __init__(
        self,
        nodes: Iterable[Node],
        edges: Iterable[Edge],
        groups: Iterable[Group],
        membership: Mapping[str, str],
    ) -> None:
        self.nodes: dict[str, Node] = {}
        for node in nodes:
            if node.id in self.nodes:
                raise ValidationError(f"duplicate node id: {node.id!r}")
            self.nodes[node.id] = node

        self.groups: dict[str, Group] = {}
        for group in groups:
            if group.id in self.groups:
                raise ValidationError(f"duplicate group id: {group.id!r}")
            self.groups[group.id] = group

        self.edges: dict[tuple[str, str], Edge] = {}
        for edge in edges:
            a, b = edge.endpoints
            if a == b:
                raise ValidationError(f"self-loop at node {a!r}")
            for endpoint in (a, b):
                if endpoint not in self.nodes:
                    raise ValidationError(f"dangling endpoint: edge references unknown node {endpoint!r}")
            if edge.endpoints in self.edges:
                raise ValidationError(f"duplicate edge {a}-{b}")
            self.edges[edge.endpoints] = edge

        self.membership: dict[str, str] = {}
        for node_id, group_id in membership.items():
            if node_id not in self.nodes:
                raise ValidationError(f"membership entry for unknown node {node_id!r}")
            if group_id not in self.groups:
                raise ValidationError(f"node {node_id!r} assigned to unknown group {group_id!r}")
            self.membership[node_id] = group_id
        for node_id in self.nodes:
            if node_id not in self.membership:
                raise ValidationError(f"node without group: {node_id!r}")

        members: dict[str, list[str]] = {gid: [] for gid in self.groups}
        for node_id, group_id in self.membership.items():
            members[group_id].append(node_id)
        for gid, node_ids in members.items():
            if not node_ids:
                raise ValidationError(f"empty group: {gid!r}")
        self._members = {gid: tuple(sorted(ids)) for gid, ids in members.items()}

        adjacency: dict[str, set[str]] = {nid: set() for nid in self.nodes}
        self._intra_counts = {gid: 0 for gid in self.groups}
        self._inter_counts: dict[tuple[str, str], int] = {}
        for (a, b) in self.edges:
            adjacency[a].add(b)
            adjacency[b].add(a)
            ga, gb = self.membership[a], self.membership[b]
            if ga == gb:
                self._intra_counts[ga] += 1
            else:
                pair = (ga, gb) if ga <= gb else (gb, ga)
                self._inter_counts[pair] = self._inter_counts.get(pair, 0) + 1
        self._adjacency = {nid: tuple(sorted(neigh)) for nid, neigh in adjacency.items()}

        assert sum(len(ids) for ids in self._members.values()) == len(self.nodes)
        assert sum(self._intra_counts.values()) + sum(self._inter_counts.values()) == len(self.edges)

    # -- basic accessors ---------------------------------------------------

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.nodes))

    @property
    def group_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.groups))

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def group_count(self) -> int:
        return len(self.groups)

    def members(self, group_id: str) -> tuple[str, ...]:
        if group_id not in self.groups:
            raise UnknownIdError(f"unknown group {group_id!r}")
        return self._members[group_id]

    def group_of(self, node_id: str) -> str:
        if node_id not in self.nodes:
            raise UnknownIdError(f"unknown node {node_id!r}")
        return self.membership[node_id]

    def neighbors_of(self, node_id: str) -> tuple[str, ...]:
        if node_id not in self.nodes:
            raise UnknownIdError(f"unknown node {node_id!r}")
        return self._adjacency[node_id]

    def degree(self, node_id: str) -> int:
        return len(self.neighbors_of(node_id))

    def has_edge(self, a: str, b: str) -> bool:
        pair = (a, b) if a <= b else (b, a)
        return pair in self.edges

    def edge_between(self, a: str, b: str) -> Edge:
        pair = (a, b) if a <= b else (b, a)
        if pair not in self.edges:
            raise UnknownIdError(f"unknown edge {a}-{b}")
        return self.edges[pair]

    def intra_edge_count(self, group_id: str) -> int:
        if group_id not in self.groups:
            raise UnknownIdError(f"unknown group {group_id!r}")
        return self._intra_counts[group_id]

    def inter_group_edge_counts(self) -> dict[tuple[str, str], int]:
        """Number of node-level edges joining each unordered group pair."""
        return dict(self._inter_counts)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        nodes = []
        for nid in sorted(self.nodes):
            node = self.nodes[nid]
            nodes.append({"id": node.id, "label": node.label, "attributes": dict(node.attributes)})
        edges = []
        for key in sorted(self.edges):
            edge = self.edges[key]
            entry: dict[str, Any] = {"source": key[0], "target": key[1]}
            if edge.weight is not None:
                entry["weight"] = edge.weight
            if edge.attributes:
                entry["attributes"] = dict(edge.attributes)
            edges.append(entry)
        groups = []
        for gid in sorted(self.groups):
            group = self.groups[gid]
            groups.append({"id": group.id, "label": group.label, "attributes": dict(group.attributes)})
        membership = {nid: self.membership[nid] for nid in sorted(self.membership)}
        return {"nodes": nodes, "edges": edges, "groups": groups, "membership": membership}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClusteredGraph):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        return (
            f"ClusteredGraph(nodes={self.node_count}, edges={self.edge_count}, "
            f"groups={self.group_count})"
        )


def canonical_json(obj: Any) -> str:
    """Deterministic compact JSON used for files, hashing, and byte comparisons."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def clustered_graph_from_dict(document: Mapping[str, Any]) -> ClusteredGraph:
    if not isinstance(document, Mapping):
        raise GraphFormatError("graph document must be an object")
    for key in ("nodes", "groups", "membership"):
        if key not in document:
            raise GraphFormatError(f"graph document missing key {key!r}")
    raw_nodes = document["nodes"]
    raw_edges = document.get("edges", [])
    raw_groups = document["groups"]
    raw_membership = document["membership"]
    if not isinstance(raw_nodes, list) or not isinstance(raw_edges, list) or not isinstance(raw_groups, list):
        raise GraphFormatError("'nodes', 'edges', and 'groups' must be arrays")
    if not isinstance(raw_membership, Mapping):
        raise GraphFormatError("'membership' must be an object mapping node id to group id")

    def _entry(raw: Any, what: str) -> Mapping[str, Any]:
        if not isinstance(raw, Mapping):
            raise GraphFormatError(f"each {what} must be an object, got {raw!r}")
        return raw

    nodes = []
    for raw in raw_nodes:
        entry = _entry(raw, "node")
        if "id" not in entry:
            raise GraphFormatError(f"node missing 'id': {dict(entry)!r}")
        nodes.append(Node(id=entry["id"], label=entry.get("label", ""), attributes=entry.get("attributes", {})))
    edges = []
    for raw in raw_edges:
        entry = _entry(raw, "edge")
        if "source" not in entry or "target" not in entry:
            raise GraphFormatError(f"edge missing 'source'/'target': {dict(entry)!r}")
        edges.append(
            Edge(
                endpoints=(entry["source"], entry["target"]),
                weight=entry.get("weight"),
                attributes=entry.get("attributes", {}),
            )
        )
    groups = []
    for raw in raw_groups:
        entry = _entry(raw, "group")
        if "id" not in entry:
            raise GraphFormatError(f"group missing 'id': {dict(entry)!r}")
        groups.append(Group(id=entry["id"], label=entry.get("label", ""), attributes=entry.get("attributes", {})))
    return ClusteredGraph(nodes=nodes, edges=edges, groups=groups, membership=dict(raw_membership))


def load_clustered_graph(document: str) -> ClusteredGraph:
    """Parse and validate a graph file (UTF-8 JSON)."""
    try:
        parsed = json.loads(document)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"not valid JSON: {exc}") from exc
    return clustered_graph_from_dict(parsed)


def serialize_clustered_graph(graph: ClusteredGraph) -> str:
    return canonical_json(graph.to_dict())


def count_groups(graph: ClusteredGraph) -> int:
    return graph.group_count


def generate_planted_partition(
    k: int,
    sizes: list[int],
    p_in: float,
    p_out: float,
    seed: int,
    *,
    decorate: bool = True,
) -> ClusteredGraph:
    """Sample a planted-partition graph; identical arguments yield identical graphs.

    Every intra-group node pair receives an edge with probability ``p_in`` and
    every inter-group pair with probability ``p_out``, drawn in a fixed pair
    order from one seeded generator.  With ``decorate`` (the default) groups
    get distinct colors, nodes a seeded "kind" attribute, and edges a seeded
    integer weight, so attribute- and weight-predicate tasks are well posed on
    generated stimuli; topology is unaffected.
    """
    if k < 1:
        raise ValidationError(f"invalid group count: {k}")
    if len(sizes) != k or any((not isinstance(s, int)) or s < 1 for s in sizes):
        raise ValidationError(f"invalid size list: {sizes!r} (need {k} sizes, each >= 1)")
    if not (0.0 <= p_out <= p_in <= 1.0):
        raise ValidationError(f"invalid probability: need 0 <= p_out <= p_in <= 1, got p_in={p_in}, p_out={p_out}")

    rng = random.Random(seed)
    total = sum(sizes)
    gwidth = len(str(k))
    nwidth = len(str(total))
    group_ids = [f"G{index + 1:0{gwidth}d}" for index in range(k)]
    groups = []
    for index, gid in enumerate(group_ids):
        attributes = {"color": GROUP_COLOR_PALETTE[index % len(GROUP_COLOR_PALETTE)]} if decorate else {}
        groups.append(Group(id=gid, attributes=attributes))

    node_ids: list[str] = []
    membership: dict[str, str] = {}
    for gindex, size in enumerate(sizes):
        for _ in range(size):
            nid = f"v{len(node_ids) + 1:0{nwidth}d}"
            node_ids.append(nid)
            membership[nid] = group_ids[gindex]
    nodes = []
    for nid in node_ids:
        attributes = {"kind": rng.choice(NODE_KINDS)} if decorate else {}
        nodes.append(Node(id=nid, attributes=attributes))

    edges = []
    for i in range(total):
        for j in range(i + 1, total):
            same = membership[node_ids[i]] == membership[node_ids[j]]
            if rng.random() < (p_in if same else p_out):
                weight = float(1 + rng.randrange(9)) if decorate else None
                edges.append(Edge(endpoints=(node_ids[i], node_ids[j]), weight=weight))

    return ClusteredGraph(nodes=nodes, edges=edges, groups=groups, membership=membership)
