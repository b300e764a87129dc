"""Group-level query operations over a clustered graph and its metagraph.

Every operation is a pure function over an immutable :class:`QueryContext`.
Group-only operations (neighbors, reachability, paths, articulation) read
the metagraph in the context, which may be either variant; operations whose
semantics are inherently about node-level links (bridging pairs, minimum
inter-group cuts, fewest-groups paths) recompute group adjacency from the
graph itself so a contact-based context cannot skew them.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .errors import (
    MissingGeometryError,
    UndefinedMetricError,
    UnknownIdError,
    ValidationError,
)
from .layout import LayoutGeometry, RegionRaster, link_length, shared_boundary_length
from .layout import group_area as raster_group_area
from .metagraph import Metagraph, build_link_metagraph
from .model import ClusteredGraph, Edge

DEFAULT_EXACT_GROUP_LIMIT = 16

METRIC_KINDS = (
    "neighbor-count",
    "area",
    "node-count",
    "intra-link-count",
    "density",
    "max-node-degree",
    "min-node-degree",
    "shared-boundary-with",
)


@dataclass(frozen=True)
class Metric:
    """A per-group measurement; ``reference`` is required for shared-boundary-with."""

    kind: str
    reference: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in METRIC_KINDS:
            raise ValidationError(f"unknown metric kind {self.kind!r}")
        if self.kind == "shared-boundary-with" and not self.reference:
            raise ValidationError("shared-boundary-with requires a reference group")
        if self.kind != "shared-boundary-with" and self.reference is not None:
            raise ValidationError(f"metric {self.kind!r} takes no reference group")


@dataclass(frozen=True)
class QueryContext:
    """Everything a query may need; geometry is optional and checked on use."""

    graph: ClusteredGraph
    meta: Metagraph
    layout: LayoutGeometry | None = None
    raster: RegionRaster | None = None

    @classmethod
    def from_graph(
        cls,
        graph: ClusteredGraph,
        meta: Metagraph | None = None,
        layout: LayoutGeometry | None = None,
        raster: RegionRaster | None = None,
    ) -> "QueryContext":
        return cls(graph=graph, meta=meta or build_link_metagraph(graph), layout=layout, raster=raster)

    def require_group(self, group_id: str) -> None:
        if group_id not in self.graph.groups:
            raise UnknownIdError(f"unknown group {group_id!r}")

    def require_node(self, node_id: str) -> None:
        if node_id not in self.graph.nodes:
            raise UnknownIdError(f"unknown node {node_id!r}")

    def require_raster(self) -> RegionRaster:
        if self.raster is None:
            raise MissingGeometryError("geometry required: no region raster in context")
        return self.raster

    def require_layout(self) -> LayoutGeometry:
        if self.layout is None:
            raise MissingGeometryError("geometry required: no layout in context")
        return self.layout


# -- group-only operations -------------------------------------------------


def count_groups(ctx: QueryContext) -> int:
    return ctx.graph.group_count


def neighbors(ctx: QueryContext, group_id: str) -> set[str]:
    ctx.require_group(group_id)
    return set(ctx.meta.neighbors(group_id))


def _bfs_levels(meta: Metagraph, start: str) -> dict[str, int]:
    levels = {start: 0}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for nxt in meta.neighbors(current):
            if nxt not in levels:
                levels[nxt] = levels[current] + 1
                queue.append(nxt)
    return levels


def accessible(ctx: QueryContext, group_id: str) -> set[str]:
    """All groups reachable from ``group_id`` in the metagraph, excluding itself."""
    ctx.require_group(group_id)
    levels = _bfs_levels(ctx.meta, group_id)
    return {gid for gid in levels if gid != group_id}


def groups_at_distance(ctx: QueryContext, group_id: str, distance: int) -> set[str]:
    """Groups at metagraph shortest-path distance exactly ``distance``."""
    ctx.require_group(group_id)
    if distance < 1:
        raise ValidationError(f"distance must be >= 1, got {distance}")
    levels = _bfs_levels(ctx.meta, group_id)
    return {gid for gid, level in levels.items() if level == distance}


def common_neighbors(ctx: QueryContext, group_a: str, group_b: str) -> set[str]:
    ctx.require_group(group_a)
    ctx.require_group(group_b)
    if group_a == group_b:
        raise ValidationError("common neighbors requires two distinct groups")
    return neighbors(ctx, group_a) & neighbors(ctx, group_b)


def are_adjacent(ctx: QueryContext, group_a: str, group_b: str) -> bool:
    ctx.require_group(group_a)
    ctx.require_group(group_b)
    if group_a == group_b:
        raise ValidationError("adjacency requires two distinct groups")
    return ctx.meta.has_edge(group_a, group_b)


def shortest_group_path(ctx: QueryContext, group_a: str, group_b: str) -> list[str] | None:
    """Minimum-hop metanode path, lexicographically smallest among ties.

    Returns None when the groups are disconnected; ``[group_a]`` when the
    arguments coincide.
    """
    ctx.require_group(group_a)
    ctx.require_group(group_b)
    if group_a == group_b:
        return [group_a]
    levels = _bfs_levels(ctx.meta, group_b)
    if group_a not in levels:
        return None
    path = [group_a]
    current = group_a
    while current != group_b:
        step = min(g for g in ctx.meta.neighbors(current) if levels.get(g, -1) == levels[current] - 1)
        path.append(step)
        current = step
    return path


def all_shortest_group_paths(ctx: QueryContext, group_a: str, group_b: str, cap: int = 512) -> list[list[str]]:
    """Every minimum-hop path (up to ``cap``), for tie-tolerant scoring."""
    ctx.require_group(group_a)
    ctx.require_group(group_b)
    if group_a == group_b:
        return [[group_a]]
    levels = _bfs_levels(ctx.meta, group_b)
    if group_a not in levels:
        return []
    paths: list[list[str]] = []

    def _extend(prefix: list[str]) -> None:
        if len(paths) >= cap:
            return
        current = prefix[-1]
        if current == group_b:
            paths.append(list(prefix))
            return
        for nxt in sorted(ctx.meta.neighbors(current)):
            if levels.get(nxt, -1) == levels[current] - 1:
                prefix.append(nxt)
                _extend(prefix)
                prefix.pop()

    _extend([group_a])
    return paths


def find_groups(ctx: QueryContext, predicate: Callable[[Mapping[str, object]], bool]) -> set[str]:
    """Groups whose attribute map satisfies the predicate."""
    return {gid for gid, group in ctx.graph.groups.items() if predicate(group.attributes)}


def articulation_groups(ctx: QueryContext) -> set[str]:
    """Metanodes whose removal increases the metagraph's component count."""
    adjacency = {gid: sorted(ctx.meta.neighbors(gid)) for gid in ctx.meta.metanodes}
    order = sorted(adjacency)
    disc: dict[str, int] = {}
    low: dict[str, int] = {}
    result: set[str] = set()
    counter = itertools.count()
    for root in order:
        if root in disc:
            continue
        root_children = 0
        stack: list[tuple[str, str | None, Iterable[str]]] = [(root, None, iter(adjacency[root]))]
        disc[root] = low[root] = next(counter)
        while stack:
            current, parent, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt not in disc:
                    disc[nxt] = low[nxt] = next(counter)
                    if current == root:
                        root_children += 1
                    stack.append((nxt, current, iter(adjacency[nxt])))
                    advanced = True
                    break
                if nxt != parent:
                    low[current] = min(low[current], disc[nxt])
            if not advanced:
                stack.pop()
                if stack:
                    above = stack[-1][0]
                    low[above] = min(low[above], low[current])
                    if above != root and low[current] >= disc[above]:
                        result.add(above)
        if root_children >= 2:
            result.add(root)
    return result


# -- metric machinery --------------------------------------------------------


def group_metric(ctx: QueryContext, group_id: str, metric: Metric) -> float:
    """Value of ``metric`` for one group; raises when the metric is undefined."""
    ctx.require_group(group_id)
    graph = ctx.graph
    kind = metric.kind
    if kind == "neighbor-count":
        return float(len(neighbors(ctx, group_id)))
    if kind == "node-count":
        return float(len(graph.members(group_id)))
    if kind == "intra-link-count":
        return float(graph.intra_edge_count(group_id))
    if kind == "density":
        size = len(graph.members(group_id))
        if size < 2:
            raise UndefinedMetricError(f"undefined metric: density of singleton group {group_id!r}")
        return graph.intra_edge_count(group_id) / (size * (size - 1) / 2)
    if kind == "max-node-degree":
        return float(max(graph.degree(nid) for nid in graph.members(group_id)))
    if kind == "min-node-degree":
        return float(min(graph.degree(nid) for nid in graph.members(group_id)))
    if kind == "area":
        return raster_group_area(ctx.require_raster(), group_id)
    if kind == "shared-boundary-with":
        reference = metric.reference or ""
        ctx.require_group(reference)
        if group_id == reference:
            raise UndefinedMetricError("undefined metric: boundary of a group with itself")
        return shared_boundary_length(ctx.require_raster(), group_id, reference)
    raise ValidationError(f"unknown metric kind {kind!r}")


def eligible_groups(ctx: QueryContext, metric: Metric) -> list[str]:
    """Groups for which ``metric`` is defined, in id order.

    Singleton groups are ineligible for density; for shared-boundary-with
    only groups actually touching the reference qualify (a zero boundary
    means no contact, not a shortest boundary).
    """
    graph = ctx.graph
    out = []
    for gid in graph.group_ids:
        if metric.kind == "density" and len(graph.members(gid)) < 2:
            continue
        if metric.kind == "shared-boundary-with":
            if gid == metric.reference:
                continue
            if shared_boundary_length(ctx.require_raster(), gid, metric.reference or "") <= 0:
                continue
        out.append(gid)
    return out


@dataclass(frozen=True)
class ExtremalResult:
    """Top-k groups under a metric; ``groups`` is tie-broken by group id.

    ``tie`` is set when the cut at position k splits groups of equal value;
    ``tied_groups`` then lists every group sharing the boundary value, so a
    study designer can reject ambiguous stimuli.  ``value_by_group`` covers
    all eligible groups to support tie-tolerant answer scoring.
    """

    groups: tuple[str, ...]
    values: tuple[float, ...]
    tie: bool
    tied_groups: tuple[str, ...]
    value_by_group: dict[str, float] = field(repr=False)


def extremal_groups(ctx: QueryContext, metric: Metric, direction: str, k: int = 1) -> ExtremalResult:
    if direction not in ("max", "min"):
        raise ValidationError(f"direction must be 'max' or 'min', got {direction!r}")
    if k < 1:
        raise ValidationError("k must be >= 1")
    eligible = eligible_groups(ctx, metric)
    if not eligible:
        raise UndefinedMetricError(f"no eligible groups for metric {metric.kind!r}")
    if k > len(eligible):
        raise ValidationError(f"k={k} exceeds the {len(eligible)} eligible groups")
    value_of = {gid: group_metric(ctx, gid, metric) for gid in eligible}
    reverse = direction == "max"
    ranked = sorted(eligible, key=lambda gid: (-value_of[gid] if reverse else value_of[gid], gid))
    selected = ranked[:k]
    boundary_value = value_of[selected[-1]]
    tie = len(ranked) > k and value_of[ranked[k]] == boundary_value
    tied = tuple(gid for gid in ranked if value_of[gid] == boundary_value) if tie else ()
    return ExtremalResult(
        groups=tuple(selected),
        values=tuple(value_of[gid] for gid in selected),
        tie=tie,
        tied_groups=tied,
        value_by_group=value_of,
    )


# -- group+node operations ---------------------------------------------------


def group_of(ctx: QueryContext, node_id: str) -> str:
    ctx.require_node(node_id)
    return ctx.graph.membership[node_id]


def same_group(ctx: QueryContext, node_a: str, node_b: str) -> bool:
    ctx.require_node(node_a)
    ctx.require_node(node_b)
    return ctx.graph.membership[node_a] == ctx.graph.membership[node_b]


def groups_containing(ctx: QueryContext, predicate: Callable[[Mapping[str, object]], bool]) -> set[str]:
    """Groups owning at least one node whose attributes satisfy the predicate."""
    out = set()
    for nid, node in ctx.graph.nodes.items():
        if predicate(node.attributes):
            out.add(ctx.graph.membership[nid])
    return out


# -- group+link operations ----------------------------------------------------


@dataclass(frozen=True)
class EdgeInfo:
    """View of one edge handed to link predicates."""

    edge: Edge
    weight: float
    length: float | None


@dataclass(frozen=True)
class LinkLocation:
    edge: tuple[str, str]
    container: tuple[str, ...]  # one group id for intra edges, two for inter


def longest_link_location(ctx: QueryContext) -> LinkLocation:
    """The geometrically longest edge and the group(s) containing it."""
    layout = ctx.require_layout()
    if not ctx.graph.edges:
        raise ValidationError("graph has no edges")
    best_key: tuple[str, str] | None = None
    best_len = -1.0
    for key in sorted(ctx.graph.edges):
        length = link_length(layout, key)
        if length > best_len:
            best_len = length
            best_key = key
    assert best_key is not None
    ga = ctx.graph.membership[best_key[0]]
    gb = ctx.graph.membership[best_key[1]]
    container = (ga,) if ga == gb else tuple(sorted((ga, gb)))
    return LinkLocation(edge=best_key, container=container)


def groups_with_links(
    ctx: QueryContext,
    predicate: Callable[[EdgeInfo], bool],
    needs_length: bool = False,
) -> set[str]:
    """Groups containing (intra) or touching (inter) an edge matching the predicate."""
    layout = ctx.layout
    if needs_length and layout is None:
        raise MissingGeometryError("geometry required: link-length predicate without a layout")
    out: set[str] = set()
    for key, edge in ctx.graph.edges.items():
        info = EdgeInfo(
            edge=edge,
            weight=edge.effective_weight,
            length=link_length(layout, key) if layout is not None else None,
        )
        if predicate(info):
            out.add(ctx.graph.membership[key[0]])
            out.add(ctx.graph.membership[key[1]])
    return out


# -- group+network operations --------------------------------------------------


def _node_components(graph: ClusteredGraph, removed: set[tuple[str, str]] = frozenset()) -> int:
    seen: set[str] = set()
    components = 0
    for start in graph.node_ids:
        if start in seen:
            continue
        components += 1
        queue = deque([start])
        seen.add(start)
        while queue:
            current = queue.popleft()
            for nxt in graph.neighbors_of(current):
                key = (current, nxt) if current <= nxt else (nxt, current)
                if key in removed or nxt in seen:
                    continue
                seen.add(nxt)
                queue.append(nxt)
    return components


def bridging_group_pairs(ctx: QueryContext) -> set[tuple[str, str]]:
    """Linked group pairs whose inter-group edges, deleted together, disconnect the graph."""
    graph = ctx.graph
    base_components = _node_components(graph)
    out: set[tuple[str, str]] = set()
    edges_by_pair: dict[tuple[str, str], set[tuple[str, str]]] = {}
    for key in graph.edges:
        ga, gb = graph.membership[key[0]], graph.membership[key[1]]
        if ga == gb:
            continue
        pair = (ga, gb) if ga <= gb else (gb, ga)
        edges_by_pair.setdefault(pair, set()).add(key)
    for pair, edge_keys in edges_by_pair.items():
        if _node_components(graph, removed=edge_keys) > base_components:
            out.add(pair)
    return out


def _max_flow_unit(
    graph: ClusteredGraph, sources: Iterable[str], sinks: Iterable[str]
) -> tuple[int, set[tuple[str, str]]]:
    """Edmonds-Karp on the node graph with unit capacities and contracted terminals.

    Returns the flow value and a minimum-cut witness: the node-level edges
    crossing from the residual-reachable side of the super-source.
    """
    source_set = set(sources)
    sink_set = set(sinks)
    INF = 1 << 30
    capacity: dict[str, dict[str, int]] = {"__S__": {}, "__T__": {}}
    for nid in graph.node_ids:
        capacity[nid] = {}
    for (a, b) in graph.edges:
        capacity[a][b] = 1
        capacity[b][a] = 1
    for nid in sorted(source_set):
        capacity["__S__"][nid] = INF
        capacity[nid]["__S__"] = 0
    for nid in sorted(sink_set):
        capacity[nid]["__T__"] = INF
        capacity["__T__"][nid] = 0

    flow = 0
    while True:
        parent: dict[str, str] = {"__S__": "__S__"}
        queue = deque(["__S__"])
        while queue and "__T__" not in parent:
            current = queue.popleft()
            for nxt, cap in capacity[current].items():
                if cap > 0 and nxt not in parent:
                    parent[nxt] = current
                    queue.append(nxt)
        if "__T__" not in parent:
            break
        bottleneck = INF
        node = "__T__"
        while node != "__S__":
            prev = parent[node]
            bottleneck = min(bottleneck, capacity[prev][node])
            node = prev
        node = "__T__"
        while node != "__S__":
            prev = parent[node]
            capacity[prev][node] -= bottleneck
            capacity[node][prev] = capacity[node].get(prev, 0) + bottleneck
            node = prev
        flow += bottleneck

    reachable = {"__S__"}
    queue = deque(["__S__"])
    while queue:
        current = queue.popleft()
        for nxt, cap in capacity[current].items():
            if cap > 0 and nxt not in reachable:
                reachable.add(nxt)
                queue.append(nxt)
    witness = {
        key
        for key in graph.edges
        if (key[0] in reachable) != (key[1] in reachable)
    }
    return flow, witness


def min_intergroup_cut(ctx: QueryContext, group_a: str, group_b: str) -> int:
    """Fewest node-level edges whose deletion separates all of one group from the other."""
    return min_intergroup_cut_witness(ctx, group_a, group_b)[0]


def min_intergroup_cut_witness(
    ctx: QueryContext, group_a: str, group_b: str
) -> tuple[int, set[tuple[str, str]]]:
    ctx.require_group(group_a)
    ctx.require_group(group_b)
    if group_a == group_b:
        raise ValidationError("cut requires two distinct groups")
    value, witness = _max_flow_unit(ctx.graph, ctx.graph.members(group_a), ctx.graph.members(group_b))
    return value, witness


@dataclass(frozen=True)
class PathGroupCheck:
    path_exists: bool
    same_group: bool


def path_group_check(ctx: QueryContext, x: str, y: str, z: str) -> PathGroupCheck:
    """Does the two-hop path x-y-z exist, and do its endpoints share a group?"""
    for nid in (x, y, z):
        ctx.require_node(nid)
    if len({x, y, z}) != 3:
        raise ValidationError("path check requires three distinct nodes")
    exists = ctx.graph.has_edge(x, y) and ctx.graph.has_edge(y, z)
    return PathGroupCheck(path_exists=exists, same_group=same_group(ctx, x, z))


@dataclass(frozen=True)
class GroupsPathResult:
    """Fewest distinct groups on any path between two nodes.

    ``exact`` is False when the group count exceeded the exact-search limit;
    the count is then the metagraph lower bound (distance + 1), never passed
    off as exact.
    """

    count: int
    witness: tuple[str, ...] | None
    exact: bool


def _group_adjacency_from_graph(graph: ClusteredGraph) -> dict[str, set[str]]:
    adjacency: dict[str, set[str]] = {gid: set() for gid in graph.groups}
    for pair in graph.inter_group_edge_counts():
        adjacency[pair[0]].add(pair[1])
        adjacency[pair[1]].add(pair[0])
    return adjacency


def _node_path_within(graph: ClusteredGraph, start: str, goal: str, allowed_groups: set[str]) -> list[str] | None:
    if graph.membership[start] not in allowed_groups or graph.membership[goal] not in allowed_groups:
        return None
    parent: dict[str, str | None] = {start: None}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        if current == goal:
            path = [current]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])  # type: ignore[arg-type]
            return list(reversed(path))
        for nxt in graph.neighbors_of(current):
            if nxt in parent or graph.membership[nxt] not in allowed_groups:
                continue
            parent[nxt] = current
            queue.append(nxt)
    return None


def min_distinct_groups_path(
    ctx: QueryContext,
    node_a: str,
    node_b: str,
    exact_limit: int = DEFAULT_EXACT_GROUP_LIMIT,
) -> GroupsPathResult | None:
    """Minimum number of distinct groups touched by any path from a to b.

    Solved exactly by searching subsets of groups in increasing size (the
    induced-subgraph reachability formulation); above ``exact_limit`` groups
    only the metagraph lower bound is reported, flagged as a bound.  Returns
    None when no path exists at all.
    """
    ctx.require_node(node_a)
    ctx.require_node(node_b)
    graph = ctx.graph
    ga, gb = graph.membership[node_a], graph.membership[node_b]
    if ga == gb:
        raise ValidationError("nodes are in the same group; the task needs distinct groups")

    group_adjacency = _group_adjacency_from_graph(graph)
    levels = {ga: 0}
    queue = deque([ga])
    while queue:
        current = queue.popleft()
        for nxt in group_adjacency[current]:
            if nxt not in levels:
                levels[nxt] = levels[current] + 1
                queue.append(nxt)
    if gb not in levels:
        return None
    lower_bound = levels[gb] + 1

    if graph.group_count > exact_limit:
        return GroupsPathResult(count=lower_bound, witness=None, exact=False)

    others = [gid for gid in graph.group_ids if gid not in (ga, gb)]
    for size in range(lower_bound, graph.group_count + 1):
        for extra in itertools.combinations(others, size - 2):
            allowed = {ga, gb, *extra}
            path = _node_path_within(graph, node_a, node_b, allowed)
            if path is not None:
                touched = {graph.membership[nid] for nid in path}
                assert len(touched) == size
                return GroupsPathResult(count=size, witness=tuple(path), exact=True)
    return None
