"""Randomized cross-checks of query operations against brute-force oracles.

The full 100-seed sweep lives in the acceptance suite; these runs use a
smaller sample for quick feedback during development.
"""

from __future__ import annotations

import random

import pytest

from groupgraph import queries
from groupgraph.model import generate_planted_partition
from groupgraph.queries import Metric, QueryContext

import oracles


def random_stimulus(seed: int):
    rng = random.Random(seed * 977 + 13)
    k = rng.randint(2, 6)
    sizes = [rng.randint(2, 7) for _ in range(k)]
    while sum(sizes) > 40:
        sizes[sizes.index(max(sizes))] -= 1
    p_in = rng.uniform(0.5, 0.95)
    p_out = rng.uniform(0.0, min(0.35, p_in))
    return generate_planted_partition(k, sizes, p_in=p_in, p_out=p_out, seed=seed)


SEEDS = range(1, 26)


@pytest.mark.parametrize("seed", SEEDS)
def test_neighbors_match_oracle(seed):
    graph = random_stimulus(seed)
    ctx = QueryContext.from_graph(graph)
    adjacency = oracles.group_adjacency(graph)
    for gid in graph.group_ids:
        assert queries.neighbors(ctx, gid) == adjacency[gid]
        assert queries.groups_at_distance(ctx, gid, 1) == adjacency[gid]


@pytest.mark.parametrize("seed", SEEDS)
def test_accessible_matches_oracle_and_is_symmetric(seed):
    graph = random_stimulus(seed)
    ctx = QueryContext.from_graph(graph)
    for gid in graph.group_ids:
        assert queries.accessible(ctx, gid) == oracles.reachable_groups(graph, gid)
    for a in graph.group_ids:
        for b in graph.group_ids:
            if a != b:
                assert (b in queries.accessible(ctx, a)) == (a in queries.accessible(ctx, b))


@pytest.mark.parametrize("seed", SEEDS)
def test_distance_layers_match_oracle(seed):
    graph = random_stimulus(seed)
    ctx = QueryContext.from_graph(graph)
    for gid in graph.group_ids:
        union = set()
        for distance in range(1, graph.group_count + 1):
            layer = queries.groups_at_distance(ctx, gid, distance)
            assert layer == oracles.groups_at_exact_distance(graph, gid, distance)
            union |= layer
        assert union == queries.accessible(ctx, gid)


@pytest.mark.parametrize("seed", SEEDS)
def test_shortest_path_matches_enumeration(seed):
    graph = random_stimulus(seed)
    ctx = QueryContext.from_graph(graph)
    for a in graph.group_ids:
        for b in graph.group_ids:
            got = queries.shortest_group_path(ctx, a, b)
            expected = oracles.shortest_group_path(graph, a, b)
            assert got == expected


@pytest.mark.parametrize("seed", range(1, 6))
def test_shortest_path_on_eight_groups(seed):
    graph = generate_planted_partition(8, [2] * 8, p_in=0.9, p_out=0.12, seed=seed)
    ctx = QueryContext.from_graph(graph)
    for a in graph.group_ids:
        for b in graph.group_ids:
            assert queries.shortest_group_path(ctx, a, b) == oracles.shortest_group_path(graph, a, b)


@pytest.mark.parametrize("seed", SEEDS)
def test_articulation_matches_removal_oracle(seed):
    graph = random_stimulus(seed)
    ctx = QueryContext.from_graph(graph)
    assert queries.articulation_groups(ctx) == oracles.articulation_by_removal(graph)


@pytest.mark.parametrize("seed", SEEDS)
def test_extremal_matches_scan(seed):
    graph = random_stimulus(seed)
    ctx = QueryContext.from_graph(graph)
    for kind in ("node-count", "intra-link-count", "neighbor-count", "density",
                 "max-node-degree", "min-node-degree"):
        for direction in ("max", "min"):
            result = queries.extremal_groups(ctx, Metric(kind), direction)
            scan = oracles.extremal_by_scan(graph, kind, direction)
            assert set(result.groups) <= scan
            best = result.value_by_group[result.groups[0]]
            for gid, value in result.value_by_group.items():
                assert (value <= best) if direction == "max" else (value >= best)


@pytest.mark.parametrize("seed", SEEDS)
def test_adjacency_consistency(seed):
    graph = random_stimulus(seed)
    ctx = QueryContext.from_graph(graph)
    for a in graph.group_ids:
        for b in graph.group_ids:
            if a == b:
                continue
            adjacent = queries.are_adjacent(ctx, a, b)
            assert adjacent == (b in queries.neighbors(ctx, a))
            assert adjacent == (a in queries.neighbors(ctx, b))


@pytest.mark.parametrize("seed", range(1, 16))
def test_min_cut_against_flow_witness(seed):
    graph = random_stimulus(seed)
    ctx = QueryContext.from_graph(graph)
    rng = random.Random(seed)
    pairs = [tuple(rng.sample(list(graph.group_ids), 2)) for _ in range(3)]
    for a, b in pairs:
        value, witness = queries.min_intergroup_cut_witness(ctx, a, b)
        assert len(witness) == value
        assert oracles.disconnects_groups(graph, a, b, witness)
        # no witness edge is redundant: value is genuinely minimal vs. subsets
        if value <= 3 and graph.edge_count <= 12:
            assert value == oracles.min_cut_by_subsets(graph, a, b, max_size=3)


def _small_graphs():
    out = []
    for seed in range(1, 30):
        rng = random.Random(seed * 31)
        k = rng.randint(2, 4)
        sizes = [rng.randint(1, 3) for _ in range(k)]
        while sum(sizes) > 10:
            sizes[sizes.index(max(sizes))] = max(1, sizes[sizes.index(max(sizes))] - 1)
        graph = generate_planted_partition(k, sizes, p_in=0.8, p_out=rng.uniform(0.1, 0.5), seed=seed)
        if graph.node_count <= 10:
            out.append(graph)
    return out


def test_min_label_path_matches_enumeration_on_small_graphs():
    checked = 0
    for graph in _small_graphs():
        ctx = QueryContext.from_graph(graph)
        for a in graph.node_ids:
            for b in graph.node_ids:
                if a >= b or graph.membership[a] == graph.membership[b]:
                    continue
                expected = oracles.min_label_path_by_enumeration(graph, a, b)
                got = queries.min_distinct_groups_path(ctx, a, b)
                if expected is None:
                    assert got is None
                else:
                    assert got is not None and got.exact
                    assert got.count == expected
                    checked += 1
    assert checked > 50


def test_bridging_pairs_verified_on_random_graphs():
    for seed in range(1, 16):
        graph = random_stimulus(seed)
        ctx = QueryContext.from_graph(graph)
        meta_pairs = set(graph.inter_group_edge_counts())
        bridging = queries.bridging_group_pairs(ctx)
        assert bridging <= meta_pairs
        base = oracles.node_component_count(graph)
        for pair in meta_pairs:
            removed = {
                key
                for key in graph.edges
                if tuple(sorted((graph.membership[key[0]], graph.membership[key[1]]))) == pair
            }
            increased = oracles.node_component_count(graph, removed) > base
            assert increased == (pair in bridging)
