"""Acceptance suite: one test per release criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict lines.
"""

from __future__ import annotations

import functools
import json
import random
import time
from collections import Counter

import pytest

from groupgraph import queries, tasks
from groupgraph.bundle import build_bundle, build_context, bundle_to_json, instance_for_scoring
from groupgraph.fixtures import courier_graph, four_group_graph
from groupgraph.layout import compute_layout, group_area, rasterize_regions, shared_boundary_length
from groupgraph.model import canonical_json, generate_planted_partition, serialize_clustered_graph
from groupgraph.queries import Metric, QueryContext
from groupgraph.service import StudyService, create_app

import oracles


def criterion(name):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"\nACCEPTANCE FAIL: {name}")
                raise
            print(f"\nACCEPTANCE PASS: {name}")

        return wrapper

    return decorate


def coverage_stimulus(seed: int):
    rng = random.Random(seed * 7919 + 3)
    k = 3 + seed % 3
    sizes = [rng.randint(2, 5) for _ in range(k)]
    p_out = (0.03, 0.08, 0.15)[seed % 3]
    return generate_planted_partition(k, sizes, p_in=0.85, p_out=p_out, seed=seed)


def oracle_stimulus(seed: int):
    """Random graphs with n <= 40 and at most 6 groups."""
    rng = random.Random(seed * 977 + 13)
    k = rng.randint(2, 6)
    sizes = [rng.randint(2, 7) for _ in range(k)]
    while sum(sizes) > 40:
        sizes[sizes.index(max(sizes))] -= 1
    p_in = rng.uniform(0.5, 0.95)
    p_out = rng.uniform(0.0, min(0.35, p_in))
    return generate_planted_partition(k, sizes, p_in=p_in, p_out=p_out, seed=seed)


def small_stimulus(seed: int):
    """Graphs with at most 10 nodes for exhaustive-enumeration oracles."""
    rng = random.Random(seed * 31)
    k = rng.randint(2, 4)
    sizes = [rng.randint(1, 3) for _ in range(k)]
    while sum(sizes) > 10:
        biggest = sizes.index(max(sizes))
        sizes[biggest] = max(1, sizes[biggest] - 1)
    return generate_planted_partition(k, sizes, p_in=0.8, p_out=rng.uniform(0.1, 0.5), seed=seed)


@criterion("taxonomy coverage: 29 templates (14/5/5/5) run end-to-end on 50 stimuli in < 60 s")
def test_taxonomy_coverage():
    started = time.monotonic()
    templates = tasks.list_templates()
    assert len(templates) == 29
    counts = Counter(t.category for t in templates)
    assert (counts["group-only"], counts["group-node"], counts["group-link"],
            counts["group-network"]) == (14, 5, 5, 5)

    executed: Counter = Counter()
    graphs = 0
    for seed in range(1, 51):
        graph = coverage_stimulus(seed)
        ctx = build_context(graph, seed=seed)
        graphs += 1
        for template in templates:
            if template.applicable(ctx):
                continue
            instance = tasks.instantiate(template.template_id, ctx, seed=seed)
            assert tasks.score(instance, instance.ground_truth).correct, template.template_id
            executed[template.template_id] += 1
    assert graphs >= 50
    missing = [t.template_id for t in templates if executed[t.template_id] == 0]
    assert not missing, f"templates never applicable on the suite: {missing}"
    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"took {elapsed:.1f}s"


@criterion("courier narrative: transit through Europe reproduced exactly")
def test_courier_narrative():
    ctx = QueryContext.from_graph(courier_graph())
    assert queries.shortest_group_path(ctx, "NorthAmerica", "Asia") == [
        "NorthAmerica", "Europe", "Asia",
    ]
    assert queries.are_adjacent(ctx, "NorthAmerica", "Asia") is False
    assert queries.articulation_groups(ctx) == {"Europe"}


@criterion("golden descriptors: adjacency and top-3-links rows byte-equal")
def test_golden_descriptors():
    adjacency = tasks.describe("GO-11", {"target_known": True, "location_known": False})
    assert adjacency.serialize() == (
        '{"how":"Select","what":{"inputs":"Groups X and Y","outputs":"Yes / No"},'
        '"why":"Discover + Locate + Identify"}'
    )
    lookup = tasks.describe("GO-11", {"target_known": True, "location_known": True})
    assert lookup.why_phrase() == "Discover + Look up + Identify"
    top_three = tasks.describe(
        "GL-2", {"target_known": False, "location_known": False}, parameters={"count": 3}
    )
    assert top_three.serialize() == (
        '{"how":"Derive + Select","what":{"inputs":"Entire map","outputs":"Three groups"},'
        '"why":"Discover + Explore + Summarize"}'
    )


@criterion("oracle equivalence: 6 operations match brute force on 100 graphs in < 120 s")
def test_oracle_equivalence_suite():
    started = time.monotonic()
    mismatches = 0
    for seed in range(1, 101):
        graph = oracle_stimulus(seed)
        ctx = QueryContext.from_graph(graph)
        adjacency = oracles.group_adjacency(graph)
        for gid in graph.group_ids:
            if queries.neighbors(ctx, gid) != adjacency[gid]:
                mismatches += 1
            if queries.accessible(ctx, gid) != oracles.reachable_groups(graph, gid):
                mismatches += 1
            for distance in range(1, graph.group_count + 1):
                if queries.groups_at_distance(ctx, gid, distance) != oracles.groups_at_exact_distance(
                    graph, gid, distance
                ):
                    mismatches += 1
        for a in graph.group_ids:
            for b in graph.group_ids:
                if queries.shortest_group_path(ctx, a, b) != oracles.shortest_group_path(graph, a, b):
                    mismatches += 1
        if queries.articulation_groups(ctx) != oracles.articulation_by_removal(graph):
            mismatches += 1
        for kind in ("node-count", "intra-link-count", "neighbor-count", "density",
                     "max-node-degree", "min-node-degree"):
            for direction in ("max", "min"):
                result = queries.extremal_groups(ctx, Metric(kind), direction)
                if not set(result.groups) <= oracles.extremal_by_scan(graph, kind, direction):
                    mismatches += 1
    assert mismatches == 0
    elapsed = time.monotonic() - started
    assert elapsed < 120.0, f"took {elapsed:.1f}s"


@criterion("cut correctness: flow equals subset enumeration and witnesses verify")
def test_cut_correctness():
    # exhaustive comparison on small graphs (<= 12 edges, cut <= 4)
    small_graphs = [courier_graph(), four_group_graph()] + [small_stimulus(s) for s in range(1, 30)]
    compared = 0
    for graph in small_graphs:
        if graph.edge_count > 12:
            continue
        ctx = QueryContext.from_graph(graph)
        for i, a in enumerate(graph.group_ids):
            for b in graph.group_ids[i + 1:]:
                flow = queries.min_intergroup_cut(ctx, a, b)
                if flow <= 4:
                    assert flow == oracles.min_cut_by_subsets(graph, a, b, max_size=4)
                    compared += 1
    assert compared >= 40

    # witness verification on the 100 random graphs
    for seed in range(1, 101):
        graph = oracle_stimulus(seed)
        ctx = QueryContext.from_graph(graph)
        rng = random.Random(seed)
        for _ in range(2):
            a, b = rng.sample(list(graph.group_ids), 2)
            value, witness = queries.min_intergroup_cut_witness(ctx, a, b)
            assert len(witness) == value
            assert oracles.disconnects_groups(graph, a, b, witness)


@criterion("minimum-label path: exact on <= 10 nodes, bounded below, flag correct")
def test_minimum_label_path():
    checked = 0
    for seed in range(1, 40):
        graph = small_stimulus(seed)
        if graph.node_count > 10:
            continue
        ctx = QueryContext.from_graph(graph)
        adjacency = oracles.group_adjacency(graph)
        for a in graph.node_ids:
            for b in graph.node_ids:
                if a >= b or graph.membership[a] == graph.membership[b]:
                    continue
                expected = oracles.min_label_path_by_enumeration(graph, a, b)
                got = queries.min_distinct_groups_path(ctx, a, b)
                if expected is None:
                    assert got is None
                    continue
                assert got is not None and got.exact
                assert got.count == expected
                levels = oracles.bfs_levels(adjacency, graph.membership[a])
                assert got.count >= levels[graph.membership[b]] + 1
                checked += 1
    assert checked >= 100

    # the flag flips to a bound above the exact-search limit
    graph = four_group_graph()
    ctx = QueryContext.from_graph(graph)
    bounded = queries.min_distinct_groups_path(ctx, "a1", "d1", exact_limit=2)
    assert bounded is not None and not bounded.exact and bounded.witness is None
    assert bounded.count == 3  # metagraph distance + 1
    exact = queries.min_distinct_groups_path(ctx, "a1", "d1", exact_limit=16)
    assert exact is not None and exact.exact and exact.count == 3


@criterion("determinism: generate, layout, rasterize, instantiate byte-identical")
def test_determinism():
    first = generate_planted_partition(4, [3, 2, 4, 1], p_in=0.9, p_out=0.05, seed=7)
    second = generate_planted_partition(4, [3, 2, 4, 1], p_in=0.9, p_out=0.05, seed=7)
    assert serialize_clustered_graph(first) == serialize_clustered_graph(second)

    layout_a = compute_layout(first, seed=7)
    layout_b = compute_layout(second, seed=7)
    assert canonical_json(layout_a.to_dict()) == canonical_json(layout_b.to_dict())

    raster_a = rasterize_regions(layout_a, first)
    raster_b = rasterize_regions(layout_b, second)
    assert canonical_json(raster_a.regions_dict()) == canonical_json(raster_b.regions_dict())

    bundle_a = build_bundle(four_group_graph(decorated=True), "all", seed=11, study_id="d")
    bundle_b = build_bundle(four_group_graph(decorated=True), "all", seed=11, study_id="d")
    assert bundle_to_json(bundle_a) == bundle_to_json(bundle_b)


@criterion("geometry convergence: disc area within 15% and symmetric boundaries")
def test_geometry_convergence():
    import math

    from groupgraph.model import ClusteredGraph, Group, Node

    single = ClusteredGraph([Node(id="a")], [], [Group(id="A")], {"a": "A"})
    layout = compute_layout(single, seed=3)
    reach = 40.0
    raster = rasterize_regions(layout, single, cell_size=reach / 8, reach=reach)
    area = group_area(raster, "A")
    assert abs(area - math.pi * reach * reach) / (math.pi * reach * reach) < 0.15

    for seed in (7, 8, 9):
        graph = coverage_stimulus(seed)
        gr_layout = compute_layout(graph, seed=seed)
        gr_raster = rasterize_regions(gr_layout, graph)
        for i, a in enumerate(graph.group_ids):
            for b in graph.group_ids[i + 1:]:
                assert shared_boundary_length(gr_raster, a, b) == shared_boundary_length(
                    gr_raster, b, a
                )


@criterion("service integrity: 29-instance study rescored with 0 divergences, replay identical")
def test_service_integrity(tmp_path):
    from fastapi.testclient import TestClient

    bundle = build_bundle(
        four_group_graph(decorated=True), "all", seed=7, study_id="integrity-study"
    )
    assert len(bundle["instances"]) == 29
    key = bundle["answer_key"]

    storage = tmp_path / "studies"
    service = StudyService(storage)
    client = TestClient(create_app(service))
    assert client.post("/studies", json=json.loads(bundle_to_json(bundle))).status_code == 200

    session_id = client.post(
        "/studies/integrity-study/sessions", json={"participant_id": "scripted"}
    ).json()["session_id"]

    rng = random.Random(99)
    answered = 0
    while True:
        task = client.get(f"/sessions/{session_id}/next").json()
        if task.get("done"):
            break
        instance = task["instance"]
        assert "ground_truth" not in canonical_json(task)
        if rng.random() < 0.6:
            answer = key[instance["instance_id"]]["ground_truth"]
        else:  # deliberately wrong but kind-valid answers
            answer = {
                "boolean": True,
                "integer": 424242,
                "group-id": "ZZZ",
                "node-id": "zz",
                "group-id-set": ["ZZZ"],
                "group-id-list": ["ZZZ"],
                "pair": ["ZZZ"],
            }[instance["answer_kind"]]
        response = client.post(
            f"/sessions/{session_id}/answer",
            json={"instance_id": instance["instance_id"], "answer": answer},
        )
        assert response.status_code == 200
        answered += 1
    assert answered == 29

    export = client.get("/studies/integrity-study/results").json()
    assert len(export["records"]) == 29
    divergences = 0
    for record in export["records"]:
        instance = instance_for_scoring(bundle, record["instance_id"])
        try:
            rescored = tasks.score(instance, record["answer"]).correct
        except Exception:
            rescored = False
        if rescored != record["correct"]:
            divergences += 1
    assert divergences == 0

    replayed = StudyService(storage)
    assert canonical_json(replayed.export_results("integrity-study")) == canonical_json(
        service.export_results("integrity-study")
    )
