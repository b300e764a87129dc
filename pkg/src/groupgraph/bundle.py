"""Study bundles: a stimulus, its task instances, and a segregated answer key.

A bundle is one JSON document holding the graph, the layout export, the
ordered participant-facing instances, and an ``answer_key`` section keyed by
instance id.  Participant bundles are the same document minus the key.
"""

from __future__ import annotations

import random
from typing import Any, Iterable, Mapping

from . import tasks
from .errors import BundleError, InapplicableTemplateError
from .layout import (
    DEFAULT_CANVAS,
    DEFAULT_CELL_SIZE,
    DEFAULT_ITERATIONS,
    DEFAULT_REACH,
    compute_layout,
    layout_to_dict,
    rasterize_regions,
)
from .metagraph import build_link_metagraph
from .model import ClusteredGraph, canonical_json, clustered_graph_from_dict
from .queries import QueryContext

BUNDLE_FORMAT = "groupgraph-study/1"


def build_context(
    graph: ClusteredGraph,
    seed: int,
    *,
    with_geometry: bool = True,
    canvas: tuple[float, float] = DEFAULT_CANVAS,
    iterations: int = DEFAULT_ITERATIONS,
    cell_size: float = DEFAULT_CELL_SIZE,
    reach: float = DEFAULT_REACH,
) -> QueryContext:
    layout = raster = None
    if with_geometry:
        layout = compute_layout(graph, seed=seed, iterations=iterations, canvas=canvas)
        raster = rasterize_regions(layout, graph, cell_size=cell_size, reach=reach)
    return QueryContext.from_graph(graph, meta=build_link_metagraph(graph), layout=layout, raster=raster)


def build_bundle(
    graph: ClusteredGraph,
    template_ids: Iterable[str] | str,
    seed: int,
    *,
    study_id: str | None = None,
    reveal_correctness: bool = False,
    canvas: tuple[float, float] = DEFAULT_CANVAS,
    iterations: int = DEFAULT_ITERATIONS,
    cell_size: float = DEFAULT_CELL_SIZE,
    reach: float = DEFAULT_REACH,
) -> dict[str, Any]:
    """Instantiate the requested templates on one stimulus into a bundle.

    All requested templates must be applicable; otherwise the full list of
    inapplicable ones is raised so the study designer can adjust the
    stimulus rather than silently lose tasks.
    """
    if template_ids == "all":
        requested = [template.template_id for template in tasks.list_templates()]
    else:
        requested = list(template_ids)
    for template_id in requested:
        tasks.get_template(template_id)

    ctx = build_context(
        graph, seed, with_geometry=True,
        canvas=canvas, iterations=iterations, cell_size=cell_size, reach=reach,
    )
    blockers = []
    for template_id in requested:
        reason = tasks.get_template(template_id).applicable(ctx)
        if reason:
            blockers.append(f"{template_id} ({reason})")
    if blockers:
        raise InapplicableTemplateError("inapplicable templates: " + ", ".join(blockers))

    rng = random.Random(seed)
    instances = []
    answer_key: dict[str, Any] = {}
    for index, template_id in enumerate(requested):
        instance_seed = rng.randrange(2**32)
        instance = tasks.instantiate(
            template_id, ctx, instance_seed, instance_id=f"t{index + 1:02d}-{template_id}"
        )
        instances.append(instance)
        answer_key[instance.instance_id] = instance.key_entry()

    assert ctx.layout is not None and ctx.raster is not None
    bundle = {
        "format": BUNDLE_FORMAT,
        "study_id": study_id or f"study-{tasks.graph_digest(graph.to_dict())}-{seed}",
        "reveal_correctness": reveal_correctness,
        "graph": graph.to_dict(),
        "layout": layout_to_dict(ctx.layout, ctx.raster),
        "instances": [instance.participant_view() for instance in instances],
        "answer_key": answer_key,
    }
    validate_bundle(bundle)
    return bundle


def validate_bundle(bundle: Mapping[str, Any]) -> None:
    """Check structural consistency; raises BundleError naming the problem."""
    if not isinstance(bundle, Mapping):
        raise BundleError("bundle must be an object")
    for key in ("study_id", "graph", "layout", "instances", "answer_key"):
        if key not in bundle:
            raise BundleError(f"bundle missing key {key!r}")
    if not isinstance(bundle["study_id"], str) or not bundle["study_id"]:
        raise BundleError("study_id must be a non-empty string")
    try:
        graph = clustered_graph_from_dict(bundle["graph"])
    except Exception as exc:
        raise BundleError(f"bundle graph invalid: {exc}") from exc
    layout = bundle["layout"]
    if not isinstance(layout, Mapping) or "positions" not in layout:
        raise BundleError("bundle layout missing positions")
    missing_positions = [nid for nid in graph.nodes if nid not in layout["positions"]]
    if missing_positions:
        raise BundleError(f"layout missing positions for: {missing_positions[:3]}")
    instances = bundle["instances"]
    if not isinstance(instances, list) or not instances:
        raise BundleError("bundle has no instances")
    key = bundle["answer_key"]
    if not isinstance(key, Mapping):
        raise BundleError("answer_key must be an object")
    seen = set()
    for entry in instances:
        if not isinstance(entry, Mapping) or "instance_id" not in entry:
            raise BundleError("instance entry missing instance_id")
        instance_id = entry["instance_id"]
        if instance_id in seen:
            raise BundleError(f"duplicate instance id {instance_id!r}")
        seen.add(instance_id)
        for field in ("prompt", "answer_kind", "template_id"):
            if field not in entry:
                raise BundleError(f"instance {instance_id!r} missing {field!r}")
        if entry["answer_kind"] not in tasks.ANSWER_KINDS:
            raise BundleError(f"instance {instance_id!r} has unknown answer kind")
        if "ground_truth" in entry:
            raise BundleError(f"instance {instance_id!r} leaks ground truth outside the answer key")
        if instance_id not in key:
            raise BundleError(f"instance {instance_id!r} has no answer key entry")
        if "ground_truth" not in key[instance_id]:
            raise BundleError(f"answer key for {instance_id!r} missing ground_truth")


def participant_bundle(bundle: Mapping[str, Any]) -> dict[str, Any]:
    """Derived view safe to serve to participants (no answer key)."""
    return {key: value for key, value in bundle.items() if key != "answer_key"}


def instance_for_scoring(bundle: Mapping[str, Any], instance_id: str) -> tasks.TaskInstance:
    """Rehydrate one instance (with its key entry) for offline or server scoring."""
    entry = next(
        (item for item in bundle["instances"] if item["instance_id"] == instance_id), None
    )
    if entry is None:
        raise BundleError(f"no instance {instance_id!r} in bundle")
    key = bundle["answer_key"].get(instance_id)
    if key is None:
        raise BundleError(f"no answer key for {instance_id!r}")
    descriptor_fields = dict(entry.get("descriptor", {}))
    descriptor = tasks.TaskDescriptor(
        search_kind=descriptor_fields.get("search_kind", "explore"),
        query_level=descriptor_fields.get("query_level", "identify"),
        inputs=descriptor_fields.get("inputs", ""),
        outputs=descriptor_fields.get("outputs", ""),
        methods=tuple(descriptor_fields.get("methods", ("select",))),
        mode=descriptor_fields.get("mode", "consume"),
        discover=descriptor_fields.get("discover", True),
    )
    alternates = key.get("alternates")
    return tasks.TaskInstance(
        instance_id=entry["instance_id"],
        template_id=entry["template_id"],
        category=entry.get("category", ""),
        prompt=entry["prompt"],
        answer_kind=entry["answer_kind"],
        bound_parameters=dict(entry.get("bound_parameters", {})),
        stimulus_ref=dict(entry.get("stimulus_ref", {})),
        ground_truth=key["ground_truth"],
        descriptor=descriptor,
        alternates=tuple(tuple(a) if isinstance(a, list) else a for a in alternates)
        if alternates is not None
        else None,
        values=dict(key["values"]) if "values" in key else None,
    )


def bundle_to_json(bundle: Mapping[str, Any]) -> str:
    return canonical_json(bundle)
