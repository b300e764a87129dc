"""Task catalog: 29 group-level templates with machine-computed ground truth.

Each template binds parameters against a stimulus, computes its answer
through a query operation, renders a prompt, and carries a why/how/what
descriptor.  Scoring normalizes participant answers per answer kind and is
tolerant of ties (ranked lists) and of alternate witnesses (find-one
tasks), so every acceptable answer counts as correct.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from . import queries
from .errors import AnswerKindError, InapplicableTemplateError, UnknownIdError, ValidationError
from .model import canonical_json
from .queries import Metric, QueryContext

CATEGORY_GROUP_ONLY = "group-only"
CATEGORY_GROUP_NODE = "group-node"
CATEGORY_GROUP_LINK = "group-link"
CATEGORY_GROUP_NETWORK = "group-network"

ANSWER_KINDS = (
    "boolean",
    "integer",
    "group-id",
    "group-id-set",
    "group-id-list",
    "node-id",
    "pair",
)

_SEARCH_WORDS = {"lookup": "Look up", "locate": "Locate", "browse": "Browse", "explore": "Explore"}
_NUMBER_WORDS = {
    1: "One", 2: "Two", 3: "Three", 4: "Four", 5: "Five",
    6: "Six", 7: "Seven", 8: "Eight", 9: "Nine", 10: "Ten",
}

_BIND_ATTEMPTS = 200


def _number_word(value: int) -> str:
    return _NUMBER_WORDS.get(value, str(value))


@dataclass(frozen=True)
class TaskDescriptor:
    """Why/how/what characterization of one task."""

    search_kind: str
    query_level: str
    inputs: str
    outputs: str
    methods: tuple[str, ...]
    mode: str = "consume"
    discover: bool = True

    def __post_init__(self) -> None:
        if self.search_kind not in _SEARCH_WORDS:
            raise ValidationError(f"unknown search kind {self.search_kind!r}")
        if self.query_level not in ("identify", "compare", "summarize"):
            raise ValidationError(f"unknown query level {self.query_level!r}")
        if self.mode not in ("consume", "produce"):
            raise ValidationError(f"unknown mode {self.mode!r}")
        if not self.methods:
            raise ValidationError("descriptor needs at least one method")

    def why_phrase(self) -> str:
        first = "Discover" if self.discover else self.mode.capitalize()
        return f"{first} + {_SEARCH_WORDS[self.search_kind]} + {self.query_level.capitalize()}"

    def how_phrase(self) -> str:
        return " + ".join(word.capitalize() for word in self.methods)

    def summary(self) -> dict[str, Any]:
        return {
            "why": self.why_phrase(),
            "what": {"inputs": self.inputs, "outputs": self.outputs},
            "how": self.how_phrase(),
        }

    def serialize(self) -> str:
        return canonical_json(self.summary())

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode,
            "discover": self.discover,
            "search_kind": self.search_kind,
            "query_level": self.query_level,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "methods": list(self.methods),
        }


@dataclass(frozen=True)
class Truth:
    """Ground truth plus the auxiliary data scoring needs.

    ``alternates`` holds every equally-correct answer for find-one tasks
    and path tasks; ``values`` holds the metric value of each eligible
    group for tie-tolerant ranked-list scoring.
    """

    ground_truth: Any
    alternates: tuple[Any, ...] | None = None
    values: dict[str, float] | None = None


@dataclass(frozen=True)
class TaskTemplate:
    template_id: str
    category: str
    prompt_pattern: str
    parameter_spec: dict[str, str]
    answer_kind: str
    target_known: bool
    query_level: str
    methods: tuple[str, ...]
    inputs: str
    outputs: str
    applicable: Callable[[QueryContext], str | None]
    bind: Callable[[QueryContext, random.Random], dict[str, Any] | None]
    solve: Callable[[QueryContext, dict[str, Any]], Truth]
    render: Callable[[dict[str, Any]], str] | None = None

    @property
    def default_descriptor(self) -> TaskDescriptor:
        return describe(self.template_id)

    def prompt_for(self, params: dict[str, Any]) -> str:
        if self.render is not None:
            return self.render(params)
        display = {key: _display(value) for key, value in params.items()}
        return self.prompt_pattern.format(**display)


def _display(value: Any) -> str:
    if isinstance(value, Mapping) and "attribute" in value:
        return f"{value['attribute']} = {value['value']}"
    if isinstance(value, Mapping) and "link" in value:
        return str(value["link"])
    return str(value)


@dataclass(frozen=True)
class TaskInstance:
    instance_id: str
    template_id: str
    category: str
    prompt: str
    answer_kind: str
    bound_parameters: dict[str, Any]
    stimulus_ref: dict[str, Any]
    ground_truth: Any
    descriptor: TaskDescriptor
    alternates: tuple[Any, ...] | None = None
    values: dict[str, float] | None = None

    def participant_view(self) -> dict[str, Any]:
        """The instance as served to participants: no ground truth anywhere."""
        return {
            "instance_id": self.instance_id,
            "template_id": self.template_id,
            "category": self.category,
            "prompt": self.prompt,
            "answer_kind": self.answer_kind,
            "bound_parameters": self.bound_parameters,
            "stimulus_ref": self.stimulus_ref,
            "descriptor": self.descriptor.to_dict(),
        }

    def key_entry(self) -> dict[str, Any]:
        entry: dict[str, Any] = {"answer_kind": self.answer_kind, "ground_truth": self.ground_truth}
        if self.alternates is not None:
            entry["alternates"] = list(self.alternates)
        if self.values is not None:
            entry["values"] = dict(sorted(self.values.items()))
        return entry


@dataclass(frozen=True)
class ScoreResult:
    correct: bool
    normalized_answer: Any
    detail: dict[str, Any] | None = None


# -- binding helpers ---------------------------------------------------------


def _choice(rng: random.Random, candidates: list[Any]) -> Any:
    return rng.choice(candidates)


def _group_pairs(ctx: QueryContext) -> list[tuple[str, str]]:
    return list(itertools.combinations(ctx.graph.group_ids, 2))


def _needs_groups(minimum: int) -> Callable[[QueryContext], str | None]:
    def check(ctx: QueryContext) -> str | None:
        if ctx.graph.group_count < minimum:
            return f"needs at least {minimum} groups"
        return None

    return check


def _needs_raster(ctx: QueryContext) -> str | None:
    if ctx.raster is None:
        return "needs region geometry (no raster)"
    return None


def _needs_layout(ctx: QueryContext) -> str | None:
    if ctx.layout is None:
        return "needs a layout"
    return None


def _group_attribute_candidates(ctx: QueryContext) -> list[tuple[str, Any]]:
    pairs = {
        (attr, value)
        for group in ctx.graph.groups.values()
        for attr, value in group.attributes.items()
    }
    return sorted(pairs, key=lambda item: (item[0], str(item[1])))


def _node_attribute_candidates(ctx: QueryContext) -> list[tuple[str, Any]]:
    pairs = {
        (attr, value)
        for node in ctx.graph.nodes.values()
        for attr, value in node.attributes.items()
    }
    return sorted(pairs, key=lambda item: (item[0], str(item[1])))


def _attribute_predicate(spec: Mapping[str, Any]) -> Callable[[Mapping[str, Any]], bool]:
    attribute, value = spec["attribute"], spec["value"]
    return lambda attrs: attrs.get(attribute) == value


def _extremal_single(ctx: QueryContext, metric: Metric, direction: str) -> Truth:
    result = queries.extremal_groups(ctx, metric, direction, k=1)
    best = result.values[0]
    alternates = tuple(sorted(g for g, v in result.value_by_group.items() if v == best))
    return Truth(ground_truth=result.groups[0], alternates=alternates, values=result.value_by_group)


def _set_truth(values: set[str]) -> Truth:
    return Truth(ground_truth=sorted(values))


# -- template catalog --------------------------------------------------------


def _build_templates() -> dict[str, TaskTemplate]:
    templates: list[TaskTemplate] = []

    def add(**kwargs: Any) -> None:
        templates.append(TaskTemplate(**kwargs))

    # Group-only -------------------------------------------------------------

    add(
        template_id="GO-1",
        category=CATEGORY_GROUP_ONLY,
        prompt_pattern="Find the set of group-neighbors of group {X}.",
        parameter_spec={"X": "group"},
        answer_kind="group-id-set",
        target_known=True,
        query_level="identify",
        methods=("select",),
        inputs="Group X",
        outputs="Set of groups",
        applicable=_needs_groups(2),
        bind=lambda ctx, rng: {"X": _choice(rng, list(ctx.graph.group_ids))},
        solve=lambda ctx, p: _set_truth(queries.neighbors(ctx, p["X"])),
    )
    add(
        template_id="GO-2",
        category=CATEGORY_GROUP_ONLY,
        prompt_pattern="How many groups are neighbors of group {X}?",
        parameter_spec={"X": "group"},
        answer_kind="integer",
        target_known=True,
        query_level="summarize",
        methods=("derive",),
        inputs="Group X",
        outputs="Count of groups",
        applicable=_needs_groups(2),
        bind=lambda ctx, rng: {"X": _choice(rng, list(ctx.graph.group_ids))},
        solve=lambda ctx, p: Truth(ground_truth=len(queries.neighbors(ctx, p["X"]))),
    )
    add(
        template_id="GO-3",
        category=CATEGORY_GROUP_ONLY,
        prompt_pattern="Which group has the {direction} number of neighboring groups?",
        parameter_spec={"direction": "choice"},
        answer_kind="group-id",
        target_known=False,
        query_level="summarize",
        methods=("derive", "select"),
        inputs="Entire map",
        outputs="One group",
        applicable=_needs_groups(2),
        bind=lambda ctx, rng: {"direction": _choice(rng, ["maximum", "minimum"])},
        solve=lambda ctx, p: _extremal_single(
            ctx, Metric("neighbor-count"), "max" if p["direction"] == "maximum" else "min"
        ),
    )
    add(
        template_id="GO-4",
        category=CATEGORY_GROUP_ONLY,
        prompt_pattern="Find the set of groups accessible from group {X}.",
        parameter_spec={"X": "group"},
        answer_kind="group-id-set",
        target_known=True,
        query_level="identify",
        methods=("navigate", "select"),
        inputs="Group X",
        outputs="Set of groups",
        applicable=_needs_groups(2),
        bind=lambda ctx, rng: {"X": _choice(rng, list(ctx.graph.group_ids))},
        solve=lambda ctx, p: _set_truth(queries.accessible(ctx, p["X"])),
    )
    add(
        template_id="GO-5",
        category=CATEGORY_GROUP_ONLY,
        prompt_pattern="How many groups are accessible from group {X}?",
        parameter_spec={"X": "group"},
        answer_kind="integer",
        target_known=True,
        query_level="summarize",
        methods=("navigate", "derive"),
        inputs="Group X",
        outputs="Count of groups",
        applicable=_needs_groups(2),
        bind=lambda ctx, rng: {"X": _choice(rng, list(ctx.graph.group_ids))},
        solve=lambda ctx, p: Truth(ground_truth=len(queries.accessible(ctx, p["X"]))),
    )

    def _bind_distance_two(ctx: QueryContext, rng: random.Random) -> dict[str, Any]:
        nonempty = [g for g in ctx.graph.group_ids if queries.groups_at_distance(ctx, g, 2)]
        return {"X": _choice(rng, nonempty or list(ctx.graph.group_ids))}

    add(
        template_id="GO-6",
        category=CATEGORY_GROUP_ONLY,
        prompt_pattern="Find the set of groups one group away from group {X}.",
        parameter_spec={"X": "group"},
        answer_kind="group-id-set",
        target_known=True,
        query_level="identify",
        methods=("navigate", "select"),
        inputs="Group X",
        outputs="Set of groups",
        applicable=_needs_groups(3),
        bind=_bind_distance_two,
        solve=lambda ctx, p: _set_truth(queries.groups_at_distance(ctx, p["X"], 2)),
    )

    def _bind_common(ctx: QueryContext, rng: random.Random) -> dict[str, Any]:
        pairs = _group_pairs(ctx)
        nonempty = [pair for pair in pairs if queries.common_neighbors(ctx, *pair)]
        x, y = _choice(rng, nonempty or pairs)
        return {"X": x, "Y": y}

    add(
        template_id="GO-7",
        category=CATEGORY_GROUP_ONLY,
        prompt_pattern="Find the set of groups that are adjacent to both group {X} and group {Y}.",
        parameter_spec={"X": "group", "Y": "group"},
        answer_kind="group-id-set",
        target_known=True,
        query_level="compare",
        methods=("select",),
        inputs="Groups X and Y",
        outputs="Set of groups",
        applicable=_needs_groups(3),
        bind=_bind_common,
        solve=lambda ctx, p: _set_truth(queries.common_neighbors(ctx, p["X"], p["Y"])),
    )

    def _bind_path_pair(ctx: QueryContext, rng: random.Random) -> dict[str, Any] | None:
        pairs = [
            pair
            for pair in _group_pairs(ctx)
            if queries.shortest_group_path(ctx, *pair) is not None
        ]
        if not pairs:
            return None
        x, y = _choice(rng, pairs)
        return {"X": x, "Y": y}

    def _solve_path(ctx: QueryContext, p: dict[str, Any]) -> Truth:
        path = queries.shortest_group_path(ctx, p["X"], p["Y"])
        assert path is not None
        alternates = tuple(tuple(alt) for alt in queries.all_shortest_group_paths(ctx, p["X"], p["Y"]))
        return Truth(ground_truth=list(path), alternates=alternates)

    add(
        template_id="GO-8",
        category=CATEGORY_GROUP_ONLY,
        prompt_pattern="Find the shortest path between group {X} and group {Y}.",
        parameter_spec={"X": "group", "Y": "group"},
        answer_kind="group-id-list",
        target_known=True,
        query_level="identify",
        methods=("navigate", "select"),
        inputs="Groups X and Y",
        outputs="Ordered list of groups",
        applicable=lambda ctx: _needs_groups(2)(ctx)
        or (None if any(queries.shortest_group_path(ctx, *pair) for pair in _group_pairs(ctx)) else "no connected group pair"),
        bind=_bind_path_pair,
        solve=_solve_path,
    )

    def _bind_group_characteristic(ctx: QueryContext, rng: random.Random) -> dict[str, Any] | None:
        candidates = _group_attribute_candidates(ctx)
        if not candidates:
            return None
        attribute, value = _choice(rng, candidates)
        return {"characteristic": {"attribute": attribute, "value": value}}

    def _solve_find_groups(ctx: QueryContext, p: dict[str, Any]) -> Truth:
        matching = sorted(queries.find_groups(ctx, _attribute_predicate(p["characteristic"])))
        return Truth(ground_truth=matching[0], alternates=tuple(matching))

    add(
        template_id="GO-9",
        category=CATEGORY_GROUP_ONLY,
        prompt_pattern="Find a group with {characteristic}.",
        parameter_spec={"characteristic": "predicate"},
        answer_kind="group-id",
        target_known=False,
        query_level="identify",
        methods=("filter", "select"),
        inputs="Entire map",
        outputs="One group",
        applicable=lambda ctx: None if _group_attribute_candidates(ctx) else "no group attributes present",
        bind=_bind_group_characteristic,
        solve=_solve_find_groups,
    )
    add(
        template_id="GO-10",
        category=CATEGORY_GROUP_ONLY,
        prompt_pattern="Find the group with the {direction} area.",
        parameter_spec={"direction": "choice"},
        answer_kind="group-id",
        target_known=False,
        query_level="summarize",
        methods=("derive", "select"),
        inputs="Entire map",
        outputs="One group",
        applicable=_needs_raster,
        bind=lambda ctx, rng: {"direction": _choice(rng, ["largest", "smallest"])},
        solve=lambda ctx, p: _extremal_single(
            ctx, Metric("area"), "max" if p["direction"] == "largest" else "min"
        ),
    )

    def _bind_adjacent_pair(ctx: QueryContext, rng: random.Random) -> dict[str, Any]:
        x, y = _choice(rng, _group_pairs(ctx))
        return {"X": x, "Y": y}

    add(
        template_id="GO-11",
        category=CATEGORY_GROUP_ONLY,
        prompt_pattern="Are groups {X} and {Y} neighbors?",
        parameter_spec={"X": "group", "Y": "group"},
        answer_kind="boolean",
        target_known=True,
        query_level="identify",
        methods=("select",),
        inputs="Groups X and Y",
        outputs="Yes / No",
        applicable=_needs_groups(2),
        bind=_bind_adjacent_pair,
        solve=lambda ctx, p: Truth(ground_truth=queries.are_adjacent(ctx, p["X"], p["Y"])),
    )

    def _solve_articulation(ctx: QueryContext, p: dict[str, Any]) -> Truth:
        cut_groups = sorted(queries.articulation_groups(ctx))
        return Truth(ground_truth=cut_groups[0], alternates=tuple(cut_groups))

    add(
        template_id="GO-12",
        category=CATEGORY_GROUP_ONLY,
        prompt_pattern="Find a group whose removal from the visualization disconnects the map.",
        parameter_spec={},
        answer_kind="group-id",
        target_known=False,
        query_level="identify",
        methods=("select",),
        inputs="Entire map",
        outputs="One group",
        applicable=lambda ctx: None if queries.articulation_groups(ctx) else "no articulation group",
        bind=lambda ctx, rng: {},
        solve=_solve_articulation,
    )
    add(
        template_id="GO-13",
        category=CATEGORY_GROUP_ONLY,
        prompt_pattern="How many groups are there?",
        parameter_spec={},
        answer_kind="integer",
        target_known=False,
        query_level="summarize",
        methods=("derive",),
        inputs="Entire map",
        outputs="Count of groups",
        applicable=lambda ctx: None,
        bind=lambda ctx, rng: {},
        solve=lambda ctx, p: Truth(ground_truth=queries.count_groups(ctx)),
    )

    def _contact_partners(ctx: QueryContext, gid: str) -> list[str]:
        raster = ctx.raster
        assert raster is not None
        return queries.eligible_groups(ctx, Metric("shared-boundary-with", reference=gid))

    def _bind_boundary(ctx: QueryContext, rng: random.Random) -> dict[str, Any] | None:
        candidates = [g for g in ctx.graph.group_ids if _contact_partners(ctx, g)]
        if not candidates:
            return None
        return {"X": _choice(rng, candidates), "extent": _choice(rng, ["longest", "shortest"])}

    add(
        template_id="GO-14",
        category=CATEGORY_GROUP_ONLY,
        prompt_pattern="Find the group which has the {extent} boundary with group {X}.",
        parameter_spec={"X": "group", "extent": "choice"},
        answer_kind="group-id",
        target_known=True,
        query_level="summarize",
        methods=("derive", "select"),
        inputs="Group X",
        outputs="One group",
        applicable=lambda ctx: _needs_raster(ctx)
        or _needs_groups(2)(ctx)
        or (None if any(_contact_partners(ctx, g) for g in ctx.graph.group_ids) else "no group contacts"),
        bind=_bind_boundary,
        solve=lambda ctx, p: _extremal_single(
            ctx,
            Metric("shared-boundary-with", reference=p["X"]),
            "max" if p["extent"] == "longest" else "min",
        ),
    )

    # Group-node --------------------------------------------------------------

    add(
        template_id="GN-1",
        category=CATEGORY_GROUP_NODE,
        prompt_pattern="Find the group which contains node {X}.",
        parameter_spec={"X": "node"},
        answer_kind="group-id",
        target_known=True,
        query_level="identify",
        methods=("select",),
        inputs="Node X",
        outputs="One group",
        applicable=lambda ctx: None,
        bind=lambda ctx, rng: {"X": _choice(rng, list(ctx.graph.node_ids))},
        solve=lambda ctx, p: Truth(ground_truth=queries.group_of(ctx, p["X"])),
    )
    add(
        template_id="GN-2",
        category=CATEGORY_GROUP_NODE,
        prompt_pattern="Count the number of nodes in group {X}.",
        parameter_spec={"X": "group"},
        answer_kind="integer",
        target_known=True,
        query_level="summarize",
        methods=("derive",),
        inputs="Group X",
        outputs="Count of nodes",
        applicable=lambda ctx: None,
        bind=lambda ctx, rng: {"X": _choice(rng, list(ctx.graph.group_ids))},
        solve=lambda ctx, p: Truth(ground_truth=int(queries.group_metric(ctx, p["X"], Metric("node-count")))),
    )
    add(
        template_id="GN-3",
        category=CATEGORY_GROUP_NODE,
        prompt_pattern="Find the group with the {direction} number of nodes.",
        parameter_spec={"direction": "choice"},
        answer_kind="group-id",
        target_known=False,
        query_level="summarize",
        methods=("derive", "select"),
        inputs="Entire map",
        outputs="One group",
        applicable=lambda ctx: None,
        bind=lambda ctx, rng: {"direction": _choice(rng, ["maximum", "minimum"])},
        solve=lambda ctx, p: _extremal_single(
            ctx, Metric("node-count"), "max" if p["direction"] == "maximum" else "min"
        ),
    )

    def _bind_node_pair(ctx: QueryContext, rng: random.Random) -> dict[str, Any] | None:
        if ctx.graph.node_count < 2:
            return None
        x, y = rng.sample(list(ctx.graph.node_ids), 2)
        return {"X": x, "Y": y}

    add(
        template_id="GN-4",
        category=CATEGORY_GROUP_NODE,
        prompt_pattern="Do nodes {X} and {Y} belong to the same group?",
        parameter_spec={"X": "node", "Y": "node"},
        answer_kind="boolean",
        target_known=True,
        query_level="compare",
        methods=("select",),
        inputs="Nodes X and Y",
        outputs="Yes / No",
        applicable=lambda ctx: None if ctx.graph.node_count >= 2 else "needs at least 2 nodes",
        bind=_bind_node_pair,
        solve=lambda ctx, p: Truth(ground_truth=queries.same_group(ctx, p["X"], p["Y"])),
    )

    def _bind_node_characteristic(ctx: QueryContext, rng: random.Random) -> dict[str, Any] | None:
        candidates = _node_attribute_candidates(ctx)
        if not candidates:
            return None
        attribute, value = _choice(rng, candidates)
        return {"characteristic": {"attribute": attribute, "value": value}}

    add(
        template_id="GN-5",
        category=CATEGORY_GROUP_NODE,
        prompt_pattern="List the groups which contain nodes with {characteristic}.",
        parameter_spec={"characteristic": "predicate"},
        answer_kind="group-id-set",
        target_known=False,
        query_level="summarize",
        methods=("filter", "select"),
        inputs="Entire map",
        outputs="Set of groups",
        applicable=lambda ctx: None if _node_attribute_candidates(ctx) else "no node attributes present",
        bind=_bind_node_characteristic,
        solve=lambda ctx, p: _set_truth(
            queries.groups_containing(ctx, _attribute_predicate(p["characteristic"]))
        ),
    )

    # Group-link ----------------------------------------------------------------

    add(
        template_id="GL-1",
        category=CATEGORY_GROUP_LINK,
        prompt_pattern="Count the number of links in group {X}.",
        parameter_spec={"X": "group"},
        answer_kind="integer",
        target_known=True,
        query_level="summarize",
        methods=("derive",),
        inputs="Group X",
        outputs="Count of links",
        applicable=lambda ctx: None,
        bind=lambda ctx, rng: {"X": _choice(rng, list(ctx.graph.group_ids))},
        solve=lambda ctx, p: Truth(
            ground_truth=int(queries.group_metric(ctx, p["X"], Metric("intra-link-count")))
        ),
    )

    def _bind_link_extremal(ctx: QueryContext, rng: random.Random) -> dict[str, Any]:
        direction = _choice(rng, ["maximum", "minimum"])
        count = 1
        if ctx.graph.group_count >= 3 and rng.random() < 0.34:
            count = 3
        return {"direction": direction, "count": count}

    def _render_link_extremal(params: dict[str, Any]) -> str:
        if params["count"] == 1:
            return f"Find the group with the {params['direction']} number of links."
        word = "most" if params["direction"] == "maximum" else "fewest"
        return f"Find the {params['count']} groups with the {word} links."

    def _solve_link_extremal(ctx: QueryContext, p: dict[str, Any]) -> Truth:
        direction = "max" if p["direction"] == "maximum" else "min"
        result = queries.extremal_groups(ctx, Metric("intra-link-count"), direction, k=p["count"])
        return Truth(ground_truth=list(result.groups), values=result.value_by_group)

    add(
        template_id="GL-2",
        category=CATEGORY_GROUP_LINK,
        prompt_pattern="Find the group with the {direction} number of links.",
        parameter_spec={"direction": "choice", "count": "integer"},
        answer_kind="group-id-list",
        target_known=False,
        query_level="summarize",
        methods=("derive", "select"),
        inputs="Entire map",
        outputs="{count_word} group{plural}",
        applicable=lambda ctx: None,
        bind=_bind_link_extremal,
        solve=_solve_link_extremal,
        render=_render_link_extremal,
    )

    def _density_eligible(ctx: QueryContext) -> str | None:
        if not queries.eligible_groups(ctx, Metric("density")):
            return "no group with at least 2 nodes"
        return None

    add(
        template_id="GL-3",
        category=CATEGORY_GROUP_LINK,
        prompt_pattern="Find the most {style} connected group.",
        parameter_spec={"style": "choice"},
        answer_kind="group-id",
        target_known=False,
        query_level="summarize",
        methods=("derive", "select"),
        inputs="Entire map",
        outputs="One group",
        applicable=_density_eligible,
        bind=lambda ctx, rng: {"style": _choice(rng, ["sparsely", "densely"])},
        solve=lambda ctx, p: _extremal_single(
            ctx, Metric("density"), "min" if p["style"] == "sparsely" else "max"
        ),
    )

    def _solve_longest_link(ctx: QueryContext, p: dict[str, Any]) -> Truth:
        location = queries.longest_link_location(ctx)
        return Truth(ground_truth=list(location.container))

    add(
        template_id="GL-4",
        category=CATEGORY_GROUP_LINK,
        prompt_pattern=(
            "Find the group that contains the longest link "
            "(or the pair of groups at the endpoints of the longest link)."
        ),
        parameter_spec={},
        answer_kind="pair",
        target_known=False,
        query_level="identify",
        methods=("derive", "select"),
        inputs="Entire map",
        outputs="One group or a pair of groups",
        applicable=lambda ctx: _needs_layout(ctx)
        or (None if ctx.graph.edge_count else "graph has no links"),
        bind=lambda ctx, rng: {},
        solve=_solve_longest_link,
    )

    def _bind_link_predicate(ctx: QueryContext, rng: random.Random) -> dict[str, Any]:
        kinds = ["heaviest"]
        if ctx.layout is not None:
            kinds.append("longest")
        return {"characteristic": {"link": _choice(rng, kinds)}}

    def _solve_link_predicate(ctx: QueryContext, p: dict[str, Any]) -> Truth:
        kind = p["characteristic"]["link"]
        if kind == "heaviest":
            top = max(edge.effective_weight for edge in ctx.graph.edges.values())
            matched = queries.groups_with_links(ctx, lambda info: info.weight == top)
        else:
            layout = ctx.require_layout()
            from .layout import link_length

            top = max(link_length(layout, key) for key in ctx.graph.edges)
            matched = queries.groups_with_links(
                ctx, lambda info: info.length == top, needs_length=True
            )
        return _set_truth(matched)

    add(
        template_id="GL-5",
        category=CATEGORY_GROUP_LINK,
        prompt_pattern="List the groups which contain the {characteristic} link.",
        parameter_spec={"characteristic": "predicate"},
        answer_kind="group-id-set",
        target_known=False,
        query_level="summarize",
        methods=("filter", "select"),
        inputs="Entire map",
        outputs="Set of groups",
        applicable=lambda ctx: None if ctx.graph.edge_count else "graph has no links",
        bind=_bind_link_predicate,
        solve=_solve_link_predicate,
    )

    # Group-network ---------------------------------------------------------------

    def _solve_bridging(ctx: QueryContext, p: dict[str, Any]) -> Truth:
        pairs = sorted(list(pair) for pair in queries.bridging_group_pairs(ctx))
        return Truth(ground_truth=pairs[0], alternates=tuple(tuple(pair) for pair in pairs))

    add(
        template_id="GX-1",
        category=CATEGORY_GROUP_NETWORK,
        prompt_pattern=(
            "Find two groups with a link between them whose removal disconnects the network."
        ),
        parameter_spec={},
        answer_kind="pair",
        target_known=False,
        query_level="identify",
        methods=("derive", "select"),
        inputs="Entire map",
        outputs="Pair of groups",
        applicable=lambda ctx: None if queries.bridging_group_pairs(ctx) else "no bridging group pair",
        bind=lambda ctx, rng: {},
        solve=_solve_bridging,
    )

    def _bind_cut(ctx: QueryContext, rng: random.Random) -> dict[str, Any] | None:
        pairs = _group_pairs(ctx)
        if not pairs:
            return None
        connected = [pair for pair in pairs if queries.min_intergroup_cut(ctx, *pair) >= 1]
        x, y = _choice(rng, connected or pairs)
        cut = queries.min_intergroup_cut(ctx, x, y)
        n = max(1, cut + _choice(rng, [-1, 0, 1]))
        return {"X": x, "Y": y, "n": n}

    def _render_cut(params: dict[str, Any]) -> str:
        noun = "link" if params["n"] == 1 else "links"
        return (
            f"Can groups {params['X']} and {params['Y']} be disconnected by removing "
            f"no more than {params['n']} {noun}?"
        )

    add(
        template_id="GX-2",
        category=CATEGORY_GROUP_NETWORK,
        prompt_pattern="Can groups {X} and {Y} be disconnected by removing no more than {n} links?",
        parameter_spec={"X": "group", "Y": "group", "n": "integer"},
        answer_kind="boolean",
        target_known=True,
        query_level="identify",
        methods=("derive", "select"),
        inputs="Groups X and Y",
        outputs="Yes / No",
        applicable=_needs_groups(2),
        bind=_bind_cut,
        solve=lambda ctx, p: Truth(
            ground_truth=queries.min_intergroup_cut(ctx, p["X"], p["Y"]) <= p["n"]
        ),
        render=_render_cut,
    )

    def _solve_degree(ctx: QueryContext, p: dict[str, Any]) -> Truth:
        if p["extent"] == "highest":
            return _extremal_single(ctx, Metric("max-node-degree"), "max")
        return _extremal_single(ctx, Metric("min-node-degree"), "min")

    add(
        template_id="GX-3",
        category=CATEGORY_GROUP_NETWORK,
        prompt_pattern="Find the group which has the node with the {extent} degree.",
        parameter_spec={"extent": "choice"},
        answer_kind="group-id",
        target_known=False,
        query_level="summarize",
        methods=("derive", "select"),
        inputs="Entire map",
        outputs="One group",
        applicable=lambda ctx: None,
        bind=lambda ctx, rng: {"extent": _choice(rng, ["highest", "lowest"])},
        solve=_solve_degree,
    )

    def _bind_two_hop(ctx: QueryContext, rng: random.Random) -> dict[str, Any] | None:
        hubs = [nid for nid in ctx.graph.node_ids if ctx.graph.degree(nid) >= 2]
        if not hubs:
            return None
        y = _choice(rng, hubs)
        x, z = rng.sample(list(ctx.graph.neighbors_of(y)), 2)
        return {"X": x, "Y": y, "Z": z}

    add(
        template_id="GX-4",
        category=CATEGORY_GROUP_NETWORK,
        prompt_pattern="Find the path {X}-{Y}-{Z}; are nodes {X} and {Z} in the same group?",
        parameter_spec={"X": "node", "Y": "node", "Z": "node"},
        answer_kind="boolean",
        target_known=True,
        query_level="identify",
        methods=("navigate", "select"),
        inputs="Nodes X, Y and Z",
        outputs="Yes / No",
        applicable=lambda ctx: None
        if any(ctx.graph.degree(nid) >= 2 for nid in ctx.graph.node_ids)
        else "no two-hop path",
        bind=_bind_two_hop,
        solve=lambda ctx, p: Truth(
            ground_truth=queries.path_group_check(ctx, p["X"], p["Y"], p["Z"]).same_group
        ),
    )

    def _connected_cross_group_pairs(ctx: QueryContext) -> list[tuple[str, str]]:
        graph = ctx.graph
        component: dict[str, int] = {}
        for index, start in enumerate(graph.node_ids):
            if start in component:
                continue
            stack = [start]
            component[start] = index
            while stack:
                current = stack.pop()
                for nxt in graph.neighbors_of(current):
                    if nxt not in component:
                        component[nxt] = index
                        stack.append(nxt)
        return [
            (a, b)
            for a, b in itertools.combinations(graph.node_ids, 2)
            if component[a] == component[b] and graph.membership[a] != graph.membership[b]
        ]

    def _bind_min_groups(ctx: QueryContext, rng: random.Random) -> dict[str, Any] | None:
        pairs = _connected_cross_group_pairs(ctx)
        if not pairs:
            return None
        x, y = _choice(rng, pairs)
        return {"X": x, "Y": y}

    def _solve_min_groups(ctx: QueryContext, p: dict[str, Any]) -> Truth:
        result = queries.min_distinct_groups_path(ctx, p["X"], p["Y"])
        assert result is not None and result.exact
        return Truth(ground_truth=result.count)

    add(
        template_id="GX-5",
        category=CATEGORY_GROUP_NETWORK,
        prompt_pattern=(
            "Nodes {X} and {Y} are in different groups. What is the smallest number of "
            "groups that need to be visited on a path from {X} to {Y}?"
        ),
        parameter_spec={"X": "node", "Y": "node"},
        answer_kind="integer",
        target_known=True,
        query_level="summarize",
        methods=("navigate", "derive"),
        inputs="Nodes X and Y",
        outputs="Count of groups",
        applicable=lambda ctx: (
            "group count exceeds the exact search limit"
            if ctx.graph.group_count > queries.DEFAULT_EXACT_GROUP_LIMIT
            else (None if _connected_cross_group_pairs(ctx) else "no connected cross-group node pair")
        ),
        bind=_bind_min_groups,
        solve=_solve_min_groups,
    )

    catalog = {template.template_id: template for template in templates}
    assert len(catalog) == 29
    return catalog


_TEMPLATES = _build_templates()


def list_templates() -> list[TaskTemplate]:
    """All built-in templates in catalog order."""
    return list(_TEMPLATES.values())


def get_template(template_id: str) -> TaskTemplate:
    if template_id not in _TEMPLATES:
        raise UnknownIdError(f"unknown template {template_id!r}")
    return _TEMPLATES[template_id]


def describe(
    template_id: str,
    knowledge: Mapping[str, bool] | None = None,
    parameters: Mapping[str, Any] | None = None,
) -> TaskDescriptor:
    """Descriptor for a template under the evaluator's knowledge assumptions.

    Known target and location is a lookup; known target in an unknown place
    a locate; an unknown target is an explore, or a browse when its location
    is nevertheless known.  ``parameters`` refines count-dependent output
    text (e.g. the three-group ranked variant).
    """
    template = get_template(template_id)
    knowledge = dict(knowledge or {})
    target_known = bool(knowledge.get("target_known", template.target_known))
    location_known = bool(knowledge.get("location_known", False))
    if target_known:
        search_kind = "lookup" if location_known else "locate"
    else:
        search_kind = "browse" if location_known else "explore"
    outputs = template.outputs
    if "{count_word}" in outputs:
        count = int((parameters or {}).get("count", 1))
        outputs = outputs.replace("{count_word}", _number_word(count)).replace(
            "{plural}", "" if count == 1 else "s"
        )
    return TaskDescriptor(
        search_kind=search_kind,
        query_level=template.query_level,
        inputs=template.inputs,
        outputs=outputs,
        methods=template.methods,
    )


def graph_digest(graph_dict: Mapping[str, Any]) -> str:
    return hashlib.sha256(canonical_json(graph_dict).encode("utf-8")).hexdigest()[:12]


def instantiate(
    template_id: str,
    ctx: QueryContext,
    seed: int,
    instance_id: str | None = None,
) -> TaskInstance:
    """Bind a template against a stimulus; deterministic in (template, stimulus, seed)."""
    template = get_template(template_id)
    reason = template.applicable(ctx)
    if reason:
        raise InapplicableTemplateError(f"{template_id} inapplicable: {reason}")
    rng = random.Random(seed)
    params: dict[str, Any] | None = None
    for _ in range(_BIND_ATTEMPTS):
        params = template.bind(ctx, rng)
        if params is not None:
            break
    if params is None:
        raise InapplicableTemplateError(f"{template_id}: exhausted retries, no well-posed binding")

    truth = template.solve(ctx, params)
    stimulus_ref = {"graph": graph_digest(ctx.graph.to_dict())}
    if ctx.layout is not None:
        stimulus_ref["layout"] = graph_digest(ctx.layout.to_dict())
    return TaskInstance(
        instance_id=instance_id or f"{template_id}-s{seed}",
        template_id=template_id,
        category=template.category,
        prompt=template.prompt_for(params),
        answer_kind=template.answer_kind,
        bound_parameters=params,
        stimulus_ref=stimulus_ref,
        ground_truth=truth.ground_truth,
        descriptor=describe(template_id, parameters=params),
        alternates=truth.alternates,
        values=truth.values,
    )


# -- scoring -------------------------------------------------------------------


def _normalize(kind: str, answer: Any) -> Any:
    if kind == "boolean":
        if isinstance(answer, bool):
            return answer
        if isinstance(answer, str) and answer.strip().lower() in ("yes", "no", "true", "false"):
            return answer.strip().lower() in ("yes", "true")
        raise AnswerKindError(f"expected a yes/no answer, got {answer!r}")
    if kind == "integer":
        if isinstance(answer, bool):
            raise AnswerKindError(f"expected an integer, got {answer!r}")
        if isinstance(answer, int):
            return answer
        if isinstance(answer, float) and answer.is_integer():
            return int(answer)
        if isinstance(answer, str):
            try:
                return int(answer.strip())
            except ValueError:
                raise AnswerKindError(f"expected an integer, got {answer!r}") from None
        raise AnswerKindError(f"expected an integer, got {answer!r}")
    if kind in ("group-id", "node-id"):
        if isinstance(answer, str) and answer:
            return answer
        raise AnswerKindError(f"expected an id string, got {answer!r}")
    if kind == "group-id-set":
        if isinstance(answer, (list, tuple, set, frozenset)) and all(isinstance(x, str) for x in answer):
            return sorted(set(answer))
        raise AnswerKindError(f"expected a set of id strings, got {answer!r}")
    if kind == "group-id-list":
        if isinstance(answer, (list, tuple)) and all(isinstance(x, str) for x in answer):
            return list(answer)
        raise AnswerKindError(f"expected an ordered list of id strings, got {answer!r}")
    if kind == "pair":
        if isinstance(answer, str):
            answer = [answer]
        if (
            isinstance(answer, (list, tuple, set, frozenset))
            and all(isinstance(x, str) for x in answer)
            and 1 <= len(set(answer)) <= 2
        ):
            return sorted(set(answer))
        raise AnswerKindError(f"expected one or two group ids, got {answer!r}")
    raise AnswerKindError(f"unknown answer kind {kind!r}")


def _normalize_truth(kind: str, value: Any) -> Any:
    if kind == "pair":
        return sorted(set(value)) if not isinstance(value, str) else [value]
    if kind == "group-id-set":
        return sorted(set(value))
    if kind == "group-id-list":
        return list(value)
    return value


def score(instance: TaskInstance, answer: Any) -> ScoreResult:
    """Score a raw answer against the instance's ground truth.

    Sets compare order-insensitively, ranked lists accept any permutation
    within tied metric values, find-one answers accept any listed alternate,
    counts compare exactly.
    """
    kind = instance.answer_kind
    normalized = _normalize(kind, answer)
    truth = _normalize_truth(kind, instance.ground_truth)

    if kind == "group-id-list" and instance.values is not None:
        expected_values = [instance.values.get(g) for g in truth]
        got_values = [instance.values.get(g) for g in normalized]
        correct = (
            len(normalized) == len(truth)
            and len(set(normalized)) == len(normalized)
            and None not in got_values
            and got_values == expected_values
        )
        detail = {"expected_values": expected_values, "answer_values": got_values}
        return ScoreResult(correct=correct, normalized_answer=normalized, detail=detail)

    if kind == "group-id-list":
        options = [truth] + [list(alt) for alt in (instance.alternates or ())]
        return ScoreResult(correct=normalized in options, normalized_answer=normalized)

    if kind == "group-id-set":
        missing = sorted(set(truth) - set(normalized))
        extra = sorted(set(normalized) - set(truth))
        return ScoreResult(
            correct=not missing and not extra,
            normalized_answer=normalized,
            detail={"missing": missing, "extra": extra},
        )

    if kind == "pair":
        options = [truth] + [sorted(set(alt)) for alt in (instance.alternates or ())]
        return ScoreResult(correct=normalized in options, normalized_answer=normalized)

    if kind in ("group-id", "node-id") and instance.alternates is not None:
        return ScoreResult(
            correct=normalized == truth or normalized in instance.alternates,
            normalized_answer=normalized,
        )

    return ScoreResult(correct=normalized == truth, normalized_answer=normalized)
