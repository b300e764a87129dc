"""Command-line entry points: generate stimuli, query graphs, build and serve studies.

Exit codes: 0 success, 2 usage errors and unknown operations, 3 inapplicable
requests (missing geometry, undefined metrics, inapplicable templates),
4 port already in use.
"""

from __future__ import annotations

import json
import socket
import sys
from pathlib import Path

import click

from . import queries, tasks
from .bundle import build_bundle, build_context, bundle_to_json, instance_for_scoring
from .errors import (
    GroupGraphError,
    InapplicableTemplateError,
    MissingGeometryError,
    UndefinedMetricError,
    UnknownIdError,
)
from .model import (
    canonical_json,
    generate_planted_partition,
    load_clustered_graph,
    serialize_clustered_graph,
)

EXIT_USAGE = 2
EXIT_INAPPLICABLE = 3
EXIT_PORT = 4


def _die(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main() -> None:
    """Clustered-graph group-level queries and study tooling."""


@main.command()
@click.option("--groups", "k", type=int, required=True, help="Number of groups.")
@click.option("--sizes", required=True, help="Comma-separated group sizes, one per group.")
@click.option("--p-in", type=float, required=True, help="Intra-group edge probability.")
@click.option("--p-out", type=float, required=True, help="Inter-group edge probability.")
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--plain", is_flag=True, help="Skip color/kind/weight decoration.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default="-")
def generate(k: int, sizes: str, p_in: float, p_out: float, seed: int, plain: bool, output: str) -> None:
    """Write a seeded planted-partition graph file."""
    try:
        size_list = [int(part) for part in sizes.split(",") if part.strip()]
    except ValueError:
        _die(EXIT_USAGE, f"sizes must be integers, got {sizes!r}")
        return
    try:
        graph = generate_planted_partition(k, size_list, p_in, p_out, seed, decorate=not plain)
    except GroupGraphError as exc:
        _die(EXIT_USAGE, str(exc))
        return
    text = serialize_clustered_graph(graph)
    if output == "-":
        click.echo(text)
    else:
        Path(output).write_text(text + "\n", encoding="utf-8")


def _load_graph(path: str):
    try:
        return load_clustered_graph(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        _die(EXIT_USAGE, f"no such file: {path}")
    except GroupGraphError as exc:
        _die(EXIT_USAGE, str(exc))


def _format_boolean(value: bool) -> str:
    return "yes" if value else "no"


def _format_answer(value) -> str:
    if isinstance(value, bool):
        return _format_boolean(value)
    if isinstance(value, (set, frozenset)):
        return " ".join(sorted(value)) if value else "(empty set)"
    if isinstance(value, (list, tuple)):
        return " ".join(str(item) for item in value) if value else "(empty)"
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


# Operation name -> (needs_geometry, handler(ctx, args)).
_METRIC_OPS = {
    "neighbor-count": False,
    "node-count": False,
    "intra-link-count": False,
    "density": False,
    "max-node-degree": False,
    "min-node-degree": False,
    "area": True,
}

_TEMPLATE_OP_ALIASES = {
    "GO-1": "neighbors", "GO-2": "neighbor-count-of", "GO-3": "extremal",
    "GO-4": "accessible", "GO-5": "accessible-count", "GO-6": "groups-at-distance",
    "GO-7": "common-neighbors", "GO-8": "shortest-group-path", "GO-9": "find-groups",
    "GO-10": "extremal", "GO-11": "are-adjacent", "GO-12": "articulation-groups",
    "GO-13": "count-groups", "GO-14": "extremal", "GN-1": "group-of",
    "GN-2": "metric", "GN-3": "extremal", "GN-4": "same-group", "GN-5": "groups-containing",
    "GL-1": "metric", "GL-2": "extremal", "GL-3": "extremal", "GL-4": "longest-link",
    "GL-5": "groups-with-links", "GX-1": "bridging-pairs", "GX-2": "min-cut",
    "GX-3": "extremal", "GX-4": "path-group-check", "GX-5": "min-groups-path",
}


def _parse_attr_arg(arg: str) -> dict:
    if "=" not in arg:
        raise UnknownIdError(f"predicate argument must look like attr=value, got {arg!r}")
    attribute, value = arg.split("=", 1)
    return {"attribute": attribute, "value": value}


def _run_query(ctx: queries.QueryContext, op: str, args: list[str]) -> str:
    graph = ctx.graph

    def arg(index: int, name: str) -> str:
        if index >= len(args):
            raise UnknownIdError(f"operation {op!r} needs argument <{name}>")
        return args[index]

    if op == "count-groups":
        return _format_answer(queries.count_groups(ctx))
    if op == "neighbors":
        return _format_answer(queries.neighbors(ctx, arg(0, "group")))
    if op == "neighbor-count-of":
        return _format_answer(len(queries.neighbors(ctx, arg(0, "group"))))
    if op == "accessible":
        return _format_answer(queries.accessible(ctx, arg(0, "group")))
    if op == "accessible-count":
        return _format_answer(len(queries.accessible(ctx, arg(0, "group"))))
    if op == "groups-at-distance":
        return _format_answer(queries.groups_at_distance(ctx, arg(0, "group"), int(arg(1, "distance"))))
    if op == "common-neighbors":
        return _format_answer(queries.common_neighbors(ctx, arg(0, "group"), arg(1, "group")))
    if op == "shortest-group-path":
        path = queries.shortest_group_path(ctx, arg(0, "group"), arg(1, "group"))
        return _format_answer(path) if path is not None else "(no path)"
    if op == "find-groups":
        spec = _parse_attr_arg(arg(0, "attr=value"))
        predicate = lambda attrs: str(attrs.get(spec["attribute"])) == spec["value"]  # noqa: E731
        return _format_answer(queries.find_groups(ctx, predicate))
    if op == "are-adjacent":
        return _format_answer(queries.are_adjacent(ctx, arg(0, "group"), arg(1, "group")))
    if op == "articulation-groups":
        return _format_answer(queries.articulation_groups(ctx))
    if op == "group-of":
        return _format_answer(queries.group_of(ctx, arg(0, "node")))
    if op == "same-group":
        return _format_answer(queries.same_group(ctx, arg(0, "node"), arg(1, "node")))
    if op == "groups-containing":
        spec = _parse_attr_arg(arg(0, "attr=value"))
        predicate = lambda attrs: str(attrs.get(spec["attribute"])) == spec["value"]  # noqa: E731
        return _format_answer(queries.groups_containing(ctx, predicate))
    if op == "longest-link":
        location = queries.longest_link_location(ctx)
        return f"{location.edge[0]}-{location.edge[1]} in {_format_answer(location.container)}"
    if op == "groups-with-links":
        which = arg(0, "heaviest|longest")
        if which == "heaviest":
            top = max(edge.effective_weight for edge in graph.edges.values())
            return _format_answer(queries.groups_with_links(ctx, lambda info: info.weight == top))
        if which == "longest":
            layout = ctx.require_layout()
            from .layout import link_length

            top = max(link_length(layout, key) for key in graph.edges)
            return _format_answer(
                queries.groups_with_links(ctx, lambda info: info.length == top, needs_length=True)
            )
        raise UnknownIdError(f"unknown link predicate {which!r}")
    if op == "bridging-pairs":
        pairs = sorted(queries.bridging_group_pairs(ctx))
        return "\n".join(f"{a} {b}" for a, b in pairs) if pairs else "(none)"
    if op == "min-cut":
        return _format_answer(queries.min_intergroup_cut(ctx, arg(0, "group"), arg(1, "group")))
    if op == "path-group-check":
        result = queries.path_group_check(ctx, arg(0, "node"), arg(1, "node"), arg(2, "node"))
        return f"path {_format_boolean(result.path_exists)}, same group {_format_boolean(result.same_group)}"
    if op == "min-groups-path":
        result = queries.min_distinct_groups_path(ctx, arg(0, "node"), arg(1, "node"))
        if result is None:
            return "(no path)"
        suffix = "" if result.exact else " (lower bound)"
        return f"{result.count}{suffix}"
    if op == "extremal":
        kind = arg(0, "metric")
        direction = arg(1, "max|min")
        k = int(args[2]) if len(args) > 2 else 1
        metric = queries.Metric(kind) if kind != "shared-boundary-with" else queries.Metric(kind, reference=arg(3, "group"))
        result = queries.extremal_groups(ctx, metric, direction, k=k)
        suffix = " (tie)" if result.tie else ""
        return " ".join(result.groups) + suffix
    if op == "metric" or op in _METRIC_OPS:
        if op == "metric":
            kind, grp = arg(0, "metric"), arg(1, "group")
            extra = args[2] if len(args) > 2 else None
        else:
            kind, grp = op, arg(0, "group")
            extra = args[1] if len(args) > 1 else None
        metric = (
            queries.Metric("shared-boundary-with", reference=extra)
            if kind == "shared-boundary-with"
            else queries.Metric(kind)
        )
        return _format_answer(queries.group_metric(ctx, grp, metric))
    if op == "shared-boundary-with":
        metric = queries.Metric("shared-boundary-with", reference=arg(1, "reference-group"))
        return _format_answer(queries.group_metric(ctx, arg(0, "group"), metric))
    raise LookupError(op)


_GEOMETRY_OPS = {"longest-link", "area", "shared-boundary-with"}


@main.command()
@click.argument("graph_file", type=click.Path(exists=False))
@click.argument("op")
@click.argument("args", nargs=-1)
@click.option("--layout-seed", type=int, default=1, show_default=True)
@click.option("--no-geometry", is_flag=True, help="Never compute layout/raster.")
def query(graph_file: str, op: str, args: tuple[str, ...], layout_seed: int, no_geometry: bool) -> None:
    """Run one operation (by name or template id) against a graph file."""
    graph = _load_graph(graph_file)
    resolved = _TEMPLATE_OP_ALIASES.get(op, op)
    needs_geometry = (
        resolved in _GEOMETRY_OPS
        or (resolved == "metric" and args and args[0] in ("area", "shared-boundary-with"))
        or (resolved == "extremal" and args and args[0] in ("area", "shared-boundary-with"))
        or (resolved == "groups-with-links" and args and args[0] == "longest")
    )
    if needs_geometry and no_geometry:
        _die(EXIT_INAPPLICABLE, f"operation {op!r} needs geometry but --no-geometry was given")
    ctx = build_context(graph, seed=layout_seed, with_geometry=needs_geometry)
    try:
        click.echo(_run_query(ctx, resolved, list(args)))
    except LookupError:
        _die(EXIT_USAGE, f"unknown operation {op!r}")
    except (UndefinedMetricError, MissingGeometryError, InapplicableTemplateError) as exc:
        _die(EXIT_INAPPLICABLE, str(exc))
    except GroupGraphError as exc:
        _die(EXIT_USAGE, str(exc))
    except ValueError as exc:
        _die(EXIT_USAGE, str(exc))


@main.command(name="bundle")
@click.argument("graph_file", type=click.Path(exists=False))
@click.option("--templates", default="all", show_default=True, help="'all' or comma-separated ids.")
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--study-id", default=None)
@click.option("--reveal-correctness", is_flag=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default="-")
def bundle_cmd(graph_file: str, templates: str, seed: int, study_id: str | None,
               reveal_correctness: bool, output: str) -> None:
    """Build a study bundle (stimulus + instances + answer key) from a graph."""
    graph = _load_graph(graph_file)
    template_ids: str | list[str] = "all" if templates == "all" else [
        part.strip() for part in templates.split(",") if part.strip()
    ]
    if template_ids != "all":
        for template_id in template_ids:
            try:
                tasks.get_template(template_id)
            except UnknownIdError as exc:
                _die(EXIT_USAGE, str(exc))
    try:
        built = build_bundle(
            graph, template_ids, seed, study_id=study_id, reveal_correctness=reveal_correctness
        )
    except InapplicableTemplateError as exc:
        _die(EXIT_INAPPLICABLE, str(exc))
        return
    text = bundle_to_json(built)
    if output == "-":
        click.echo(text)
    else:
        Path(output).write_text(text + "\n", encoding="utf-8")
        click.echo(f"wrote {output}: {len(built['instances'])} instances", err=True)


@main.command()
@click.argument("storage_dir", type=click.Path(file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(storage_dir: str, host: str, port: int) -> None:
    """Run the study service over HTTP, persisting under STORAGE_DIR."""
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError:
        _die(EXIT_PORT, f"port {port} is already in use on {host}")
        return
    finally:
        probe.close()

    import uvicorn

    from .service import StudyService, create_app

    service = StudyService(storage_dir)
    app = create_app(service)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.argument("results_file", type=click.Path(exists=False))
@click.option("--bundle", "bundle_file", required=True, type=click.Path(exists=False))
def score(results_file: str, bundle_file: str) -> None:
    """Rescore an exported results file offline and report divergences."""
    try:
        export = json.loads(Path(results_file).read_text(encoding="utf-8"))
        built = json.loads(Path(bundle_file).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        _die(EXIT_USAGE, str(exc))
        return
    except json.JSONDecodeError as exc:
        _die(EXIT_USAGE, f"not valid JSON: {exc}")
        return
    divergences = 0
    for record in export.get("records", []):
        instance = instance_for_scoring(built, record["instance_id"])
        try:
            rescored = tasks.score(instance, record["answer"]).correct
        except GroupGraphError:
            rescored = False
        if rescored != record["correct"]:
            divergences += 1
            click.echo(
                f"divergence: {record['instance_id']} session {record['session_id']}: "
                f"recorded {record['correct']}, rescored {rescored}"
            )
    click.echo(f"{divergences} divergences in {len(export.get('records', []))} records")


if __name__ == "__main__":
    main()
