"""Deterministic node layout and discretized group-region geometry.

Positions come from a seeded force-directed run: spring attraction on edges
(stronger across groups), pairwise repulsion, a cohesion pull toward each
node's group centroid, and a weak gravity toward the canvas center so
components do not drift to the walls.  Regions are a discrete Voronoi
partition of the canvas with a distance cutoff: each grid cell belongs to
the group of its nearest node when that node is within ``reach``, else to
the background.  Areas, shared boundaries, and link lengths are all read
off this geometry.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import GeometryError, UnknownIdError, ValidationError
from .model import ClusteredGraph, Edge

DEFAULT_CANVAS = (1000.0, 1000.0)
DEFAULT_ITERATIONS = 300
DEFAULT_CELL_SIZE = 5.0
DEFAULT_REACH = 40.0

# Fixed ideal edge length (not density-adaptive): linked groups must land
# within 2*reach of each other for region contact under the default raster.
_IDEAL_LENGTH = 50.0
_COHESION = 0.12
_GRAVITY = 0.015
_INTER_ATTRACTION = 2.5


@dataclass(frozen=True)
class LayoutGeometry:
    positions: dict[str, tuple[float, float]]
    canvas: tuple[float, float]
    seed: int

    def position(self, node_id: str) -> tuple[float, float]:
        if node_id not in self.positions:
            raise UnknownIdError(f"no position for node {node_id!r}")
        return self.positions[node_id]

    def to_dict(self) -> dict[str, Any]:
        return {
            "canvas": [self.canvas[0], self.canvas[1]],
            "seed": self.seed,
            "positions": {nid: [x, y] for nid, (x, y) in sorted(self.positions.items())},
        }


@dataclass(frozen=True, eq=False)
class RegionRaster:
    """Grid assignment of canvas cells to groups (-1 encodes background).

    ``assignment`` has shape (ny, nx), row-major over cell rows; the flat
    index of cell (ix, iy) is ``iy * nx + ix``.  Per-group cell counts and
    per-pair 4-neighbor boundary tallies are precomputed.
    """

    cell_size: float
    reach: float
    nx: int
    ny: int
    group_ids: tuple[str, ...]
    assignment: np.ndarray = field(repr=False)
    cell_counts: dict[str, int] = field(repr=False)
    boundary_counts: dict[tuple[str, str], int] = field(repr=False)

    def cells_of(self, group_id: str) -> list[int]:
        code = self._code(group_id)
        ys, xs = np.nonzero(self.assignment == code)
        return sorted(int(y) * self.nx + int(x) for y, x in zip(ys, xs))

    def _code(self, group_id: str) -> int:
        try:
            return self.group_ids.index(group_id)
        except ValueError:
            raise UnknownIdError(f"unknown group {group_id!r}") from None

    def regions_dict(self) -> dict[str, list[int]]:
        return {gid: self.cells_of(gid) for gid in self.group_ids}


def compute_layout(
    graph: ClusteredGraph,
    seed: int,
    iterations: int = DEFAULT_ITERATIONS,
    canvas: tuple[float, float] = DEFAULT_CANVAS,
) -> LayoutGeometry:
    """Run the seeded force-directed layout; identical inputs give identical output.

    Nodes start on a circle around the canvas center at a seeded rotation
    (antipodal pairs are exact negations, so a two-node system stays
    symmetric about the center).  A single node sits exactly at the center.
    """
    if graph.node_count == 0:
        raise ValidationError("cannot lay out an empty graph")
    width, height = float(canvas[0]), float(canvas[1])
    if width <= 0 or height <= 0:
        raise GeometryError(f"degenerate canvas: {canvas!r}")
    ids = list(graph.node_ids)
    n = len(ids)
    cx, cy = width / 2.0, height / 2.0
    if n == 1:
        return LayoutGeometry(positions={ids[0]: (cx, cy)}, canvas=(width, height), seed=seed)

    rng = random.Random(seed)
    theta0 = rng.uniform(0.0, 2.0 * math.pi)
    radius = 0.25 * min(width, height)
    offsets = np.zeros((n, 2), dtype=np.float64)
    half = n // 2
    limit = half if n % 2 == 0 else n
    for index in range(limit):
        angle = theta0 + 2.0 * math.pi * index / n
        offsets[index, 0] = radius * math.cos(angle)
        offsets[index, 1] = radius * math.sin(angle)
    if n % 2 == 0:
        offsets[half:] = -offsets[:half]
    pos = offsets + np.array([cx, cy])

    index_of = {nid: i for i, nid in enumerate(ids)}
    edge_u = np.array([index_of[a] for (a, b) in graph.edges], dtype=np.intp)
    edge_v = np.array([index_of[b] for (a, b) in graph.edges], dtype=np.intp)
    # Inter-group springs pull harder so linked groups come into region contact.
    strength = np.array(
        [
            _INTER_ATTRACTION if graph.membership[a] != graph.membership[b] else 1.0
            for (a, b) in graph.edges
        ],
        dtype=np.float64,
    )
    group_ids = list(graph.group_ids)
    gindex = np.array([group_ids.index(graph.membership[nid]) for nid in ids], dtype=np.intp)
    group_sizes = np.bincount(gindex, minlength=len(group_ids)).astype(np.float64)

    k_ideal = _IDEAL_LENGTH
    k_sq = k_ideal * k_ideal
    t0 = 0.1 * min(width, height)
    center = np.array([cx, cy])

    for iteration in range(iterations):
        temperature = t0 * (1.0 - iteration / iterations)
        delta = pos[:, None, :] - pos[None, :, :]
        dist_sq = (delta ** 2).sum(axis=-1)
        np.fill_diagonal(dist_sq, 1.0)
        dist_sq = np.maximum(dist_sq, 1e-9)
        disp = ((k_sq / dist_sq)[:, :, None] * delta).sum(axis=1)

        if len(edge_u):
            dv = pos[edge_u] - pos[edge_v]
            dist = np.sqrt(np.maximum((dv ** 2).sum(axis=-1), 1e-18))
            pull = dv * (strength * dist / k_ideal)[:, None]
            np.subtract.at(disp, edge_u, pull)
            np.add.at(disp, edge_v, pull)

        centroid_sum = np.zeros((len(group_ids), 2), dtype=np.float64)
        np.add.at(centroid_sum, gindex, pos)
        centroids = centroid_sum / group_sizes[:, None]
        disp += _COHESION * (centroids[gindex] - pos)
        disp += _GRAVITY * (center - pos)

        lengths = np.sqrt(np.maximum((disp ** 2).sum(axis=-1), 1e-18))
        scale = np.minimum(1.0, temperature / lengths)
        pos = pos + disp * scale[:, None]
        np.clip(pos[:, 0], 0.0, width, out=pos[:, 0])
        np.clip(pos[:, 1], 0.0, height, out=pos[:, 1])

    positions = {nid: (float(pos[i, 0]), float(pos[i, 1])) for i, nid in enumerate(ids)}
    return LayoutGeometry(positions=positions, canvas=(width, height), seed=seed)


def rasterize_regions(
    layout: LayoutGeometry,
    graph: ClusteredGraph,
    cell_size: float = DEFAULT_CELL_SIZE,
    reach: float = DEFAULT_REACH,
) -> RegionRaster:
    """Assign grid cells to the group of the nearest node within ``reach``.

    Cells are tested at their centers; distance ties go to the smaller node
    id (nodes are scanned in id order with a strict-improvement update).
    """
    if cell_size <= 0 or reach <= 0:
        raise GeometryError(f"cell_size and reach must be positive, got {cell_size}, {reach}")
    width, height = layout.canvas
    if cell_size > width or cell_size > height:
        raise GeometryError(f"degenerate grid: cell_size {cell_size} exceeds canvas {layout.canvas}")
    missing = [nid for nid in graph.nodes if nid not in layout.positions]
    if missing:
        raise ValidationError(f"layout is missing positions for nodes: {missing[:3]}")

    nx = int(math.ceil(width / cell_size))
    ny = int(math.ceil(height / cell_size))
    centers_x = (np.arange(nx, dtype=np.float64) + 0.5) * cell_size
    centers_y = (np.arange(ny, dtype=np.float64) + 0.5) * cell_size

    group_ids = tuple(sorted(graph.groups))
    code_of = {gid: i for i, gid in enumerate(group_ids)}

    best_sq = np.full((ny, nx), np.inf, dtype=np.float64)
    best_code = np.full((ny, nx), -1, dtype=np.int32)
    for nid in graph.node_ids:
        px, py = layout.positions[nid]
        d_sq = (centers_x[None, :] - px) ** 2 + (centers_y[:, None] - py) ** 2
        closer = d_sq < best_sq
        best_sq[closer] = d_sq[closer]
        best_code[closer] = code_of[graph.membership[nid]]
    best_code[best_sq > reach * reach] = -1

    counts = {gid: int((best_code == code_of[gid]).sum()) for gid in group_ids}
    boundary: dict[tuple[str, str], int] = {}

    def _tally(side_a: np.ndarray, side_b: np.ndarray) -> None:
        mask = (side_a != side_b) & (side_a >= 0) & (side_b >= 0)
        if not mask.any():
            return
        lo = np.minimum(side_a[mask], side_b[mask])
        hi = np.maximum(side_a[mask], side_b[mask])
        pairs, tallies = np.unique(np.stack([lo, hi], axis=1), axis=0, return_counts=True)
        for (ca, cb), tally in zip(pairs, tallies):
            key = (group_ids[ca], group_ids[cb])
            boundary[key] = boundary.get(key, 0) + int(tally)

    _tally(best_code[:, :-1], best_code[:, 1:])
    _tally(best_code[:-1, :], best_code[1:, :])

    return RegionRaster(
        cell_size=float(cell_size),
        reach=float(reach),
        nx=nx,
        ny=ny,
        group_ids=group_ids,
        assignment=best_code,
        cell_counts=counts,
        boundary_counts=boundary,
    )


def group_area(raster: RegionRaster, group_id: str) -> float:
    """Area owned by a group: cell count times cell_size squared."""
    if group_id not in raster.cell_counts:
        raise UnknownIdError(f"unknown group {group_id!r}")
    return raster.cell_counts[group_id] * raster.cell_size * raster.cell_size


def background_area(raster: RegionRaster) -> float:
    background_cells = raster.nx * raster.ny - sum(raster.cell_counts.values())
    return background_cells * raster.cell_size * raster.cell_size


def shared_boundary_length(raster: RegionRaster, group_a: str, group_b: str) -> float:
    """Length of the 4-neighbor cell boundary between two distinct groups."""
    for gid in (group_a, group_b):
        if gid not in raster.cell_counts:
            raise UnknownIdError(f"unknown group {gid!r}")
    if group_a == group_b:
        raise ValidationError("shared boundary requires two distinct groups")
    key = (group_a, group_b) if group_a <= group_b else (group_b, group_a)
    return raster.boundary_counts.get(key, 0) * raster.cell_size


def link_length(layout: LayoutGeometry, edge: Edge | tuple[str, str]) -> float:
    endpoints = edge.endpoints if isinstance(edge, Edge) else tuple(edge)
    ax, ay = layout.position(endpoints[0])
    bx, by = layout.position(endpoints[1])
    return math.hypot(bx - ax, by - ay)


def layout_to_dict(layout: LayoutGeometry, raster: RegionRaster | None = None) -> dict[str, Any]:
    """Layout export consumed by the study UI; regions included when rasterized."""
    out = layout.to_dict()
    if raster is not None:
        out["raster"] = {
            "cell_size": raster.cell_size,
            "reach": raster.reach,
            "nx": raster.nx,
            "ny": raster.ny,
        }
        out["regions"] = raster.regions_dict()
    return out
