"""Metagraph derivation: groups as metanodes, inter-group structure as metaedges.

Two variants exist.  The link-based metagraph has a metaedge wherever at
least one node-level edge joins two groups, weighted by the count of such
edges.  The contact-based metagraph has a metaedge wherever two group
regions share a positive raster boundary, weighted by that boundary length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .errors import UnknownIdError, ValidationError
from .layout import RegionRaster
from .model import ClusteredGraph

LINK_BASED = "link-based"
CONTACT_BASED = "contact-based"


@dataclass(frozen=True)
class Metagraph:
    variant: str
    metanodes: tuple[str, ...]
    metaedges: dict[tuple[str, str], float]

    def __post_init__(self) -> None:
        if self.variant not in (LINK_BASED, CONTACT_BASED):
            raise ValidationError(f"unknown metagraph variant {self.variant!r}")
        known = set(self.metanodes)
        for (a, b), weight in self.metaedges.items():
            if a == b:
                raise ValidationError(f"self-loop metaedge at {a!r}")
            if a > b:
                raise ValidationError(f"metaedge key {a!r},{b!r} is not sorted")
            if a not in known or b not in known:
                raise ValidationError(f"metaedge references unknown metanode: {a}-{b}")
            if weight <= 0:
                raise ValidationError(f"metaedge {a}-{b} must have positive weight")

    def has_metanode(self, group_id: str) -> bool:
        return group_id in self.metanodes

    def require(self, group_id: str) -> None:
        if group_id not in self.metanodes:
            raise UnknownIdError(f"unknown group {group_id!r}")

    def has_edge(self, a: str, b: str) -> bool:
        key = (a, b) if a <= b else (b, a)
        return key in self.metaedges

    def weight(self, a: str, b: str) -> float:
        key = (a, b) if a <= b else (b, a)
        if key not in self.metaedges:
            raise UnknownIdError(f"no metaedge {a}-{b}")
        return self.metaedges[key]

    def neighbors(self, group_id: str) -> frozenset[str]:
        self.require(group_id)
        out = set()
        for (a, b) in self.metaedges:
            if a == group_id:
                out.add(b)
            elif b == group_id:
                out.add(a)
        return frozenset(out)

    def adjacency(self) -> dict[str, frozenset[str]]:
        return {gid: self.neighbors(gid) for gid in self.metanodes}

    def to_dict(self) -> dict[str, Any]:
        return {
            "variant": self.variant,
            "nodes": [{"id": gid} for gid in self.metanodes],
            "edges": [
                {"source": a, "target": b, "weight": self.metaedges[(a, b)]}
                for (a, b) in sorted(self.metaedges)
            ],
        }


def build_link_metagraph(graph: ClusteredGraph, min_weight: int = 1) -> Metagraph:
    """Metaedge per group pair joined by >= min_weight node-level edges.

    The default threshold is presence (a single link suffices); larger
    cutoffs are a stimulus-design filter, not a different semantics.
    """
    if min_weight < 1:
        raise ValidationError("min_weight must be >= 1")
    metaedges = {
        pair: float(count)
        for pair, count in graph.inter_group_edge_counts().items()
        if count >= min_weight
    }
    return Metagraph(variant=LINK_BASED, metanodes=graph.group_ids, metaedges=metaedges)


def build_contact_metagraph(raster: RegionRaster, graph: ClusteredGraph) -> Metagraph:
    """Metaedge per group pair with positive shared boundary, weighted by length."""
    if set(raster.group_ids) != set(graph.groups):
        raise ValidationError("raster/graph group-set mismatch")
    metaedges = {
        pair: count * raster.cell_size
        for pair, count in raster.boundary_counts.items()
        if count > 0
    }
    return Metagraph(variant=CONTACT_BASED, metanodes=graph.group_ids, metaedges=metaedges)


def serialize_metagraph(meta: Metagraph) -> str:
    from .model import canonical_json

    return canonical_json(meta.to_dict())
