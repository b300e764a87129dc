/**
 * SVG stimulus renderer: colored padded hulls per group, edges, labeled
 * node glyphs, an optional raster-region outline overlay, and pan/zoom.
 *
 * Rendering is read-only with respect to study state; interaction is
 * surfaced as selection callbacks that the widget layer consumes.
 */

import {
  centroid,
  paddedHull,
  pathFrom,
  regionOutline,
  segmentsPath,
  type Point,
} from "./geometry.js";
import type { GraphDoc, LayoutDoc } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const FALLBACK_COLORS = [
  "#e6550d", "#3182bd", "#31a354", "#756bb1", "#636363",
  "#fd8d3c", "#6baed6", "#74c476", "#9e9ac8", "#969696",
];
const HULL_PADDING = 26;
const NODE_RADIUS = 9;

export interface SceneCallbacks {
  onGroupClick?(groupId: string): void;
  onNodeClick?(nodeId: string): void;
}

export interface Scene {
  readonly svg: SVGSVGElement;
  /** Re-tint hulls/nodes to reflect the current widget selection. */
  setSelection(ids: string[]): void;
  /** Show or hide the exact raster-region outlines. */
  showRegions(visible: boolean): void;
  destroy(): void;
}

export class StimulusMismatchError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "StimulusMismatchError";
  }
}

function groupColor(graph: GraphDoc, groupId: string): string {
  const group = graph.groups.find((g) => g.id === groupId);
  const color = group?.attributes?.["color"];
  if (typeof color === "string" && color) return color;
  const index = graph.groups.findIndex((g) => g.id === groupId);
  return FALLBACK_COLORS[(index + FALLBACK_COLORS.length) % FALLBACK_COLORS.length];
}

function element<K extends keyof SVGElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const node = doc.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

export function renderStimulus(
  container: HTMLElement,
  graph: GraphDoc,
  layout: LayoutDoc,
  callbacks: SceneCallbacks = {},
): Scene {
  for (const node of graph.nodes) {
    if (!(node.id in layout.positions)) {
      throw new StimulusMismatchError(`layout has no position for node ${node.id}`);
    }
  }
  const doc = container.ownerDocument;
  const [width, height] = layout.canvas;
  const svg = element(doc, "svg", {
    viewBox: `0 0 ${width} ${height}`,
    class: "stimulus",
    role: "img",
  });

  const hullLayer = element(doc, "g", { class: "hulls" });
  const regionLayer = element(doc, "g", { class: "regions", visibility: "hidden" });
  const edgeLayer = element(doc, "g", { class: "edges" });
  const nodeLayer = element(doc, "g", { class: "nodes" });
  svg.append(hullLayer, regionLayer, edgeLayer, nodeLayer);

  const members = new Map<string, string[]>();
  for (const group of graph.groups) members.set(group.id, []);
  for (const [nodeId, groupId] of Object.entries(graph.membership)) {
    members.get(groupId)?.push(nodeId);
  }

  const hullByGroup = new Map<string, SVGPathElement>();
  for (const group of graph.groups) {
    const points: Point[] = (members.get(group.id) ?? []).map(
      (nid) => layout.positions[nid] as Point,
    );
    if (points.length === 0) continue;
    const hull = paddedHull(points, HULL_PADDING);
    const path = element(doc, "path", {
      d: pathFrom(hull),
      fill: groupColor(graph, group.id),
      "fill-opacity": "0.28",
      stroke: groupColor(graph, group.id),
      "stroke-width": "1.5",
      "data-group": group.id,
      class: "hull",
    });
    path.addEventListener("click", () => callbacks.onGroupClick?.(group.id));
    hullLayer.append(path);
    hullByGroup.set(group.id, path);

    const [lx, ly] = centroid(hull);
    const label = element(doc, "text", {
      x: lx.toFixed(1),
      y: ly.toFixed(1),
      class: "group-label",
      "text-anchor": "middle",
      "pointer-events": "none",
    });
    label.textContent = group.label || group.id;
    hullLayer.append(label);
  }

  if (layout.regions && layout.raster) {
    for (const group of graph.groups) {
      const outline = segmentsPath(regionOutline(layout, group.id));
      if (!outline) continue;
      regionLayer.append(
        element(doc, "path", {
          d: outline,
          fill: "none",
          stroke: groupColor(graph, group.id),
          "stroke-width": "1",
          "stroke-dasharray": "3 2",
          "data-region": group.id,
        }),
      );
    }
  }

  for (const edge of graph.edges) {
    const [x1, y1] = layout.positions[edge.source];
    const [x2, y2] = layout.positions[edge.target];
    edgeLayer.append(
      element(doc, "line", {
        x1: x1.toFixed(1),
        y1: y1.toFixed(1),
        x2: x2.toFixed(1),
        y2: y2.toFixed(1),
        class: "edge",
        stroke: "#444",
        "stroke-width": "1.2",
      }),
    );
  }

  const nodeById = new Map<string, SVGCircleElement>();
  for (const node of graph.nodes) {
    const [x, y] = layout.positions[node.id];
    const glyph = element(doc, "circle", {
      cx: x.toFixed(1),
      cy: y.toFixed(1),
      r: String(NODE_RADIUS),
      class: "node",
      fill: "#fff",
      stroke: "#222",
      "stroke-width": "1.5",
      "data-node": node.id,
    });
    glyph.addEventListener("click", (event) => {
      event.stopPropagation();
      callbacks.onNodeClick?.(node.id);
    });
    nodeLayer.append(glyph);
    nodeById.set(node.id, glyph);
    const label = element(doc, "text", {
      x: x.toFixed(1),
      y: (y - NODE_RADIUS - 3).toFixed(1),
      class: "node-label",
      "text-anchor": "middle",
      "pointer-events": "none",
    });
    label.textContent = node.label || node.id;
    nodeLayer.append(label);
  }

  // pan/zoom via the viewBox
  let view = { x: 0, y: 0, w: width, h: height };
  const applyView = () => {
    svg.setAttribute("viewBox", `${view.x} ${view.y} ${view.w} ${view.h}`);
  };
  const onWheel = (event: WheelEvent) => {
    event.preventDefault();
    const factor = event.deltaY > 0 ? 1.15 : 1 / 1.15;
    const next = Math.min(Math.max(view.w * factor, width / 16), width * 2);
    const scale = next / view.w;
    view = {
      x: view.x + (view.w - view.w * scale) / 2,
      y: view.y + (view.h - view.h * scale) / 2,
      w: view.w * scale,
      h: view.h * scale,
    };
    applyView();
  };
  let dragging: { px: number; py: number } | null = null;
  const onDown = (event: MouseEvent) => {
    dragging = { px: event.clientX, py: event.clientY };
  };
  const onMove = (event: MouseEvent) => {
    if (!dragging) return;
    const unit = view.w / (svg.clientWidth || width);
    view.x -= (event.clientX - dragging.px) * unit;
    view.y -= (event.clientY - dragging.py) * unit;
    dragging = { px: event.clientX, py: event.clientY };
    applyView();
  };
  const onUp = () => {
    dragging = null;
  };
  svg.addEventListener("wheel", onWheel, { passive: false });
  svg.addEventListener("mousedown", onDown);
  svg.addEventListener("mousemove", onMove);
  svg.addEventListener("mouseup", onUp);
  svg.addEventListener("mouseleave", onUp);

  container.append(svg);

  return {
    svg,
    setSelection(ids: string[]): void {
      const selected = new Set(ids);
      for (const [gid, path] of hullByGroup) {
        path.setAttribute("fill-opacity", selected.has(gid) ? "0.55" : "0.28");
        path.setAttribute("stroke-width", selected.has(gid) ? "3" : "1.5");
      }
      for (const [nid, glyph] of nodeById) {
        glyph.setAttribute("fill", selected.has(nid) ? "#ffd54d" : "#fff");
      }
    },
    showRegions(visible: boolean): void {
      regionLayer.setAttribute("visibility", visible ? "visible" : "hidden");
    },
    destroy(): void {
      svg.remove();
    },
  };
}
