/** Pure geometry for group hulls and raster-region outlines. */

import type { LayoutDoc } from "./types.js";

export type Point = [number, number];

/** Convex hull (Andrew monotone chain), counterclockwise, no repeated last point. */
export function convexHull(points: Point[]): Point[] {
  const unique = Array.from(new Map(points.map((p) => [`${p[0]},${p[1]}`, p])).values());
  if (unique.length <= 2) return unique.slice().sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  const sorted = unique.slice().sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  const cross = (o: Point, a: Point, b: Point) =>
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  const lower: Point[] = [];
  for (const p of sorted) {
    while (lower.length >= 2 && cross(lower[lower.length - 2], lower[lower.length - 1], p) <= 0) {
      lower.pop();
    }
    lower.push(p);
  }
  const upper: Point[] = [];
  for (const p of sorted.slice().reverse()) {
    while (upper.length >= 2 && cross(upper[upper.length - 2], upper[upper.length - 1], p) <= 0) {
      upper.pop();
    }
    upper.push(p);
  }
  lower.pop();
  upper.pop();
  return lower.concat(upper);
}

function circleSamples(center: Point, radius: number, steps: number): Point[] {
  const out: Point[] = [];
  for (let i = 0; i < steps; i++) {
    const angle = (2 * Math.PI * i) / steps;
    out.push([center[0] + radius * Math.cos(angle), center[1] + radius * Math.sin(angle)]);
  }
  return out;
}

/**
 * Padded convex hull: the hull of a disc of radius `padding` around every
 * input point. Uniform margin for any point count, including 1, 2, or
 * collinear sets.
 */
export function paddedHull(points: Point[], padding: number, steps = 16): Point[] {
  if (points.length === 0) return [];
  const samples = points.flatMap((p) => circleSamples(p, padding, steps));
  return convexHull(samples);
}

export function polygonContains(polygon: Point[], p: Point): boolean {
  let inside = false;
  for (let i = 0, j = polygon.length - 1; i < polygon.length; j = i++) {
    const [xi, yi] = polygon[i];
    const [xj, yj] = polygon[j];
    if (yi > p[1] !== yj > p[1] && p[0] < ((xj - xi) * (p[1] - yi)) / (yj - yi) + xi) {
      inside = !inside;
    }
  }
  return inside;
}

export function polygonArea(polygon: Point[]): number {
  let area = 0;
  for (let i = 0, j = polygon.length - 1; i < polygon.length; j = i++) {
    area += (polygon[j][0] + polygon[i][0]) * (polygon[j][1] - polygon[i][1]);
  }
  return Math.abs(area) / 2;
}

export function centroid(points: Point[]): Point {
  const sx = points.reduce((acc, p) => acc + p[0], 0);
  const sy = points.reduce((acc, p) => acc + p[1], 0);
  return [sx / points.length, sy / points.length];
}

export function pathFrom(polygon: Point[]): string {
  if (polygon.length === 0) return "";
  const parts = polygon.map(
    ([x, y], index) => `${index === 0 ? "M" : "L"}${x.toFixed(2)} ${y.toFixed(2)}`,
  );
  return `${parts.join(" ")} Z`;
}

export interface Segment {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

/**
 * Boundary segments of one group's raster region: the grid edges between an
 * owned cell and anything else. This is the exact ground-truth geometry, so
 * the overlay participants see for area/boundary questions matches what is
 * scored.
 */
export function regionOutline(layout: LayoutDoc, groupId: string): Segment[] {
  const raster = layout.raster;
  const regions = layout.regions;
  if (!raster || !regions || !(groupId in regions)) return [];
  const { cell_size: size, nx } = raster;
  const owned = new Set(regions[groupId]);
  const segments: Segment[] = [];
  for (const index of regions[groupId]) {
    const ix = index % nx;
    const iy = Math.floor(index / nx);
    const x = ix * size;
    const y = iy * size;
    if (!owned.has(index - nx)) segments.push({ x1: x, y1: y, x2: x + size, y2: y });
    if (!owned.has(index + nx)) segments.push({ x1: x, y1: y + size, x2: x + size, y2: y + size });
    if (ix === 0 || !owned.has(index - 1)) segments.push({ x1: x, y1: y, x2: x, y2: y + size });
    if (ix === nx - 1 || !owned.has(index + 1)) {
      segments.push({ x1: x + size, y1: y, x2: x + size, y2: y + size });
    }
  }
  return segments;
}

export function segmentsPath(segments: Segment[]): string {
  return segments
    .map((s) => `M${s.x1.toFixed(2)} ${s.y1.toFixed(2)} L${s.x2.toFixed(2)} ${s.y2.toFixed(2)}`)
    .join(" ");
}
