import { describe, expect, it } from "vitest";

import {
  centroid,
  convexHull,
  paddedHull,
  pathFrom,
  polygonArea,
  polygonContains,
  regionOutline,
  segmentsPath,
  type Point,
} from "../src/geometry.js";
import type { LayoutDoc } from "../src/types.js";

describe("convexHull", () => {
  it("drops interior points", () => {
    const square: Point[] = [
      [0, 0],
      [10, 0],
      [10, 10],
      [0, 10],
      [5, 5],
      [2, 3],
    ];
    const hull = convexHull(square);
    expect(hull).toHaveLength(4);
    for (const corner of [
      [0, 0],
      [10, 0],
      [10, 10],
      [0, 10],
    ]) {
      expect(hull).toContainEqual(corner);
    }
  });

  it("handles fewer than three points", () => {
    expect(convexHull([[1, 2]])).toEqual([[1, 2]]);
    expect(convexHull([[3, 4], [1, 2]])).toEqual([
      [1, 2],
      [3, 4],
    ]);
  });

  it("handles collinear points", () => {
    const hull = convexHull([
      [0, 0],
      [5, 0],
      [10, 0],
    ]);
    expect(hull.length).toBeGreaterThanOrEqual(2);
    expect(hull).toContainEqual([0, 0]);
    expect(hull).toContainEqual([10, 0]);
  });

  it("every input point lies inside or on the hull (random check)", () => {
    // deterministic LCG so the test never flakes
    let state = 12345;
    const rand = () => ((state = (state * 48271) % 2147483647) / 2147483647) * 100;
    for (let trial = 0; trial < 20; trial++) {
      const points: Point[] = Array.from({ length: 30 }, () => [rand(), rand()]);
      const hull = convexHull(points);
      const grown = paddedHull(points, 0.01, 24);
      for (const p of points) {
        expect(polygonContains(grown, p) || hull.some(([x, y]) => x === p[0] && y === p[1])).toBe(
          true,
        );
      }
    }
  });
});

describe("paddedHull", () => {
  it("contains all originals with margin", () => {
    const points: Point[] = [
      [100, 100],
      [150, 120],
      [120, 180],
    ];
    const hull = paddedHull(points, 20);
    for (const p of points) {
      expect(polygonContains(hull, p)).toBe(true);
      // a point nudged by less than the padding stays inside
      expect(polygonContains(hull, [p[0] + 15, p[1]])).toBe(true);
    }
    expect(polygonArea(hull)).toBeGreaterThan(polygonArea(convexHull(points)));
  });

  it("single point becomes a disc-like polygon", () => {
    const hull = paddedHull([[50, 50]], 10);
    expect(hull.length).toBeGreaterThanOrEqual(8);
    expect(polygonContains(hull, [50, 50])).toBe(true);
    expect(polygonContains(hull, [58, 50])).toBe(true);
    expect(polygonContains(hull, [61, 50])).toBe(false);
  });

  it("two points become a capsule-like polygon", () => {
    const hull = paddedHull(
      [
        [0, 0],
        [40, 0],
      ],
      10,
    );
    expect(polygonContains(hull, [20, 0])).toBe(true);
    expect(polygonContains(hull, [20, 8])).toBe(true);
    expect(polygonContains(hull, [20, 12])).toBe(false);
  });

  it("empty input yields empty hull", () => {
    expect(paddedHull([], 10)).toEqual([]);
  });
});

describe("path building", () => {
  it("pathFrom closes the polygon", () => {
    const path = pathFrom([
      [0, 0],
      [10, 0],
      [10, 10],
    ]);
    expect(path.startsWith("M0.00 0.00")).toBe(true);
    expect(path.endsWith("Z")).toBe(true);
  });

  it("centroid averages", () => {
    expect(
      centroid([
        [0, 0],
        [10, 0],
        [10, 10],
        [0, 10],
      ]),
    ).toEqual([5, 5]);
  });
});

describe("regionOutline", () => {
  const layout: LayoutDoc = {
    canvas: [20, 20],
    seed: 0,
    positions: {},
    raster: { cell_size: 5, reach: 10, nx: 4, ny: 4 },
    // a 2x1 horizontal block: cells (1,1) and (2,1) -> indices 5 and 6
    regions: { A: [5, 6], B: [] },
  };

  it("emits the exposed edges of the block", () => {
    const segments = regionOutline(layout, "A");
    // 2x1 block: perimeter = 2 horizontal tops + 2 bottoms + 2 vertical ends
    expect(segments).toHaveLength(6);
    const path = segmentsPath(segments);
    expect(path).toContain("M5.00 5.00");
  });

  it("empty region or missing metadata yields nothing", () => {
    expect(regionOutline(layout, "B")).toEqual([]);
    expect(regionOutline({ ...layout, raster: undefined }, "A")).toEqual([]);
    expect(regionOutline(layout, "missing")).toEqual([]);
  });

  it("respects row boundaries (no wraparound)", () => {
    const wrapped: LayoutDoc = {
      ...layout,
      // cells 3 (end of row 0) and 4 (start of row 1) are NOT neighbors
      regions: { A: [3, 4] },
    };
    const segments = regionOutline(wrapped, "A");
    expect(segments).toHaveLength(8); // two isolated cells, 4 edges each
  });
});
