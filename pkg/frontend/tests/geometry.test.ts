import { describe, expect, it } from "vitest";

import { scaleRect } from "../src/geometry.js";

describe("scaleRect", () => {
  it("doubles coordinates on a 2x render", () => {
    const rect = scaleRect([10, 10, 50, 50], 100, 80, 200, 160);
    expect(rect).toEqual({ left: 20, top: 20, width: 100, height: 100 });
  });

  it("halves coordinates on a 0.5x render", () => {
    const rect = scaleRect([8, 12, 40, 24], 160, 120, 80, 60);
    expect(rect).toEqual({ left: 4, top: 6, width: 20, height: 12 });
  });

  it("scales axes independently when aspect changes", () => {
    const rect = scaleRect([10, 20, 30, 40], 100, 200, 300, 100);
    // sx = 3, sy = 0.5
    expect(rect).toEqual({ left: 30, top: 10, width: 90, height: 20 });
  });

  it("keeps the rectangle inside the rendered image", () => {
    const rect = scaleRect([50, 30, 50, 50], 100, 80, 250, 200);
    expect(rect.left + rect.width).toBeLessThanOrEqual(250);
    expect(rect.top + rect.height).toBeLessThanOrEqual(200);
  });
});
