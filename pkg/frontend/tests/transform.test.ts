import { describe, expect, it } from "vitest";
import { Transform } from "../src/transform";

const tr = new Transform(0.15, 0.2, { width: 720, height: 520, pad: 48 });

describe("transform", () => {
  it("maps the origin to the bottom-left of the plot area", () => {
    expect(tr.toScreen(0, 0)).toEqual([48, 520 - 48]);
  });

  it("maps the caps corner to the top-right of the plot area", () => {
    expect(tr.toScreen(0.15, 0.2)).toEqual([720 - 48, 48]);
  });

  it("round-trips world -> screen -> world", () => {
    for (const [x1, x2] of [
      [0.03, 0.17],
      [0.1, 0.01],
      [0.15, 0.2],
      [0, 0],
    ] as [number, number][]) {
      const [sx, sy] = tr.toScreen(x1, x2);
      const [w1, w2] = tr.toWorld(sx, sy);
      expect(w1).toBeCloseTo(x1, 12);
      expect(w2).toBeCloseTo(x2, 12);
    }
  });

  it("clamps clicks outside the box onto it", () => {
    expect(tr.clampToBox(-0.1, 0.5)).toEqual([0, 0.2]);
    expect(tr.clampToBox(0.08, 0.13)).toEqual([0.08, 0.13]);
  });
});
