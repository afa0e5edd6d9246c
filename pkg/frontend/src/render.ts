import type { BarrierJson, RegionJson } from "./types";
import { Transform } from "./transform";

// The subset of CanvasRenderingContext2D the renderer touches, so tests can
// substitute a recording stub.
export interface Ctx {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fillText(text: string, x: number, y: number): void;
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  globalAlpha: number;
}

export const COLORS = {
  box: "#555",
  admissible: "rgba(70, 130, 180, 0.35)",
  mrpi: "rgba(60, 179, 113, 0.55)",
  barrier: "#b22222",
  tangent: "#111",
  state: "#d2691e",
  trail: "rgba(210, 105, 30, 0.5)",
};

function tracePolygon(ctx: Ctx, tr: Transform, vertices: [number, number][]): void {
  ctx.beginPath();
  vertices.forEach(([x1, x2], i) => {
    const [sx, sy] = tr.toScreen(x1, x2);
    if (i === 0) ctx.moveTo(sx, sy);
    else ctx.lineTo(sx, sy);
  });
  ctx.closePath();
}

// Vertices are drawn exactly as served: no smoothing, resampling or rounding.
export function drawRegion(ctx: Ctx, tr: Transform, region: RegionJson, fill: string): [number, number][] {
  if (region.vertices.length < 3) return region.vertices;
  tracePolygon(ctx, tr, region.vertices);
  ctx.fillStyle = fill;
  ctx.fill();
  return region.vertices;
}

export function drawBox(ctx: Ctx, tr: Transform): void {
  tracePolygon(ctx, tr, [
    [0, 0],
    [tr.xbar1, 0],
    [tr.xbar1, tr.xbar2],
    [0, tr.xbar2],
  ]);
  ctx.strokeStyle = COLORS.box;
  ctx.lineWidth = 1.5;
  ctx.stroke();
}

export function drawBarrier(ctx: Ctx, tr: Transform, barrier: BarrierJson): void {
  ctx.beginPath();
  barrier.samples.forEach((s, i) => {
    const [sx, sy] = tr.toScreen(s.x1, s.x2);
    if (i === 0) ctx.moveTo(sx, sy);
    else ctx.lineTo(sx, sy);
  });
  ctx.strokeStyle = COLORS.barrier;
  ctx.lineWidth = 2;
  ctx.stroke();
  // tangency point: the curve's first sample, marked as a dot
  const z = barrier.samples[0];
  const [zx, zy] = tr.toScreen(z.x1, z.x2);
  ctx.beginPath();
  ctx.arc(zx, zy, 4, 0, 2 * Math.PI);
  ctx.fillStyle = COLORS.tangent;
  ctx.fill();
}

export function drawTrail(ctx: Ctx, tr: Transform, trail: [number, number][]): void {
  if (trail.length > 1) {
    ctx.beginPath();
    trail.forEach(([x1, x2], i) => {
      const [sx, sy] = tr.toScreen(x1, x2);
      if (i === 0) ctx.moveTo(sx, sy);
      else ctx.lineTo(sx, sy);
    });
    ctx.strokeStyle = COLORS.trail;
    ctx.lineWidth = 1.5;
    ctx.stroke();
  }
  const last = trail[trail.length - 1];
  if (!last) return;
  const [sx, sy] = tr.toScreen(last[0], last[1]);
  ctx.beginPath();
  ctx.arc(sx, sy, 5, 0, 2 * Math.PI);
  ctx.fillStyle = COLORS.state;
  ctx.fill();
}

export function drawAxes(ctx: Ctx, tr: Transform): void {
  ctx.fillStyle = COLORS.box;
  ctx.font = "12px sans-serif";
  const [ox, oy] = tr.toScreen(0, 0);
  ctx.fillText("0", ox - 12, oy + 14);
  const [x1x, x1y] = tr.toScreen(tr.xbar1, 0);
  ctx.fillText(`x1 = ${tr.xbar1}`, x1x - 30, x1y + 16);
  const [x2x, x2y] = tr.toScreen(0, tr.xbar2);
  ctx.fillText(`x2 = ${tr.xbar2}`, x2x - 12, x2y - 6);
}

export interface Scene {
  regions: { admissible: RegionJson; mrpi: RegionJson };
  barriers: { admissible: BarrierJson | null; mrpi: BarrierJson | null };
  trail: [number, number][];
}

// Full scene pass; returns the vertex arrays actually given to the canvas so
// tests can confirm they are the payload's, untouched.
export function renderScene(
  ctx: Ctx,
  tr: Transform,
  scene: Scene,
  size: { width: number; height: number },
): { admissible: [number, number][]; mrpi: [number, number][] } {
  ctx.clearRect(0, 0, size.width, size.height);
  ctx.globalAlpha = 1;
  const admissible = drawRegion(ctx, tr, scene.regions.admissible, COLORS.admissible);
  const mrpi = drawRegion(ctx, tr, scene.regions.mrpi, COLORS.mrpi);
  drawBox(ctx, tr);
  if (scene.barriers.admissible) drawBarrier(ctx, tr, scene.barriers.admissible);
  if (scene.barriers.mrpi) drawBarrier(ctx, tr, scene.barriers.mrpi);
  drawTrail(ctx, tr, scene.trail);
  drawAxes(ctx, tr);
  return { admissible, mrpi };
}
