/**
 * Rendering: bar chart, direction ticks, Voronoi cell coloring, transforms.
 *
 * The geometry and color choices live in pure functions so they can be
 * tested without a canvas; the draw* functions at the bottom only issue
 * context calls. Visual encodings are this UI's own: q maps onto a
 * blue-to-red hue ramp, bars show q_2..q_8, and the distinguished direction
 * is drawn as s evenly spaced ticks (the direction is only defined mod
 * 2*pi/s).
 *
 * World coordinates are mathematical (y up); the transform flips y for the
 * screen. Uploaded rasters keep their own scanline frame: their row 0 is
 * drawn at the top, and overlay angles are rendered in that same frame so
 * arrows point along the structures the user sees.
 */

import type { CellResult, QEntry, Vec2 } from "./contract.js";

export const BAR_S_RANGE: number[] = [2, 3, 4, 5, 6, 7, 8];

export interface Bar {
  s: number;
  magnitude: number | null;
  /** Fraction of the available bar height, 0 for undefined metrics. */
  height: number;
}

export function barHeights(q: QEntry[]): Bar[] {
  return BAR_S_RANGE.map((s) => {
    const entry = q.find((e) => e.s === s);
    const magnitude = entry?.magnitude ?? null;
    const clamped = magnitude === null ? 0 : Math.min(1, Math.max(0, magnitude));
    return { s, magnitude, height: clamped };
  });
}

/**
 * The s equivalent tick angles of one distinguished direction,
 * direction + k*2*pi/s for k = 0..s-1, each reduced into [0, 2*pi).
 */
export function directionTicks(s: number, direction: number | null): number[] {
  if (direction === null || s < 1) return [];
  const ticks: number[] = [];
  const step = (2 * Math.PI) / s;
  for (let k = 0; k < s; k++) {
    const angle = (((direction + k * step) % (2 * Math.PI)) + 2 * Math.PI) % (2 * Math.PI);
    ticks.push(angle);
  }
  return ticks;
}

/**
 * Color for a q magnitude: hue ramp from blue (0) through red (1),
 * null (undefined metric) renders as neutral grey.
 */
export function qColor(magnitude: number | null): string {
  if (magnitude === null) return "hsl(0, 0%, 72%)";
  const q = Math.min(1, Math.max(0, magnitude));
  const hue = 240 * (1 - q);
  return `hsl(${Math.round(hue)}, 85%, 55%)`;
}

export interface Bounds {
  xmin: number;
  ymin: number;
  xmax: number;
  ymax: number;
}

export function boundsOf(coords: readonly Vec2[], pad = 0): Bounds | null {
  if (coords.length === 0) return null;
  let xmin = Infinity;
  let ymin = Infinity;
  let xmax = -Infinity;
  let ymax = -Infinity;
  for (const [x, y] of coords) {
    xmin = Math.min(xmin, x);
    ymin = Math.min(ymin, y);
    xmax = Math.max(xmax, x);
    ymax = Math.max(ymax, y);
  }
  return { xmin: xmin - pad, ymin: ymin - pad, xmax: xmax + pad, ymax: ymax + pad };
}

/** Uniform-scale world-to-screen map, y flipped, content centered. */
export interface Transform {
  scale: number;
  toScreen(p: Vec2): Vec2;
  toWorld(p: Vec2): Vec2;
}

export function fitTransform(
  bounds: Bounds,
  width: number,
  height: number,
  margin = 24,
): Transform {
  const spanX = Math.max(bounds.xmax - bounds.xmin, 1e-9);
  const spanY = Math.max(bounds.ymax - bounds.ymin, 1e-9);
  const scale = Math.min((width - 2 * margin) / spanX, (height - 2 * margin) / spanY);
  const cx = (bounds.xmin + bounds.xmax) / 2;
  const cy = (bounds.ymin + bounds.ymax) / 2;
  return {
    scale,
    toScreen: ([x, y]) => [width / 2 + (x - cx) * scale, height / 2 - (y - cy) * scale],
    toWorld: ([sx, sy]) => [cx + (sx - width / 2) / scale, cy - (sy - height / 2) / scale],
  };
}

/** The subset of CanvasRenderingContext2D the draw helpers use. */
export interface DrawContext {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  textAlign: CanvasTextAlign;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
}

export interface ChartLayout {
  x: number;
  y: number;
  width: number;
  height: number;
}

const CHART_LABEL_SPACE = 18;

export function drawBars(
  ctx: DrawContext,
  layout: ChartLayout,
  q: QEntry[],
  sSelected: number,
): void {
  const bars = barHeights(q);
  const barSpace = layout.width / bars.length;
  const barWidth = barSpace * 0.62;
  const plotHeight = layout.height - CHART_LABEL_SPACE;
  ctx.clearRect(layout.x, layout.y, layout.width, layout.height);
  ctx.strokeStyle = "#999";
  ctx.lineWidth = 1;
  ctx.strokeRect(layout.x, layout.y, layout.width, plotHeight);
  ctx.font = "12px system-ui, sans-serif";
  ctx.textAlign = "center";
  bars.forEach((bar, i) => {
    const cx = layout.x + (i + 0.5) * barSpace;
    const h = bar.height * plotHeight;
    ctx.fillStyle = qColor(bar.magnitude);
    ctx.fillRect(cx - barWidth / 2, layout.y + plotHeight - h, barWidth, h);
    if (bar.s === sSelected) {
      ctx.strokeStyle = "#222";
      ctx.strokeRect(cx - barWidth / 2, layout.y, barWidth, plotHeight);
    }
    ctx.fillStyle = "#333";
    ctx.fillText(`q${bar.s}`, cx, layout.y + layout.height - 4);
  });
}

/**
 * Direction rose: s ticks through the center. `yDown` selects the angle
 * frame (true for raster scenes, false for mathematical scenes).
 */
export function drawDirectionRose(
  ctx: DrawContext,
  center: Vec2,
  radius: number,
  s: number,
  direction: number | null,
  yDown = false,
): void {
  ctx.strokeStyle = "#c33";
  ctx.lineWidth = 2;
  for (const angle of directionTicks(s, direction)) {
    const a = yDown ? -angle : angle;
    ctx.beginPath();
    ctx.moveTo(center[0], center[1]);
    ctx.lineTo(center[0] + radius * Math.cos(a), center[1] - radius * Math.sin(a));
    ctx.stroke();
  }
}

export function drawPolygon(
  ctx: DrawContext,
  vertices: readonly Vec2[],
  t: Transform,
  handleRadius: number,
): void {
  if (vertices.length === 0) return;
  if (vertices.length >= 2) {
    ctx.beginPath();
    const first = t.toScreen(vertices[0]!);
    ctx.moveTo(first[0], first[1]);
    for (const v of vertices.slice(1)) {
      const p = t.toScreen(v);
      ctx.lineTo(p[0], p[1]);
    }
    ctx.closePath();
    ctx.fillStyle = "rgba(70, 130, 180, 0.25)";
    ctx.fill();
    ctx.strokeStyle = "#4682b4";
    ctx.lineWidth = 2;
    ctx.stroke();
  }
  ctx.fillStyle = "#fff";
  ctx.strokeStyle = "#333";
  ctx.lineWidth = 1.5;
  for (const v of vertices) {
    const p = t.toScreen(v);
    ctx.beginPath();
    ctx.arc(p[0], p[1], handleRadius, 0, 2 * Math.PI);
    ctx.fill();
    ctx.stroke();
  }
}

/** Voronoi cells filled by the magnitude of the selected rank. */
export function drawCells(
  ctx: DrawContext,
  cells: readonly CellResult[],
  sSelected: number,
  t: Transform,
): void {
  for (const cell of cells) {
    if (cell.cell.length < 3) continue;
    const entry = cell.q.find((e) => e.s === sSelected);
    ctx.beginPath();
    const first = t.toScreen(cell.cell[0]!);
    ctx.moveTo(first[0], first[1]);
    for (const v of cell.cell.slice(1)) {
      const p = t.toScreen(v);
      ctx.lineTo(p[0], p[1]);
    }
    ctx.closePath();
    ctx.fillStyle = qColor(entry?.magnitude ?? null);
    ctx.fill();
    ctx.strokeStyle = "#fff";
    ctx.lineWidth = 1;
    ctx.stroke();
  }
}

export function drawPoints(
  ctx: DrawContext,
  points: readonly Vec2[],
  t: Transform,
  handleRadius: number,
): void {
  ctx.fillStyle = "#222";
  for (const pt of points) {
    const p = t.toScreen(pt);
    ctx.beginPath();
    ctx.arc(p[0], p[1], handleRadius, 0, 2 * Math.PI);
    ctx.fill();
  }
}
