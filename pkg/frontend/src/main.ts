/**
 * Morphometer UI wiring: scene editing on a canvas, live analysis via the
 * JSON boundary, bar chart + direction rose + Voronoi coloring as feedback.
 */

import { AnalysisClient, httpTransport } from "./client.js";
import type { AnalysisResult, Vec2 } from "./contract.js";
import { qEntry } from "./contract.js";
import { downscaleToLimit, lumaValues } from "./image.js";
import {
  addItem,
  canAnalyze,
  deleteItem,
  hitTest,
  initialScene,
  moveItem,
  selectS,
  setBoundary,
  setCloseBorder,
  setImage,
  setMode,
  setThreshold,
  toRequest,
  type Scene,
  type SceneMode,
} from "./scene.js";
import {
  boundsOf,
  drawBars,
  drawCells,
  drawDirectionRose,
  drawPoints,
  drawPolygon,
  fitTransform,
  type Bounds,
  type Transform,
} from "./render.js";

const HANDLE_RADIUS_PX = 6;
const HIT_RADIUS_PX = 12;
const SCENE_PAD = 0.5;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const sceneCanvas = el<HTMLCanvasElement>("scene");
const chartCanvas = el<HTMLCanvasElement>("chart");
const roseCanvas = el<HTMLCanvasElement>("rose");
const statusLine = el<HTMLDivElement>("status");
const metricsLine = el<HTMLDivElement>("metrics");
const thresholdSlider = el<HTMLInputElement>("threshold");
const thresholdReadout = el<HTMLSpanElement>("threshold-value");
const closeBorderBox = el<HTMLInputElement>("close-border");
const boundarySelect = el<HTMLSelectElement>("boundary");
const fileInput = el<HTMLInputElement>("image-file");
const sButtons = el<HTMLDivElement>("s-buttons");
const modeTabs = Array.from(document.querySelectorAll<HTMLButtonElement>("[data-mode]"));

const scene: Scene = initialScene();
let result: AnalysisResult | null = null;
let lastError: string | null = null;
let renderedVersion = -1;
let resultDirty = false;
let imageBackdrop: HTMLCanvasElement | null = null;

const client = new AnalysisClient(httpTransport(window.location.origin), {
  onResult(_seq, res) {
    result = res;
    lastError = null;
    resultDirty = true;
  },
  onError(_seq, message) {
    result = null;
    lastError = message;
    resultDirty = true;
  },
});

function requestAnalysis(): void {
  const readiness = canAnalyze(scene);
  if (!readiness.ok) {
    result = null;
    lastError = readiness.hint;
    resultDirty = true;
    return;
  }
  const req = toRequest(scene);
  if (req !== null) client.request(req);
}

// ---------------------------------------------------------------- transforms

function sceneBounds(): Bounds {
  if (scene.mode === "image" && scene.image) {
    return { xmin: 0, ymin: 0, xmax: scene.image.width - 1, ymax: scene.image.height - 1 };
  }
  const coords: Vec2[] = scene.mode === "polygon" ? scene.vertices : scene.points;
  const cellCoords: Vec2[] =
    scene.mode === "points" && result?.per_cell ? result.per_cell.flatMap((c) => c.cell) : [];
  const all = coords.concat(cellCoords);
  const b = boundsOf(all, SCENE_PAD);
  return b ?? { xmin: -2, ymin: -2, xmax: 2, ymax: 2 };
}

function currentTransform(): Transform {
  return fitTransform(sceneBounds(), sceneCanvas.width, sceneCanvas.height);
}

// ------------------------------------------------------------------- drawing

function rebuildImageBackdrop(): void {
  if (!scene.image) {
    imageBackdrop = null;
    return;
  }
  const { width, height, values } = scene.image;
  const off = document.createElement("canvas");
  off.width = width;
  off.height = height;
  const ctx = off.getContext("2d")!;
  const data = ctx.createImageData(width, height);
  for (let p = 0; p < values.length; p++) {
    const v = Math.round((values[p] ?? 0) * 255);
    data.data[p * 4] = v;
    data.data[p * 4 + 1] = v;
    data.data[p * 4 + 2] = v;
    data.data[p * 4 + 3] = 255;
  }
  ctx.putImageData(data, 0, 0);
  imageBackdrop = off;
}

function draw(): void {
  const ctx = sceneCanvas.getContext("2d")!;
  ctx.clearRect(0, 0, sceneCanvas.width, sceneCanvas.height);
  const t = currentTransform();

  if (scene.mode === "image") {
    if (imageBackdrop && scene.image) {
      // raster drawn in its own scanline frame (row 0 on top)
      const tl = t.toScreen([0, scene.image.height - 1]);
      const br = t.toScreen([scene.image.width - 1, 0]);
      ctx.imageSmoothingEnabled = false;
      ctx.drawImage(imageBackdrop, tl[0], br[1], br[0] - tl[0], tl[1] - br[1]);
    }
  } else if (scene.mode === "polygon") {
    drawPolygon(ctx, scene.vertices, t, HANDLE_RADIUS_PX);
  } else {
    if (result?.per_cell) drawCells(ctx, result.per_cell, scene.sSelected, t);
    drawPoints(ctx, scene.points, t, HANDLE_RADIUS_PX / 1.5);
  }

  const chartCtx = chartCanvas.getContext("2d")!;
  chartCtx.clearRect(0, 0, chartCanvas.width, chartCanvas.height);
  if (result) {
    drawBars(
      chartCtx,
      { x: 0, y: 0, width: chartCanvas.width, height: chartCanvas.height },
      result.q,
      scene.sSelected,
    );
  }

  const roseCtx = roseCanvas.getContext("2d")!;
  roseCtx.clearRect(0, 0, roseCanvas.width, roseCanvas.height);
  if (result) {
    const entry = qEntry(result, scene.sSelected);
    roseCtx.strokeStyle = "#ccc";
    roseCtx.lineWidth = 1;
    roseCtx.beginPath();
    roseCtx.arc(roseCanvas.width / 2, roseCanvas.height / 2, roseCanvas.width / 2 - 4, 0, 2 * Math.PI);
    roseCtx.stroke();
    drawDirectionRose(
      roseCtx,
      [roseCanvas.width / 2, roseCanvas.height / 2],
      roseCanvas.width / 2 - 6,
      scene.sSelected,
      entry?.direction ?? null,
      scene.mode === "image",
    );
  }

  metricsLine.textContent = result
    ? `area ${result.area.toPrecision(6)}   perimeter ${result.perimeter.toPrecision(6)}`
    : "";
  statusLine.textContent = lastError ?? "";
}

function frame(): void {
  if (scene.version !== renderedVersion || resultDirty) {
    renderedVersion = scene.version;
    resultDirty = false;
    draw();
  }
  requestAnimationFrame(frame);
}

// -------------------------------------------------------------- interactions

let dragIndex = -1;

function canvasPos(ev: MouseEvent): Vec2 {
  const rect = sceneCanvas.getBoundingClientRect();
  return [
    ((ev.clientX - rect.left) / rect.width) * sceneCanvas.width,
    ((ev.clientY - rect.top) / rect.height) * sceneCanvas.height,
  ];
}

function screenHit(pos: Vec2): number {
  if (scene.mode === "image") return -1;
  const t = currentTransform();
  const items = scene.mode === "polygon" ? scene.vertices : scene.points;
  return hitTest(items.map((p) => t.toScreen(p)), pos, HIT_RADIUS_PX);
}

sceneCanvas.addEventListener("mousedown", (ev) => {
  if (ev.button !== 0 || scene.mode === "image") return;
  const pos = canvasPos(ev);
  const hit = screenHit(pos);
  if (hit >= 0) {
    dragIndex = hit;
  } else {
    dragIndex = addItem(scene, currentTransform().toWorld(pos));
    requestAnalysis();
  }
});

sceneCanvas.addEventListener("mousemove", (ev) => {
  if (dragIndex < 0) return;
  moveItem(scene, dragIndex, currentTransform().toWorld(canvasPos(ev)));
  requestAnalysis();
});

window.addEventListener("mouseup", () => {
  dragIndex = -1;
});

sceneCanvas.addEventListener("contextmenu", (ev) => {
  ev.preventDefault();
  if (scene.mode === "image") return;
  const hit = screenHit(canvasPos(ev));
  if (hit >= 0) {
    deleteItem(scene, hit);
    requestAnalysis();
  }
});

for (const tab of modeTabs) {
  tab.addEventListener("click", () => {
    setMode(scene, tab.dataset.mode as SceneMode);
    for (const other of modeTabs) other.classList.toggle("active", other === tab);
    document.body.dataset.mode = scene.mode;
    requestAnalysis();
  });
}

thresholdSlider.addEventListener("input", () => {
  const t = Number(thresholdSlider.value);
  setThreshold(scene, t);
  thresholdReadout.textContent = t.toFixed(2);
  requestAnalysis();
});

closeBorderBox.addEventListener("change", () => {
  setCloseBorder(scene, closeBorderBox.checked);
  requestAnalysis();
});

boundarySelect.addEventListener("change", () => {
  setBoundary(scene, boundarySelect.value as Scene["boundary"]);
  requestAnalysis();
});

for (let s = 2; s <= 8; s++) {
  const btn = document.createElement("button");
  btn.textContent = `s=${s}`;
  btn.dataset.s = String(s);
  if (s === scene.sSelected) btn.classList.add("active");
  btn.addEventListener("click", () => {
    selectS(scene, s);
    for (const other of Array.from(sButtons.children)) {
      other.classList.toggle("active", other === btn);
    }
    requestAnalysis();
  });
  sButtons.appendChild(btn);
}

fileInput.addEventListener("change", async () => {
  const file = fileInput.files?.[0];
  if (!file) return;
  try {
    const bitmap = await createImageBitmap(file);
    const off = document.createElement("canvas");
    off.width = bitmap.width;
    off.height = bitmap.height;
    const ctx = off.getContext("2d")!;
    ctx.drawImage(bitmap, 0, 0);
    const raster = downscaleToLimit(ctx.getImageData(0, 0, bitmap.width, bitmap.height));
    setImage(scene, lumaValues(raster));
    rebuildImageBackdrop();
    requestAnalysis();
  } catch {
    lastError = "could not decode that image file";
    resultDirty = true;
  }
});

document.body.dataset.mode = scene.mode;
requestAnalysis();
requestAnimationFrame(frame);
