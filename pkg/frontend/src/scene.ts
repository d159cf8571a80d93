/**
 * Editable scene state for the three analysis modes.
 *
 * Pure data + mutation helpers, no DOM and no math beyond hit testing; every
 * edit bumps `version` so the UI loop knows to re-request analysis.
 */

import type {
  AnalysisRequest,
  BoundaryPolicy,
  Vec2,
} from "./contract.js";

export type SceneMode = "polygon" | "points" | "image";

export interface SceneImage {
  width: number;
  height: number;
  /** Row-major scanlines, values in [0, 1]. */
  values: number[];
}

export interface Scene {
  mode: SceneMode;
  vertices: Vec2[];
  points: Vec2[];
  image: SceneImage | null;
  threshold: number;
  closeBorder: boolean;
  boundary: BoundaryPolicy;
  /** Rank highlighted in the bar chart and direction rose. */
  sSelected: number;
  sMax: number;
  version: number;
}

const STARTER_SQUARE: Vec2[] = [
  [-1, -1],
  [1, -1],
  [1, 1],
  [-1, 1],
];

const STARTER_POINTS: Vec2[] = [
  [0, 0],
  [1, 0],
  [0.5, Math.sqrt(3) / 2],
  [-0.5, Math.sqrt(3) / 2],
  [-1, 0],
  [-0.5, -Math.sqrt(3) / 2],
  [0.5, -Math.sqrt(3) / 2],
];

export function initialScene(): Scene {
  return {
    mode: "polygon",
    vertices: STARTER_SQUARE.map((p) => [...p] as Vec2),
    points: STARTER_POINTS.map((p) => [...p] as Vec2),
    image: null,
    threshold: 0.5,
    closeBorder: false,
    boundary: "clip",
    sSelected: 4,
    sMax: 8,
    version: 0,
  };
}

function bump(scene: Scene): void {
  scene.version += 1;
}

function activeList(scene: Scene): Vec2[] {
  return scene.mode === "polygon" ? scene.vertices : scene.points;
}

export function setMode(scene: Scene, mode: SceneMode): void {
  if (scene.mode === mode) return;
  scene.mode = mode;
  bump(scene);
}

export function addItem(scene: Scene, pos: Vec2): number {
  const list = activeList(scene);
  list.push([pos[0], pos[1]]);
  bump(scene);
  return list.length - 1;
}

export function moveItem(scene: Scene, index: number, pos: Vec2): void {
  const list = activeList(scene);
  const item = list[index];
  if (item === undefined) return;
  item[0] = pos[0];
  item[1] = pos[1];
  bump(scene);
}

export function deleteItem(scene: Scene, index: number): void {
  const list = activeList(scene);
  if (index < 0 || index >= list.length) return;
  list.splice(index, 1);
  bump(scene);
}

export function setThreshold(scene: Scene, t: number): void {
  const clamped = Math.min(1, Math.max(0, t));
  if (clamped === scene.threshold) return;
  scene.threshold = clamped;
  bump(scene);
}

export function setCloseBorder(scene: Scene, on: boolean): void {
  if (scene.closeBorder === on) return;
  scene.closeBorder = on;
  bump(scene);
}

export function setBoundary(scene: Scene, policy: BoundaryPolicy): void {
  if (scene.boundary === policy) return;
  scene.boundary = policy;
  bump(scene);
}

export function selectS(scene: Scene, s: number): void {
  const clamped = Math.min(scene.sMax, Math.max(2, Math.round(s)));
  if (clamped === scene.sSelected) return;
  scene.sSelected = clamped;
  bump(scene);
}

export function setImage(scene: Scene, image: SceneImage): void {
  scene.image = image;
  scene.mode = "image";
  bump(scene);
}

/** Index of the item within `radius` of `pos`, nearest first; -1 if none. */
export function hitTest(items: readonly Vec2[], pos: Vec2, radius: number): number {
  let best = -1;
  let bestD2 = radius * radius;
  for (let i = 0; i < items.length; i++) {
    const item = items[i]!;
    const dx = item[0] - pos[0];
    const dy = item[1] - pos[1];
    const d2 = dx * dx + dy * dy;
    if (d2 <= bestD2) {
      best = i;
      bestD2 = d2;
    }
  }
  return best;
}

export interface Readiness {
  ok: boolean;
  /** User-visible hint when not ready. */
  hint: string | null;
}

export function canAnalyze(scene: Scene): Readiness {
  if (scene.mode === "polygon" && scene.vertices.length < 3) {
    return { ok: false, hint: "add at least 3 vertices to analyze" };
  }
  if (scene.mode === "points" && scene.points.length < 3) {
    return { ok: false, hint: "add at least 3 points to analyze" };
  }
  if (scene.mode === "image" && scene.image === null) {
    return { ok: false, hint: "upload an image to analyze" };
  }
  return { ok: true, hint: null };
}

/** Serialize the scene into an analysis request; null when not analyzable. */
export function toRequest(scene: Scene): AnalysisRequest | null {
  if (!canAnalyze(scene).ok) return null;
  if (scene.mode === "polygon") {
    return {
      mode: "polygon",
      payload: { vertices: scene.vertices.map((p) => [...p] as Vec2) },
      s_max: scene.sMax,
    };
  }
  if (scene.mode === "points") {
    return {
      mode: "points",
      payload: {
        points: scene.points.map((p) => [...p] as Vec2),
        box: null,
        boundary: scene.boundary,
      },
      s_max: scene.sMax,
    };
  }
  const image = scene.image!;
  return {
    mode: "image",
    payload: {
      width: image.width,
      height: image.height,
      values: image.values,
      threshold: scene.threshold,
      close_border: scene.closeBorder,
    },
    s_max: scene.sMax,
  };
}
