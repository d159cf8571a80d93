/**
 * JSON analysis contract shared with the compute backend.
 *
 * The shapes here mirror the backend's bindings boundary one-to-one; the UI
 * never computes tensors itself, it only ships these requests and renders the
 * results. Payload limits are enforced on this side too so oversized scenes
 * fail with a friendly message before any network round trip.
 */

export const MAX_POINTS = 1000;
export const MAX_VERTICES = 1000;
export const MAX_PIXELS_PER_SIDE = 500;
export const S_MIN = 2;
export const S_MAX_LIMIT = 36;

export type Vec2 = [number, number];
export type Box = [number, number, number, number];
export type BoundaryPolicy = "clip" | "exclude-border" | "periodic";

export interface PolygonRequest {
  mode: "polygon";
  payload: { vertices: Vec2[] };
  s_max: number;
}

export interface PointsRequest {
  mode: "points";
  payload: { points: Vec2[]; box: Box | null; boundary: BoundaryPolicy };
  s_max: number;
}

export interface ImageRequest {
  mode: "image";
  payload: {
    width: number;
    height: number;
    /** Row-major scanline order, values in [0, 1]. */
    values: number[];
    threshold: number;
    close_border?: boolean;
  };
  s_max: number;
}

export type AnalysisRequest = PolygonRequest | PointsRequest | ImageRequest;

export interface QEntry {
  s: number;
  /** null when the metric is undefined (empty excursion set). */
  magnitude: number | null;
  /** null when no direction is distinguished (isotropic or undefined). */
  direction: number | null;
}

export interface CellResult {
  cell: Vec2[];
  q: QEntry[];
}

export interface AnalysisResult {
  area: number;
  perimeter: number;
  q: QEntry[];
  /** Present exactly for points mode, in input point order. */
  per_cell?: CellResult[];
}

function finitePairs(coords: Vec2[]): boolean {
  return coords.every(
    (p) => p.length === 2 && Number.isFinite(p[0]) && Number.isFinite(p[1]),
  );
}

/**
 * Client-side validation. Returns a user-visible message for the first
 * problem found, or null when the request may be sent.
 */
export function validateRequest(req: AnalysisRequest): string | null {
  if (!Number.isInteger(req.s_max) || req.s_max < S_MIN || req.s_max > S_MAX_LIMIT) {
    return `s_max must be an integer between ${S_MIN} and ${S_MAX_LIMIT}`;
  }

  if (req.mode === "polygon") {
    const verts = req.payload.vertices;
    if (verts.length < 3) return "a polygon needs at least 3 vertices";
    if (verts.length > MAX_VERTICES) return `at most ${MAX_VERTICES} vertices are supported`;
    if (!finitePairs(verts)) return "polygon vertices must be finite numbers";
    return null;
  }

  if (req.mode === "points") {
    const pts = req.payload.points;
    if (pts.length < 3) return "a point pattern needs at least 3 points";
    if (pts.length > MAX_POINTS) return `at most ${MAX_POINTS} points are supported`;
    if (!finitePairs(pts)) return "points must be finite numbers";
    const box = req.payload.box;
    if (box !== null) {
      if (box.length !== 4 || !box.every(Number.isFinite)) {
        return "box must be [xmin, ymin, xmax, ymax]";
      }
      if (box[2] <= box[0] || box[3] <= box[1]) return "box must have positive extent";
    }
    return null;
  }

  if (req.mode === "image") {
    const { width, height, values, threshold } = req.payload;
    if (!Number.isInteger(width) || !Number.isInteger(height) || width < 2 || height < 2) {
      return "image must be at least 2x2 pixels";
    }
    if (width > MAX_PIXELS_PER_SIDE || height > MAX_PIXELS_PER_SIDE) {
      return `images larger than ${MAX_PIXELS_PER_SIDE}x${MAX_PIXELS_PER_SIDE} are not supported`;
    }
    if (values.length !== width * height) return "image values do not match width x height";
    if (!Number.isFinite(threshold)) return "threshold must be a number";
    return null;
  }

  return "unknown analysis mode";
}

/** Look up one q entry by rank; undefined when s is outside the result. */
export function qEntry(result: AnalysisResult, s: number): QEntry | undefined {
  return result.q.find((e) => e.s === s);
}
