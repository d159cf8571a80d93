/**
 * Uploaded-image conversion: RGBA raster to greyscale analysis values.
 *
 * Values are kept in the raster's own scanline order (row 0 first); the
 * backend and its CLI read image files the same way, so an image analyzed
 * here and through the CLI sees the identical value grid.
 */

import { MAX_PIXELS_PER_SIDE } from "./contract.js";
import type { SceneImage } from "./scene.js";

/** Structural subset of ImageData, so node tests need no DOM. */
export interface RasterLike {
  width: number;
  height: number;
  /** RGBA interleaved, 4 bytes per pixel. */
  data: Uint8ClampedArray;
}

const LUMA_R = 0.2126;
const LUMA_G = 0.7152;
const LUMA_B = 0.0722;

/** Rec.709 luma of each pixel, normalized to [0, 1]; alpha is ignored. */
export function lumaValues(raster: RasterLike): SceneImage {
  const { width, height, data } = raster;
  if (data.length !== width * height * 4) {
    throw new Error("raster data does not match width x height");
  }
  const values = new Array<number>(width * height);
  for (let p = 0, i = 0; p < values.length; p++, i += 4) {
    // same operation order as the backend: normalize channels, then weight
    values[p] = LUMA_R * (data[i]! / 255) + LUMA_G * (data[i + 1]! / 255) + LUMA_B * (data[i + 2]! / 255);
  }
  return { width, height, values };
}

/**
 * Nearest-neighbor subsample onto at most `limit` pixels per side.
 * Returns the input unchanged when it already fits.
 */
export function downscaleToLimit(raster: RasterLike, limit = MAX_PIXELS_PER_SIDE): RasterLike {
  const { width, height } = raster;
  if (width <= limit && height <= limit) return raster;
  const factor = Math.max(width / limit, height / limit);
  const outW = Math.max(1, Math.floor(width / factor));
  const outH = Math.max(1, Math.floor(height / factor));
  const out = new Uint8ClampedArray(outW * outH * 4);
  for (let y = 0; y < outH; y++) {
    const srcY = Math.min(height - 1, Math.floor((y + 0.5) * factor));
    for (let x = 0; x < outW; x++) {
      const srcX = Math.min(width - 1, Math.floor((x + 0.5) * factor));
      const src = (srcY * width + srcX) * 4;
      const dst = (y * outW + x) * 4;
      out[dst] = raster.data[src]!;
      out[dst + 1] = raster.data[src + 1]!;
      out[dst + 2] = raster.data[src + 2]!;
      out[dst + 3] = raster.data[src + 3]!;
    }
  }
  return { width: outW, height: outH, data: out };
}
