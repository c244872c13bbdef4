/**
 * Software raster canvas: opaque RGBA pixel buffer with lines, rectangles,
 * bitmap text and the two colormaps used by the figures. Purely geometric;
 * data values arrive here only to be mapped to coordinates or colors.
 */

import { GLYPH_H, GLYPH_W, glyph } from "./font.js";

export type Color = readonly [number, number, number];

export const BLACK: Color = [0, 0, 0];
export const WHITE: Color = [255, 255, 255];
export const GREY: Color = [170, 170, 170];

export const SERIES_COLORS: Color[] = [
  [20, 60, 180], // blue
  [200, 40, 30], // red
  [20, 140, 60], // green
  [230, 140, 0], // orange
  [120, 40, 160], // purple
];

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number, background: Color = WHITE) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 4);
    for (let i = 0; i < width * height; i += 1) {
      this.data[4 * i] = background[0];
      this.data[4 * i + 1] = background[1];
      this.data[4 * i + 2] = background[2];
      this.data[4 * i + 3] = 255;
    }
  }

  set(x: number, y: number, color: Color): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = 4 * (y * this.width + x);
    this.data[i] = color[0];
    this.data[i + 1] = color[1];
    this.data[i + 2] = color[2];
    this.data[i + 3] = 255;
  }

  fillRect(x0: number, y0: number, w: number, h: number, color: Color): void {
    const x1 = Math.min(this.width, Math.ceil(x0 + w));
    const y1 = Math.min(this.height, Math.ceil(y0 + h));
    for (let y = Math.max(0, Math.floor(y0)); y < y1; y += 1) {
      for (let x = Math.max(0, Math.floor(x0)); x < x1; x += 1) {
        this.set(x, y, color);
      }
    }
  }

  line(x0: number, y0: number, x1: number, y1: number, color: Color, thick = 1): void {
    // Bresenham with a square pen
    let ix0 = Math.round(x0);
    let iy0 = Math.round(y0);
    const ix1 = Math.round(x1);
    const iy1 = Math.round(y1);
    const dx = Math.abs(ix1 - ix0);
    const dy = -Math.abs(iy1 - iy0);
    const sx = ix0 < ix1 ? 1 : -1;
    const sy = iy0 < iy1 ? 1 : -1;
    let err = dx + dy;
    const r = Math.floor(thick / 2);
    for (;;) {
      for (let oy = -r; oy <= r; oy += 1) {
        for (let ox = -r; ox <= r; ox += 1) {
          this.set(ix0 + ox, iy0 + oy, color);
        }
      }
      if (ix0 === ix1 && iy0 === iy1) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        ix0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        iy0 += sy;
      }
    }
  }

  text(x: number, y: number, s: string, color: Color = BLACK, scale = 1): void {
    let cx = Math.round(x);
    const cy = Math.round(y);
    for (const ch of s) {
      const rows = glyph(ch);
      for (let gy = 0; gy < GLYPH_H; gy += 1) {
        for (let gx = 0; gx < GLYPH_W; gx += 1) {
          if (rows[gy][gx] === "#") {
            this.fillRect(cx + gx * scale, cy + gy * scale, scale, scale, color);
          }
        }
      }
      cx += (GLYPH_W + 1) * scale;
    }
  }

  textWidth(s: string, scale = 1): number {
    return s.length * (GLYPH_W + 1) * scale - scale;
  }

  /** Vertical text, bottom-to-top, for y-axis labels. */
  textUp(x: number, y: number, s: string, color: Color = BLACK, scale = 1): void {
    let cy = Math.round(y);
    const cx = Math.round(x);
    for (const ch of s) {
      const rows = glyph(ch);
      for (let gy = 0; gy < GLYPH_H; gy += 1) {
        for (let gx = 0; gx < GLYPH_W; gx += 1) {
          if (rows[gy][gx] === "#") {
            // rotate 90 degrees counterclockwise
            this.fillRect(cx + gy * scale, cy - gx * scale, scale, scale, color);
          }
        }
      }
      cy -= (GLYPH_W + 1) * scale;
    }
  }
}

function lerp(a: number, b: number, t: number): number {
  return a + (b - a) * t;
}

function ramp(stops: Color[], t: number): Color {
  const clamped = Math.min(1, Math.max(0, t));
  const pos = clamped * (stops.length - 1);
  const k = Math.min(stops.length - 2, Math.floor(pos));
  const f = pos - k;
  return [
    Math.round(lerp(stops[k][0], stops[k + 1][0], f)),
    Math.round(lerp(stops[k][1], stops[k + 1][1], f)),
    Math.round(lerp(stops[k][2], stops[k + 1][2], f)),
  ];
}

const SEQUENTIAL_STOPS: Color[] = [
  [255, 255, 250],
  [254, 217, 118],
  [253, 141, 60],
  [189, 0, 38],
  [60, 0, 40],
];

const DIVERGING_NEG: Color[] = [
  [8, 48, 107],
  [66, 146, 198],
  [247, 247, 247],
];
const DIVERGING_POS: Color[] = [
  [247, 247, 247],
  [239, 59, 44],
  [103, 0, 13],
];

/** Sequential scale on [lo, hi]. */
export function sequentialColor(v: number, lo: number, hi: number): Color {
  const span = hi - lo;
  return ramp(SEQUENTIAL_STOPS, span > 0 ? (v - lo) / span : 0);
}

/**
 * Diverging scale centered at zero: negative values use the blue side,
 * positive the red side, so all-nonnegative data never touches a
 * below-zero color.
 */
export function divergingColor(v: number, amp: number): Color {
  if (amp <= 0) return [247, 247, 247];
  if (v < 0) return ramp(DIVERGING_NEG, 1 + Math.max(v / amp, -1));
  return ramp(DIVERGING_POS, Math.min(v / amp, 1));
}
