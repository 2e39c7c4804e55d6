import { PNG } from "pngjs";
import { FALLBACK, GLYPHS, GLYPH_H, GLYPH_W } from "./font.js";

export type Color = [number, number, number];

export const BLACK: Color = [0, 0, 0];
export const GREY: Color = [160, 160, 160];
export const WHITE: Color = [255, 255, 255];

/** Drawing surface over a flat RGBA buffer, origin top-left. */
export class Raster {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number, background: Color = WHITE) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 4);
    for (let i = 0; i < width * height; i++) {
      this.data[4 * i] = background[0];
      this.data[4 * i + 1] = background[1];
      this.data[4 * i + 2] = background[2];
      this.data[4 * i + 3] = 255;
    }
  }

  set(x: number, y: number, c: Color, alpha = 1): void {
    x = Math.round(x);
    y = Math.round(y);
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = 4 * (y * this.width + x);
    this.data[i] = Math.round(c[0] * alpha + this.data[i] * (1 - alpha));
    this.data[i + 1] = Math.round(c[1] * alpha + this.data[i + 1] * (1 - alpha));
    this.data[i + 2] = Math.round(c[2] * alpha + this.data[i + 2] * (1 - alpha));
    this.data[i + 3] = 255;
  }

  get(x: number, y: number): Color {
    const i = 4 * (y * this.width + x);
    return [this.data[i], this.data[i + 1], this.data[i + 2]];
  }

  fillRect(x: number, y: number, w: number, h: number, c: Color, alpha = 1): void {
    const x0 = Math.round(x);
    const y0 = Math.round(y);
    for (let yy = y0; yy < y0 + Math.round(h); yy++) {
      for (let xx = x0; xx < x0 + Math.round(w); xx++) {
        this.set(xx, yy, c, alpha);
      }
    }
  }

  /** Solid line, thickness in whole pixels. */
  line(x0: number, y0: number, x1: number, y1: number, c: Color, width = 1): void {
    const steps = Math.max(Math.abs(x1 - x0), Math.abs(y1 - y0), 1);
    const half = Math.floor(width / 2);
    for (let s = 0; s <= steps; s++) {
      const x = x0 + ((x1 - x0) * s) / steps;
      const y = y0 + ((y1 - y0) * s) / steps;
      for (let dy = -half; dy < width - half; dy++) {
        for (let dx = -half; dx < width - half; dx++) {
          this.set(x + dx, y + dy, c);
        }
      }
    }
  }

  polyline(xs: number[], ys: number[], c: Color, width = 1): void {
    for (let i = 1; i < xs.length; i++) {
      this.line(xs[i - 1], ys[i - 1], xs[i], ys[i], c, width);
    }
  }

  text(x: number, y: number, s: string, c: Color, scale = 1): void {
    let cx = Math.round(x);
    for (const ch of s) {
      const glyph = GLYPHS[ch] ?? FALLBACK;
      for (let row = 0; row < GLYPH_H; row++) {
        for (let col = 0; col < GLYPH_W; col++) {
          if ((glyph[row] >> (GLYPH_W - 1 - col)) & 1) {
            this.fillRect(cx + col * scale, y + row * scale, scale, scale, c);
          }
        }
      }
      cx += (GLYPH_W + 1) * scale;
    }
  }

  textWidth(s: string, scale = 1): number {
    return s.length * (GLYPH_W + 1) * scale - scale;
  }

  /** Text rotated 90 degrees counter-clockwise (for y-axis labels). */
  textUp(x: number, y: number, s: string, c: Color, scale = 1): void {
    let cy = Math.round(y);
    for (const ch of s) {
      const glyph = GLYPHS[ch] ?? FALLBACK;
      for (let row = 0; row < GLYPH_H; row++) {
        for (let col = 0; col < GLYPH_W; col++) {
          if ((glyph[row] >> (GLYPH_W - 1 - col)) & 1) {
            this.fillRect(x + row * scale, cy - col * scale, scale, scale, c);
          }
        }
      }
      cy -= (GLYPH_W + 1) * scale;
    }
  }

  toPng(dpi = 150): Buffer {
    const png = new PNG({ width: this.width, height: this.height });
    Buffer.from(this.data.buffer).copy(png.data);
    const raw = PNG.sync.write(png);
    return insertPhys(raw, dpi);
  }
}

const CRC_TABLE = new Uint32Array(256);
for (let n = 0; n < 256; n++) {
  let c = n;
  for (let k = 0; k < 8; k++) c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
  CRC_TABLE[n] = c >>> 0;
}

function crc32(buf: Buffer): number {
  let c = 0xffffffff;
  for (const b of buf) c = CRC_TABLE[(c ^ b) & 0xff] ^ (c >>> 8);
  return (c ^ 0xffffffff) >>> 0;
}

/** Splice a pHYs chunk (physical pixel density) in after IHDR. */
export function insertPhys(png: Buffer, dpi: number): Buffer {
  const ppm = Math.round(dpi / 0.0254); // pixels per metre
  const chunk = Buffer.alloc(21);
  chunk.writeUInt32BE(9, 0);
  chunk.write("pHYs", 4);
  chunk.writeUInt32BE(ppm, 8);
  chunk.writeUInt32BE(ppm, 12);
  chunk.writeUInt8(1, 16); // unit: metre
  chunk.writeUInt32BE(crc32(chunk.subarray(4, 17)), 17);
  const afterIhdr = 8 + 25; // signature + IHDR chunk
  return Buffer.concat([png.subarray(0, afterIhdr), chunk, png.subarray(afterIhdr)]);
}
