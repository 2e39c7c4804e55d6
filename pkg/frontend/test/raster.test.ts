import { PNG } from "pngjs";
import { describe, expect, it } from "vitest";
import { Raster } from "../src/raster.js";

function pixel(png: PNG, x: number, y: number): [number, number, number] {
  const i = 4 * (y * png.width + x);
  return [png.data[i], png.data[i + 1], png.data[i + 2]];
}

describe("Raster", () => {
  it("round-trips through PNG with correct dimensions", () => {
    const r = new Raster(40, 30);
    r.set(5, 7, [10, 20, 30]);
    const png = PNG.sync.read(r.toPng());
    expect(png.width).toBe(40);
    expect(png.height).toBe(30);
    expect(pixel(png, 5, 7)).toEqual([10, 20, 30]);
    expect(pixel(png, 0, 0)).toEqual([255, 255, 255]);
  });

  it("embeds a 150 dpi pHYs chunk", () => {
    const buf = new Raster(8, 8).toPng();
    const at = buf.indexOf("pHYs");
    expect(at).toBe(8 + 25 + 4); // right after IHDR
    const ppm = buf.readUInt32BE(at + 4);
    expect(ppm).toBe(Math.round(150 / 0.0254));
    expect(buf.readUInt8(at + 12)).toBe(1);
    expect(() => PNG.sync.read(buf)).not.toThrow();
  });

  it("blends with alpha", () => {
    const r = new Raster(4, 4);
    r.fillRect(0, 0, 4, 4, [0, 0, 0], 0.5);
    expect(r.get(1, 1)[0]).toBeCloseTo(128, 0);
  });

  it("clips out-of-bounds drawing", () => {
    const r = new Raster(4, 4);
    r.line(-10, -10, 10, 10, [0, 0, 0], 3);
    r.text(-3, -3, "x", [0, 0, 0]);
    expect(r.get(0, 0)).toEqual([0, 0, 0]); // on the diagonal
  });

  it("renders text as dark pixels of the expected width", () => {
    const r = new Raster(80, 20);
    r.text(2, 2, "T=1", [0, 0, 0]);
    let dark = 0;
    for (let i = 0; i < r.data.length; i += 4) if (r.data[i] < 128) dark++;
    expect(dark).toBeGreaterThan(10);
    expect(r.textWidth("T=1")).toBe(17);
  });

  it("is deterministic", () => {
    const draw = () => {
      const r = new Raster(60, 40);
      r.line(3, 3, 50, 30, [31, 119, 180], 2);
      r.text(5, 20, "q = 0.5", [0, 0, 0]);
      return r.toPng();
    };
    expect(draw().equals(draw())).toBe(true);
  });
});
