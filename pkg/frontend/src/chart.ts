import { BLACK, Color, GREY, Raster } from "./raster.js";
import { Scale, fmt } from "./scale.js";

/** Plot rectangle in pixel coordinates, y increasing downward. */
export interface Area {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export const PALETTE: Color[] = [
  [31, 119, 180],
  [214, 39, 40],
  [44, 160, 44],
  [148, 103, 189],
  [255, 127, 14],
  [140, 86, 75],
];

const LIGHT: Color = [225, 225, 225];

export interface FrameOpts {
  title: string;
  xLabel: string;
  yLabel: string;
  xTicks: number[];
  yTicks: number[];
  xScale: Scale;
  yScale: Scale;
  xTickLabels?: string[];
}

/** Axes, grid, tick labels, and titles around the plot area. */
export function frame(r: Raster, area: Area, opts: FrameOpts): void {
  const { x0, y0, x1, y1 } = area;
  opts.xTicks.forEach((t, i) => {
    const x = opts.xScale(t);
    r.line(x, y0, x, y1, LIGHT);
    r.line(x, y1, x, y1 + 4, BLACK);
    const label = opts.xTickLabels ? opts.xTickLabels[i] : fmt(t);
    r.text(x - r.textWidth(label) / 2, y1 + 8, label, BLACK);
  });
  for (const t of opts.yTicks) {
    const y = opts.yScale(t);
    r.line(x0, y, x1, y, LIGHT);
    r.line(x0 - 4, y, x0, y, BLACK);
    const label = fmt(t);
    r.text(x0 - 8 - r.textWidth(label), y - 3, label, BLACK);
  }
  r.line(x0, y0, x1, y0, BLACK);
  r.line(x0, y1, x1, y1, BLACK);
  r.line(x0, y0, x0, y1, BLACK);
  r.line(x1, y0, x1, y1, BLACK);
  r.text((x0 + x1) / 2 - r.textWidth(opts.title, 2) / 2, y0 - 22, opts.title, BLACK, 2);
  r.text((x0 + x1) / 2 - r.textWidth(opts.xLabel) / 2, y1 + 24, opts.xLabel, BLACK);
  r.textUp(6, (y0 + y1) / 2 + r.textWidth(opts.yLabel) / 2, opts.yLabel, BLACK);
}

export interface LegendEntry {
  label: string;
  color: Color;
}

/** Swatch-and-label box in the top-right corner of the plot area. */
export function legend(r: Raster, area: Area, entries: LegendEntry[]): void {
  const widest = Math.max(...entries.map((e) => r.textWidth(e.label)));
  const w = widest + 34;
  const h = entries.length * 14 + 8;
  const bx = area.x1 - w - 8;
  const by = area.y0 + 8;
  r.fillRect(bx, by, w, h, [255, 255, 255], 0.88);
  r.line(bx, by, bx + w, by, GREY);
  r.line(bx, by + h, bx + w, by + h, GREY);
  r.line(bx, by, bx, by + h, GREY);
  r.line(bx + w, by, bx + w, by + h, GREY);
  entries.forEach((e, i) => {
    const y = by + 8 + i * 14;
    r.fillRect(bx + 6, y + 2, 18, 3, e.color);
    r.text(bx + 30, y, e.label, BLACK);
  });
}
