import { readFileSync, readdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { numericColumn, parseCsv } from "./csv.js";
import { Area, PALETTE, frame, legend } from "./chart.js";
import { Raster } from "./raster.js";
import { linearScale, linearTicks, log10Scale, log10Ticks } from "./scale.js";

export interface LossCurve {
  q: number;
  steps: number[];
  loss: number[]; // smoothed mean over seeds, one value per step
}

const AGGREGATE_RE = /^aggregate_q(.+)\.csv$/;

/** All per-q aggregate curves in a sweep output directory, sorted by q. */
export function loadAggregates(dir: string): LossCurve[] {
  let names: string[];
  try {
    names = readdirSync(dir);
  } catch {
    throw new Error(`cannot read directory ${dir}`);
  }
  const curves: LossCurve[] = [];
  for (const name of names) {
    const m = AGGREGATE_RE.exec(name);
    if (!m) continue;
    const q = Number(m[1]);
    if (!Number.isFinite(q)) {
      throw new Error(`${join(dir, name)}: cannot parse q from filename`);
    }
    const path = join(dir, name);
    const table = parseCsv(readFileSync(path, "utf8"), path);
    curves.push({
      q,
      steps: numericColumn(table, "step", path),
      loss: numericColumn(table, "smoothed_loss", path),
    });
  }
  if (curves.length === 0) {
    throw new Error(`no aggregate_q*.csv files in ${dir}`);
  }
  return curves.sort((a, b) => a.q - b.q);
}

export interface LossPlotOpts {
  inDir: string;
  outPath: string;
  logy?: boolean;
  width?: number;
  height?: number;
}

/** Render one loss-vs-step curve per context exponent q. */
export function plotLossCurves(opts: LossPlotOpts): void {
  const curves = loadAggregates(opts.inDir);
  const W = opts.width ?? 900;
  const H = opts.height ?? 600;
  const area: Area = { x0: 78, y0: 40, x1: W - 16, y1: H - 48 };
  const r = new Raster(W, H);

  const maxStep = Math.max(...curves.map((c) => c.steps[c.steps.length - 1]));
  let values = curves.flatMap((c) => c.loss);
  if (opts.logy) {
    values = values.filter((v) => v > 0);
    if (values.length === 0) {
      throw new Error(`${opts.inDir}: no positive losses, cannot use a log axis`);
    }
  }
  const lo = Math.min(...values);
  const hi = Math.max(...values);

  const xScale = linearScale([0, maxStep], [area.x0, area.x1]);
  const yScale = opts.logy
    ? log10Scale([lo, hi], [area.y1, area.y0])
    : linearScale([Math.min(0, lo), hi * 1.04], [area.y1, area.y0]);
  const yTicks = opts.logy ? log10Ticks(lo, hi) : linearTicks(Math.min(0, lo), hi * 1.04);

  frame(r, area, {
    title: "loss per step",
    xLabel: "step",
    yLabel: "smoothed loss",
    xTicks: linearTicks(0, maxStep, 6),
    yTicks,
    xScale,
    yScale,
  });

  curves.forEach((curve, i) => {
    const color = PALETTE[i % PALETTE.length];
    // Draw only valid points; a log axis leaves gaps at zero losses.
    let px: number | null = null;
    let py: number | null = null;
    for (let j = 0; j < curve.steps.length; j++) {
      const v = curve.loss[j];
      if (opts.logy && !(v > 0)) {
        px = py = null;
        continue;
      }
      const x = xScale(curve.steps[j]);
      const y = yScale(v);
      if (px !== null && py !== null) r.line(px, py, x, y, color, 2);
      px = x;
      py = y;
    }
  });

  legend(
    r,
    area,
    curves.map((c, i) => ({ label: `L = T^${c.q}`, color: PALETTE[i % PALETTE.length] })),
  );
  writeFileSync(opts.outPath, r.toPng());
}
