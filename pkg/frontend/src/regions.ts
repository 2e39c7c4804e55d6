import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { numericColumn, parseCsv } from "./csv.js";
import { Area, PALETTE, frame, legend } from "./chart.js";
import { GREY, Raster } from "./raster.js";
import { fmt, linearScale, linearTicks, log10Scale } from "./scale.js";

export interface BandRow {
  variant: string;
  q: number;
  T: number;
  left: number;
  right: number;
  empty: boolean;
}

export function parseBounds(text: string, source: string): BandRow[] {
  const table = parseCsv(text, source);
  const variantIdx = table.header.indexOf("variant");
  if (variantIdx < 0) {
    throw new Error(`${source}: missing column variant (header: ${table.header.join(",")})`);
  }
  const q = numericColumn(table, "q", source);
  const T = numericColumn(table, "T", source);
  const left = numericColumn(table, "left", source);
  const right = numericColumn(table, "right", source);
  const empty = numericColumn(table, "empty", source);
  return table.rows.map((row, i) => ({
    variant: row[variantIdx],
    q: q[i],
    T: T[i],
    left: left[i],
    right: right[i],
    empty: empty[i] !== 0,
  }));
}

/** Ask the primary CLI for band bounds; it owns the formulas. */
export function fetchBounds(
  qs: number[],
  Tmin: number,
  Tmax: number,
  points: number,
  variant: string,
): BandRow[] {
  const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
  const csvPath = join(dir, "bounds.csv");
  const args = [
    "lds",
    "region",
    ...qs.flatMap((q) => ["--q", String(q)]),
    "--Tmin",
    String(Tmin),
    "--Tmax",
    String(Tmax),
    "--points",
    String(points),
    "--variant",
    variant,
    "--emit-csv",
    csvPath,
  ];
  const commands = process.env.SPECFILT_CMD
    ? [process.env.SPECFILT_CMD.split(" ")]
    : [["specfilt"], ["python3", "-m", "specfilt.cli"]];
  try {
    let lastError = "";
    for (const cmd of commands) {
      const res = spawnSync(cmd[0], [...cmd.slice(1), ...args], { encoding: "utf8" });
      if (res.status === 0) {
        return parseBounds(readFileSync(csvPath, "utf8"), csvPath);
      }
      lastError = res.error ? String(res.error) : res.stderr.trim();
    }
    throw new Error(`could not run the specfilt CLI: ${lastError}`);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

export interface RegionPlotOpts {
  qs: number[];
  Tmin: number;
  Tmax: number;
  outPath: string;
  variant?: string;
  points?: number;
  boundsCsv?: string; // pre-exported bounds; skips running the primary CLI
  width?: number;
  height?: number;
}

/** Eigenvalue band vs horizon: one shaded vertical slice per (q, T). */
export function plotRegionDiagram(opts: RegionPlotOpts): void {
  if (!(opts.Tmin < opts.Tmax)) {
    throw new Error(`empty horizon range [${opts.Tmin}, ${opts.Tmax}]`);
  }
  if (opts.qs.length === 0) {
    throw new Error("need at least one q");
  }
  const variant = opts.variant ?? "vanilla";
  const rows = opts.boundsCsv
    ? parseBounds(readFileSync(opts.boundsCsv, "utf8"), opts.boundsCsv)
    : fetchBounds(opts.qs, opts.Tmin, opts.Tmax, opts.points ?? 33, variant);
  const wanted = rows.filter((row) => opts.qs.includes(row.q));
  const filled = wanted.filter((row) => !row.empty);
  if (filled.length === 0) {
    throw new Error("band is empty everywhere in this range");
  }

  const W = opts.width ?? 900;
  const H = opts.height ?? 600;
  const area: Area = { x0: 78, y0: 40, x1: W - 16, y1: H - 48 };
  const r = new Raster(W, H);

  const Ts = [...new Set(wanted.map((row) => row.T))].sort((a, b) => a - b);
  const yMin = Math.min(...filled.map((row) => row.left));
  const pad = (1 - yMin) * 0.08;
  const xScale = log10Scale([Ts[0], Ts[Ts.length - 1]], [area.x0 + 24, area.x1 - 24]);
  const yScale = linearScale([yMin - pad, 1 + pad * 0.5], [area.y1, area.y0]);

  const tickEvery = Math.max(1, Math.ceil(Ts.length / 7));
  const xTicks = Ts.filter((_, i) => i % tickEvery === 0);
  frame(r, area, {
    title: `eigenvalue band vs T (${filled[0].variant})`,
    xLabel: "T (log scale)",
    yLabel: "eigenvalue",
    xTicks,
    xTickLabels: xTicks.map((t) => String(t)),
    yTicks: linearTicks(yMin - pad, 1, 5),
    xScale,
    yScale,
  });
  r.line(area.x0, yScale(1), area.x1, yScale(1), GREY); // the alpha = 1 ceiling

  const sliceW = Math.max(3, Math.min(26, (0.7 * (area.x1 - area.x0)) / Ts.length));
  const qsSorted = [...opts.qs].sort((a, b) => a - b);
  qsSorted.forEach((q, i) => {
    const color = PALETTE[i % PALETTE.length];
    for (const row of wanted) {
      if (row.q !== q || row.empty) continue;
      const x = xScale(row.T);
      const yTop = yScale(row.right);
      const yBot = yScale(row.left);
      r.fillRect(x - sliceW / 2, yTop, sliceW, Math.max(1, yBot - yTop), color, 0.45);
    }
  });

  legend(
    r,
    area,
    qsSorted.map((q, i) => ({ label: `q = ${fmt(q)}`, color: PALETTE[i % PALETTE.length] })),
  );
  writeFileSync(opts.outPath, r.toPng());
}
