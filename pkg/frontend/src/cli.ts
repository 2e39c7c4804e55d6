#!/usr/bin/env node
import { realpathSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { parseArgs } from "node:util";
import { plotLossCurves } from "./loss.js";
import { plotRegionDiagram } from "./regions.js";

const USAGE = `usage:
  plot loss --in <sweep-dir> --out <png> [--logy]
  plot regions --q <float> [--q <float> ...] --Tmin <int> --Tmax <int> --out <png>
               [--variant vanilla|two-ar] [--points <int>] [--bounds-csv <file>]`;

function lossCommand(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      in: { type: "string" },
      out: { type: "string" },
      logy: { type: "boolean", default: false },
    },
  });
  if (!values.in || !values.out) {
    throw new Error("loss needs --in and --out");
  }
  plotLossCurves({ inDir: values.in, outPath: values.out, logy: values.logy });
  console.log(`wrote ${values.out}`);
  return 0;
}

function regionsCommand(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      q: { type: "string", multiple: true },
      Tmin: { type: "string" },
      Tmax: { type: "string" },
      out: { type: "string" },
      variant: { type: "string", default: "vanilla" },
      points: { type: "string", default: "33" },
      "bounds-csv": { type: "string" },
    },
  });
  if (!values.q?.length || !values.Tmin || !values.Tmax || !values.out) {
    throw new Error("regions needs --q, --Tmin, --Tmax, and --out");
  }
  const qs = values.q.map((s) => {
    const v = Number(s);
    if (!Number.isFinite(v)) throw new Error(`bad q value: ${s}`);
    return v;
  });
  plotRegionDiagram({
    qs,
    Tmin: Number(values.Tmin),
    Tmax: Number(values.Tmax),
    outPath: values.out,
    variant: values.variant,
    points: Number(values.points),
    boundsCsv: values["bounds-csv"],
  });
  console.log(`wrote ${values.out}`);
  return 0;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "loss") return lossCommand(rest);
    if (command === "regions") return regionsCommand(rest);
    console.error(USAGE);
    return 2;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 2;
  }
}

// Run only when invoked as a script (also via the npm bin symlink).
if (process.argv[1] && fileURLToPath(import.meta.url) === realpathSync(process.argv[1])) {
  process.exitCode = main(process.argv.slice(2));
}
