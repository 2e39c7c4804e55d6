export { loadAggregates, plotLossCurves } from "./loss.js";
export { fetchBounds, parseBounds, plotRegionDiagram } from "./regions.js";
export { Raster, insertPhys } from "./raster.js";
export { fmt, linearScale, linearTicks, log10Scale, log10Ticks } from "./scale.js";
export { parseCsv, numericColumn } from "./csv.js";
export { main } from "./cli.js";
