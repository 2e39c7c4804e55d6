/** Axis mapping and tick placement. */

export interface Scale {
  (v: number): number;
  readonly domain: [number, number];
  readonly range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const f = (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
  return Object.assign(f, { domain, range });
}

export function log10Scale(domain: [number, number], range: [number, number]): Scale {
  if (domain[0] <= 0 || domain[1] <= 0) {
    throw new Error(`log scale needs a positive domain, got [${domain}]`);
  }
  const inner = linearScale([Math.log10(domain[0]), Math.log10(domain[1])], range);
  const f = (v: number) => inner(Math.log10(v));
  return Object.assign(f, { domain, range });
}

/** 10^e computed so that negative decades match their literals exactly. */
function pow10(e: number): number {
  return e < 0 ? 1 / Math.pow(10, -e) : Math.pow(10, e);
}

/** Round-number ticks covering [lo, hi], roughly `count` of them. */
export function linearTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / count;
  const mag = pow10(Math.floor(Math.log10(rawStep)));
  const err = rawStep / mag;
  // split at geometric midpoints so 0.208 snaps down to 0.2, not up to 0.5
  const step = mag * (err >= Math.sqrt(50) ? 10 : err >= Math.sqrt(10) ? 5 : err >= Math.SQRT2 ? 2 : 1);
  const ticks: number[] = [];
  const i1 = Math.floor(hi / step + 1e-9);
  for (let i = Math.ceil(lo / step - 1e-9); i <= i1; i++) {
    ticks.push(i === 0 ? 0 : i * step);
  }
  return ticks;
}

/** Decade ticks inside [lo, hi]; falls back to linear when under 2 decades. */
export function log10Ticks(lo: number, hi: number): number[] {
  const e0 = Math.ceil(Math.log10(lo) - 1e-9);
  const e1 = Math.floor(Math.log10(hi) + 1e-9);
  if (e1 - e0 < 1) return linearTicks(lo, hi);
  const every = Math.max(1, Math.ceil((e1 - e0) / 8));
  const ticks: number[] = [];
  for (let e = e0; e <= e1; e += every) ticks.push(pow10(e));
  return ticks;
}

/** Compact tick label: trims float noise, switches to e-notation when long. */
export function fmt(v: number): string {
  if (v === 0) return "0";
  const p = Number(v.toPrecision(4));
  let s = String(p);
  if (Math.abs(p) >= 1e5 || Math.abs(p) < 1e-4) {
    s = p.toExponential().replace("e+", "e");
  }
  return s;
}
