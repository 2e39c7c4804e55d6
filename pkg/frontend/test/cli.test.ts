import { existsSync, mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterEach, describe, expect, it, vi } from "vitest";
import { main } from "../src/cli.js";

const dirs: string[] = [];

function tmp(): string {
  const d = mkdtempSync(join(tmpdir(), "plotkit-cli-"));
  dirs.push(d);
  return d;
}

afterEach(() => {
  while (dirs.length) rmSync(dirs.pop()!, { recursive: true, force: true });
  vi.restoreAllMocks();
});

describe("cli", () => {
  it("prints usage and exits 2 without a command", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(main([])).toBe(2);
    expect(err.mock.calls[0][0]).toMatch(/usage:/);
  });

  it("exits 2 on an unknown command", () => {
    vi.spyOn(console, "error").mockImplementation(() => {});
    expect(main(["scatter"])).toBe(2);
  });

  it("loss requires --in and --out", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(main(["loss", "--in", "somewhere"])).toBe(2);
    expect(String(err.mock.calls[0][0])).toMatch(/error: loss needs/);
  });

  it("loss renders a fixture directory", () => {
    const dir = tmp();
    const lines = ["step,mean_loss,smoothed_loss"];
    for (let t = 1; t <= 50; t++) lines.push(`${t},0.01,0.01`);
    writeFileSync(join(dir, "aggregate_q0.5.csv"), lines.join("\n") + "\n");
    const out = join(dir, "out.png");
    vi.spyOn(console, "log").mockImplementation(() => {});
    expect(main(["loss", "--in", dir, "--out", out])).toBe(0);
    expect(existsSync(out)).toBe(true);
  });

  it("regions validates q values", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(
      main(["regions", "--q", "abc", "--Tmin", "4", "--Tmax", "8", "--out", "x.png"]),
    ).toBe(2);
    expect(String(err.mock.calls[0][0])).toMatch(/bad q value/);
  });

  it("regions reports a missing bounds file as an error exit", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(
      main([
        "regions",
        "--q",
        "0.5",
        "--Tmin",
        "4",
        "--Tmax",
        "1024",
        "--out",
        "x.png",
        "--bounds-csv",
        "/no/such/bounds.csv",
      ]),
    ).toBe(2);
    expect(String(err.mock.calls[0][0])).toMatch(/error:/);
  });
});
