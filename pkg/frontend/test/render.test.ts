import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { render } from "../src/render.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..",
  "fixtures");

const out = () => mkdtempSync(join(tmpdir(), "plots-"));

describe("render", () => {
  it("produces an SVG and a fit summary for the scaling fixture", () => {
    const res = render(join(FIXTURES, "lookup_scaling.plot.json"), out());
    const svg = readFileSync(res.imagePath, "utf-8");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("P_flag");
    const summary = JSON.parse(readFileSync(res.summaryPath, "utf-8"));
    expect(Object.keys(summary)).toEqual(["P_flag", "P_post", "P_L"]);
  });

  it("annotates the synthetic cubic with slope 3.00", () => {
    const res = render(join(FIXTURES, "cubic.plot.json"), out());
    expect(res.summary.cubic.slope).toBeCloseTo(3.0, 9);
    expect(readFileSync(res.imagePath, "utf-8")).toContain("slope 3.00");
  });

  it("is deterministic: identical inputs give identical bytes", () => {
    const a = render(join(FIXTURES, "memory_decay.plot.json"), out());
    const b = render(join(FIXTURES, "memory_decay.plot.json"), out());
    expect(readFileSync(a.imagePath, "utf-8"))
      .toEqual(readFileSync(b.imagePath, "utf-8"));
  });

  it("renders acceptance bars without fit overlays", () => {
    const res = render(join(FIXTURES, "memory_acceptance.plot.json"), out());
    const svg = readFileSync(res.imagePath, "utf-8");
    expect(svg).toContain("<rect");
    expect(svg).not.toContain("stroke-dasharray");
    for (const stats of Object.values(res.summary)) {
      expect(stats.acceptance).toBeGreaterThan(0);
      expect(stats.acceptance).toBeLessThanOrEqual(1);
    }
  });

  it("fails on a missing column", () => {
    const dir = out();
    const spec = {
      input: join(FIXTURES, "cubic.csv"),
      kind: "scaling", x: "p", xlabel: "p", ylabel: "r", fit: true,
      output: "x.svg",
      series: [{ label: "bad", events: "nonexistent", trials: ["shots"] }],
    };
    const specPath = join(dir, "bad.plot.json");
    writeFileSync(specPath, JSON.stringify(spec));
    expect(() => render(specPath, dir)).toThrow(/nonexistent/);
  });

  it("fails on a decay fixture with a single depth", () => {
    const dir = out();
    writeFileSync(join(dir, "one.csv"), "depth,matches,shots\n4,90,100\n");
    const spec = {
      input: "one.csv", kind: "decay", x: "depth", xlabel: "d",
      ylabel: "m", fit: true, output: "one.svg",
      series: [{ label: "decay", events: "matches", trials: ["shots"] }],
    };
    const specPath = join(dir, "one.plot.json");
    writeFileSync(specPath, JSON.stringify(spec));
    expect(() => render(specPath, dir)).toThrow(/at least 2/);
  });
});
