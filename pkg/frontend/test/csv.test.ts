import { describe, expect, it } from "vitest";

import { CsvFormatError, column, combineColumns,
  parseHarnessCsv } from "../src/csv.js";

const SAMPLE = `# kind=memory
# p_2q=0.003
cycles,shots,reruns,accepted
1,100,3,90
2,100,5,80
`;

describe("harness CSV parsing", () => {
  it("separates config comments from data", () => {
    const rec = parseHarnessCsv(SAMPLE);
    expect(rec.config.kind).toBe("memory");
    expect(rec.config.p_2q).toBe("0.003");
    expect(rec.columns).toEqual(["cycles", "shots", "reruns", "accepted"]);
    expect(rec.rows).toEqual([[1, 100, 3, 90], [2, 100, 5, 80]]);
  });

  it("extracts columns by name", () => {
    const rec = parseHarnessCsv(SAMPLE);
    expect(column(rec, "accepted")).toEqual([90, 80]);
  });

  it("rejects a missing column", () => {
    const rec = parseHarnessCsv(SAMPLE);
    expect(() => column(rec, "survivors")).toThrow(CsvFormatError);
  });

  it("combines signed column terms", () => {
    const rec = parseHarnessCsv(SAMPLE);
    expect(combineColumns(rec, ["shots", "-reruns"])).toEqual([97, 95]);
  });

  it("rejects empty data", () => {
    expect(() => parseHarnessCsv("# kind=x\na,b\n")).toThrow(CsvFormatError);
  });

  it("rejects non-numeric cells", () => {
    expect(() => parseHarnessCsv("a,b\n1,oops\n")).toThrow(CsvFormatError);
  });

  it("rejects ragged rows", () => {
    expect(() => parseHarnessCsv("a,b\n1,2,3\n")).toThrow(CsvFormatError);
  });
});
