/** Figure rendering: PlotSpec + harness CSV -> SVG image + fit summary. */

import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { dirname, join, resolve, basename } from "node:path";

import { CsvFormatError, HarnessRecord, column, combineColumns,
  parseHarnessCsv } from "./csv.js";
import { FitError, decayFit, powerlawFit } from "./fit.js";
import { PlotSpec, SeriesSpec, loadPlotSpec } from "./spec.js";
import { MARGIN, HEIGHT, PALETTE, SvgFigure, WIDTH, linearScale,
  logScale } from "./svg.js";

export interface SeriesData {
  spec: SeriesSpec;
  x: number[];
  rate: number[];
  events: number[];
  trials: number[];
}

export interface RenderResult {
  imagePath: string;
  summaryPath: string;
  /** per-series fit statistics, full precision */
  summary: Record<string, Record<string, number>>;
}

function seriesData(rec: HarnessRecord, spec: PlotSpec): SeriesData[] {
  const xs = column(rec, spec.x);
  return spec.series.map((s) => {
    const events = column(rec, s.events);
    const trials = combineColumns(rec, s.trials);
    const rate = events.map((e, i) => {
      if (trials[i] < 0) {
        throw new CsvFormatError(
          `negative trial count for series ${s.label}`);
      }
      return trials[i] > 0 ? e / trials[i] : NaN;
    });
    return { spec: s, x: xs, rate, events, trials };
  });
}

function plotRange(values: number[]): [number, number] {
  const v = values.filter((x) => Number.isFinite(x) && x > 0);
  if (v.length === 0) {
    throw new CsvFormatError("no positive values to plot");
  }
  return [Math.min(...v), Math.max(...v)];
}

function renderScaling(spec: PlotSpec, data: SeriesData[],
                       fig: SvgFigure,
                       summary: Record<string, Record<string, number>>): void {
  const [xLo, xHi] = plotRange(data.flatMap((d) => d.x));
  const [yLo, yHi] = plotRange(data.flatMap((d) => d.rate));
  const xs = logScale(xLo / 1.3, xHi * 1.3, MARGIN.left,
    WIDTH - MARGIN.right);
  const ys = logScale(yLo / 2, Math.min(yHi * 2, 1.0), HEIGHT - MARGIN.bottom,
    MARGIN.top);
  fig.axes(xs, ys);
  const legend: Array<{ label: string; color: string }> = [];
  data.forEach((d, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = d.x.map((x, j) => [x, d.rate[j]] as [number, number])
      .filter(([, r]) => Number.isFinite(r) && r > 0)
      .map(([x, r]) => [xs(x), ys(r)] as [number, number]);
    fig.markers(pts, color);
    let label = d.spec.label;
    if (spec.fit) {
      const fit = powerlawFit(d.x, d.events, d.trials, d.spec.transform);
      summary[d.spec.label] = { slope: fit.slope, intercept: fit.intercept };
      const line = [xLo, xHi].map((p) => {
        const raw = Math.exp(fit.intercept + fit.slope * Math.log(p));
        const rate = d.spec.transform === "intensity"
          ? -Math.expm1(-raw) : raw;
        return [xs(p), ys(Math.max(rate, yLo / 2))] as [number, number];
      });
      fig.polyline(line, color, true);
      label += ` (slope ${fit.slope.toFixed(2)})`;
    }
    legend.push({ label, color });
  });
  fig.legend(legend);
}

function renderDecay(spec: PlotSpec, data: SeriesData[], fig: SvgFigure,
                     summary: Record<string, Record<string, number>>): void {
  const [xLo, xHi] = plotRange(data.flatMap((d) => d.x));
  const xs = linearScale(0, xHi * 1.05, MARGIN.left, WIDTH - MARGIN.right);
  const ys = linearScale(0.4, 1.0, HEIGHT - MARGIN.bottom, MARGIN.top);
  fig.axes(xs, ys);
  const legend: Array<{ label: string; color: string }> = [];
  data.forEach((d, i) => {
    const color = PALETTE[i % PALETTE.length];
    fig.markers(d.x.map((x, j) => [xs(x), ys(d.rate[j])]), color);
    let label = d.spec.label;
    if (spec.fit) {
      const fit = decayFit(d.x, d.events, d.trials);
      summary[d.spec.label] = { amplitude: fit.amplitude,
        fidelity: fit.fidelity };
      const line: Array<[number, number]> = [];
      for (let k = 0; k <= 64; k++) {
        const x = xLo + ((xHi - xLo) * k) / 64;
        const m = (1 + fit.amplitude * Math.pow(fit.fidelity, x)) / 2;
        line.push([xs(x), ys(m)]);
      }
      fig.polyline(line, color, true);
      label += ` (f ${fit.fidelity.toFixed(4)})`;
    }
    legend.push({ label, color });
  });
  fig.legend(legend);
}

function renderAcceptance(spec: PlotSpec, data: SeriesData[],
                          fig: SvgFigure,
                          summary: Record<string, Record<string, number>>,
                          ): void {
  const xsAll = data[0].x;
  const xs = linearScale(-0.5, xsAll.length - 0.5, MARGIN.left,
    WIDTH - MARGIN.right);
  xs.ticks = xsAll.map((_, i) => i);
  xs.tickLabel = (v: number) => String(xsAll[Math.round(v)]);
  const ys = linearScale(0, 1, HEIGHT - MARGIN.bottom, MARGIN.top);
  fig.axes(xs, ys);
  const groupW = (xs(1) - xs(0)) * 0.8;
  const barW = groupW / data.length;
  const legend: Array<{ label: string; color: string }> = [];
  data.forEach((d, i) => {
    const color = PALETTE[i % PALETTE.length];
    d.x.forEach((_, j) => {
      const r = d.rate[j];
      if (!Number.isFinite(r)) return;
      const cx = xs(j) - groupW / 2 + i * barW;
      fig.bar(cx, ys(r), barW, ys(0) - ys(r), color);
      summary[`${d.spec.label}@${d.x[j]}`] = { acceptance: r };
    });
    legend.push({ label: d.spec.label, color });
  });
  fig.legend(legend);
}

export function render(specPath: string, outDir: string): RenderResult {
  const spec = loadPlotSpec(specPath);
  const csvPath = resolve(dirname(specPath), spec.input);
  const rec = parseHarnessCsv(readFileSync(csvPath, "utf-8"));
  const data = seriesData(rec, spec);
  const fig = new SvgFigure(spec.title, spec.xlabel, spec.ylabel);
  const summary: Record<string, Record<string, number>> = {};
  if (spec.kind === "scaling") {
    renderScaling(spec, data, fig, summary);
  } else if (spec.kind === "decay") {
    renderDecay(spec, data, fig, summary);
  } else {
    renderAcceptance(spec, data, fig, summary);
  }
  mkdirSync(outDir, { recursive: true });
  const imagePath = join(outDir, spec.output);
  writeFileSync(imagePath, fig.toString());
  const summaryPath = join(outDir,
    basename(spec.output).replace(/\.[a-z]+$/, "") + ".summary.json");
  const lines: Record<string, Record<string, string>> = {};
  for (const [series, stats] of Object.entries(summary)) {
    lines[series] = Object.fromEntries(Object.entries(stats)
      .map(([k, v]) => [k, v.toPrecision(17)]));
  }
  writeFileSync(summaryPath, JSON.stringify(lines, null, 2) + "\n");
  return { imagePath, summaryPath, summary };
}

export { CsvFormatError, FitError };
