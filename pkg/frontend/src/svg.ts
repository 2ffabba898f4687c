/** Minimal deterministic SVG figure builder.
 *
 * Hand-rolled rather than DOM-based so the byte output is a pure function
 * of the input data: same CSV and spec, same file.
 */

export const WIDTH = 640;
export const HEIGHT = 480;
export const MARGIN = { left: 70, right: 20, top: 40, bottom: 55 };

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd",
  "#ff7f0e", "#8c564b"];

const fmt = (v: number): string => v.toFixed(2);

export interface Scale {
  (v: number): number;
  ticks: number[];
  tickLabel(v: number): string;
}

export function logScale(lo: number, hi: number, rLo: number,
                         rHi: number): Scale {
  const a = Math.log10(lo);
  const b = Math.log10(hi);
  const f = ((v: number) =>
    rLo + ((Math.log10(v) - a) / (b - a || 1)) * (rHi - rLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(a - 1e-9); e <= Math.floor(b + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  f.ticks = ticks.length >= 2 ? ticks : [lo, hi];
  f.tickLabel = (v: number) => {
    const e = Math.round(Math.log10(v));
    return Math.abs(Math.log10(v) - e) < 1e-9 ? `1e${e}` : v.toExponential(1);
  };
  return f;
}

export function linearScale(lo: number, hi: number, rLo: number,
                            rHi: number): Scale {
  const f = ((v: number) =>
    rLo + ((v - lo) / (hi - lo || 1)) * (rHi - rLo)) as Scale;
  const n = 5;
  f.ticks = Array.from({ length: n + 1 },
    (_, i) => lo + ((hi - lo) * i) / n);
  f.tickLabel = (v: number) => (Number.isInteger(v) ? String(v)
    : v.toPrecision(3));
  return f;
}

export class SvgFigure {
  private parts: string[] = [];

  constructor(readonly title: string, readonly xlabel: string,
              readonly ylabel: string) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" ` +
      `height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" ` +
      `font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
    if (title) {
      this.parts.push(this.text(WIDTH / 2, 24, title, 16, "middle"));
    }
    this.parts.push(this.text(WIDTH / 2, HEIGHT - 10, xlabel, 13, "middle"));
    this.parts.push(
      `<text x="16" y="${HEIGHT / 2}" font-size="13" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${HEIGHT / 2})">${escapeXml(ylabel)}</text>`);
  }

  private text(x: number, y: number, s: string, size: number,
               anchor: string): string {
    return `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" ` +
      `text-anchor="${anchor}">${escapeXml(s)}</text>`;
  }

  axes(xs: Scale, ys: Scale): void {
    const { left, right, top, bottom } = MARGIN;
    const x0 = left;
    const x1 = WIDTH - right;
    const y0 = HEIGHT - bottom;
    const y1 = top;
    this.parts.push(
      `<path d="M${x0} ${y1} L${x0} ${y0} L${x1} ${y0}" fill="none" ` +
      `stroke="black" stroke-width="1"/>`);
    for (const t of xs.ticks) {
      const px = xs(t);
      this.parts.push(
        `<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 5}" ` +
        `stroke="black"/>`,
        this.text(px, y0 + 20, xs.tickLabel(t), 11, "middle"));
    }
    for (const t of ys.ticks) {
      const py = ys(t);
      this.parts.push(
        `<line x1="${x0 - 5}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" ` +
        `stroke="black"/>`,
        this.text(x0 - 8, py + 4, ys.tickLabel(t), 11, "end"));
    }
  }

  polyline(pts: Array<[number, number]>, color: string,
           dashed = false): void {
    const d = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    const dash = dashed ? ` stroke-dasharray="6 4"` : "";
    this.parts.push(`<polyline points="${d}" fill="none" ` +
      `stroke="${color}" stroke-width="1.5"${dash}/>`);
  }

  markers(pts: Array<[number, number]>, color: string): void {
    for (const [x, y] of pts) {
      this.parts.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="3.5" ` +
        `fill="${color}"/>`);
    }
  }

  bar(x: number, y: number, w: number, h: number, color: string): void {
    this.parts.push(`<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" ` +
      `height="${fmt(h)}" fill="${color}" fill-opacity="0.8"/>`);
  }

  legend(entries: Array<{ label: string; color: string }>): void {
    let y = MARGIN.top + 14;
    const x = WIDTH - MARGIN.right - 200;
    for (const { label, color } of entries) {
      this.parts.push(
        `<line x1="${x}" y1="${y - 4}" x2="${x + 22}" y2="${y - 4}" ` +
        `stroke="${color}" stroke-width="2"/>`,
        this.text(x + 28, y, label, 12, "start"));
      y += 18;
    }
  }

  toString(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;")
    .replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}
