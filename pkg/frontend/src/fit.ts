/** Fit routines mirroring the estimator conventions of the Python package.
 *
 * Every annotated statistic on a figure is recomputed here from the CSV
 * counts; nothing is hand-entered.  The power-law point estimate must agree
 * with the Python `fit_powerlaw` output to 1e-9, so the formulas below
 * follow it exactly: weighted least squares in log-log space with the event
 * count as weight, optionally fitting the exponential intensity
 * -ln(1 - rate) instead of the raw rate so saturating rates stay linear.
 */

export class FitError extends Error {}

export type Transform = "identity" | "intensity";

export interface LineFit {
  slope: number;
  intercept: number;
}

/** Weighted least-squares line through (x, y) with weights w. */
export function weightedLine(x: number[], y: number[], w: number[]): LineFit {
  const wsum = w.reduce((a, b) => a + b, 0);
  const wt = w.map((v) => v / wsum);
  let xm = 0;
  let ym = 0;
  for (let i = 0; i < x.length; i++) {
    xm += wt[i] * x[i];
    ym += wt[i] * y[i];
  }
  let num = 0;
  let den = 0;
  for (let i = 0; i < x.length; i++) {
    num += wt[i] * (x[i] - xm) * (y[i] - ym);
    den += wt[i] * (x[i] - xm) * (x[i] - xm);
  }
  const slope = num / den;
  return { slope, intercept: ym - slope * xm };
}

/** Power-law fit rate = C p^beta from per-p (events, trials) counts.
 *
 * Points with zero events or fully saturated counts are dropped, matching
 * the primary estimator; fewer than two surviving points is an error.
 */
export function powerlawFit(ps: number[], events: number[], trials: number[],
                            transform: Transform = "identity"): LineFit {
  const xs: number[] = [];
  const ys: number[] = [];
  const ws: number[] = [];
  for (let i = 0; i < ps.length; i++) {
    const e = events[i];
    const t = trials[i];
    if (e <= 0 || e >= t) continue;
    const r = e / t;
    const val = transform === "intensity" ? -Math.log1p(-r) : r;
    xs.push(Math.log(ps[i]));
    ys.push(Math.log(val));
    ws.push(e);
  }
  if (xs.length < 2) {
    throw new FitError(
      `power-law fit needs at least 2 usable points, got ${xs.length}`);
  }
  return weightedLine(xs, ys, ws);
}

/** Exponential-decay fit: match rate m(L) = (1 + A f^L) / 2.
 *
 * Log-linear least squares on 2 m - 1 with binomial-count weights; used for
 * the decay-panel annotation (an overlay, not a cross-checked statistic).
 */
export function decayFit(depths: number[], matches: number[],
                         trials: number[]): { amplitude: number; fidelity: number } {
  const xs: number[] = [];
  const ys: number[] = [];
  const ws: number[] = [];
  for (let i = 0; i < depths.length; i++) {
    if (trials[i] <= 0) continue;
    const a = 2 * (matches[i] / trials[i]) - 1;
    if (a <= 0) continue;
    xs.push(depths[i]);
    ys.push(Math.log(a));
    ws.push(trials[i] * a * a);
  }
  if (xs.length < 2) {
    throw new FitError(
      `decay fit needs at least 2 usable depths, got ${xs.length}`);
  }
  const line = weightedLine(xs, ys, ws);
  return { amplitude: Math.exp(line.intercept), fidelity: Math.exp(line.slope) };
}
