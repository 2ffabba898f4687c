/** Plot specification schema and loader. */

import { readFileSync } from "node:fs";
import { z } from "zod";

const seriesSchema = z.object({
  label: z.string(),
  /** events column name */
  events: z.string(),
  /** trial columns, each "col" or "-col", summed with sign */
  trials: z.array(z.string()).min(1),
  transform: z.enum(["identity", "intensity"]).default("identity"),
});

export const plotSpecSchema = z.object({
  /** CSV record path, resolved relative to the spec file */
  input: z.string(),
  kind: z.enum(["scaling", "decay", "acceptance"]),
  /** x-axis column name */
  x: z.string(),
  xlabel: z.string(),
  ylabel: z.string(),
  /** recompute and draw fit overlays with annotations */
  fit: z.boolean().default(true),
  /** output image filename (SVG), resolved inside the --out directory */
  output: z.string(),
  title: z.string().default(""),
  series: z.array(seriesSchema).min(1),
});

export type PlotSpec = z.infer<typeof plotSpecSchema>;
export type SeriesSpec = z.infer<typeof seriesSchema>;

export function loadPlotSpec(path: string): PlotSpec {
  const raw = JSON.parse(readFileSync(path, "utf-8"));
  return plotSpecSchema.parse(raw);
}
