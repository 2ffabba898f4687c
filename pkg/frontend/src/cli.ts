#!/usr/bin/env node
/** `icesim-plots render --spec <file> --out <dir>` */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { render } from "./render.js";

export async function main(argv: string[]): Promise<number> {
  let failed = false;
  await yargs(argv)
    .command(
      "render",
      "render a plot spec into an SVG figure plus a fit summary",
      (y) => y
        .option("spec", { type: "string", demandOption: true,
          describe: "plot spec JSON file" })
        .option("out", { type: "string", demandOption: true,
          describe: "output directory" }),
      (args) => {
        try {
          const res = render(args.spec, args.out);
          console.log(`wrote ${res.imagePath}`);
          console.log(`wrote ${res.summaryPath}`);
        } catch (err) {
          console.error(`error: ${(err as Error).message}`);
          failed = true;
        }
      })
    .demandCommand(1)
    .strict()
    .fail((msg, err) => {
      console.error(`error: ${msg ?? err?.message}`);
      failed = true;
    })
    .parseAsync();
  return failed ? 2 : 0;
}

const isDirect = process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() as string);
if (isDirect) {
  main(hideBin(process.argv)).then((code) => { process.exitCode = code; });
}
