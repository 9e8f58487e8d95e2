#!/usr/bin/env node
import { readFileSync, writeFileSync } from "node:fs";

import { buildConvergenceFigure } from "./convergence.js";
import { CsvSchemaError } from "./csv.js";

export function main(argv: string[]): number {
  if (argv.length < 2) {
    console.error("usage: plot-convergence <convergence.csv> <out.svg> [title]");
    return 2;
  }
  const [csvPath, outPath, figureTitle] = argv;
  let text: string;
  try {
    text = readFileSync(csvPath, "utf8");
  } catch (err) {
    console.error(`plot-convergence: cannot read ${csvPath}: ${String(err)}`);
    return 1;
  }
  try {
    const figure = buildConvergenceFigure(text, csvPath, figureTitle);
    writeFileSync(outPath, figure.svg);
  } catch (err) {
    if (err instanceof CsvSchemaError) {
      console.error(`plot-convergence: ${err.message}`);
      return 1;
    }
    throw err;
  }
  console.log(`wrote ${outPath}`);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli-convergence.js")) {
  process.exit(main(process.argv.slice(2)));
}
