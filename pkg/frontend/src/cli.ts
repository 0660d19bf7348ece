#!/usr/bin/env node
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { SchemaError } from "./errors.js";
import { renderFigure } from "./render.js";
import { loadFigureSpec } from "./spec.js";

const args = yargs(hideBin(process.argv))
  .scriptName("plot")
  .usage("$0 --spec figure.json")
  .option("spec", {
    type: "string",
    demandOption: true,
    describe: "path to a FigureSpec JSON document",
  })
  .strict()
  .fail((msg) => {
    console.error(msg);
    process.exit(2);
  })
  .parseSync();

try {
  const result = renderFigure(loadFigureSpec(args.spec));
  console.log(
    `wrote ${result.output} (${result.width}x${result.height}, ` +
      `${result.seriesCount} series, ${result.rowCount} rows, ` +
      `${result.cappedCount} capped)`
  );
} catch (err) {
  if (err instanceof SchemaError) {
    console.error(err.message);
    process.exit(2);
  }
  throw err;
}
