import { writeFileSync } from "fs";
import { Resvg } from "@resvg/resvg-js";
import { readSweepCsv } from "./csv.js";
import { buildFigure } from "./figure.js";
import type { FigureSpec } from "./spec.js";
import { renderSvg } from "./svg.js";

export interface RenderResult {
  output: string;
  width: number;
  height: number;
  seriesCount: number;
  rowCount: number;
  cappedCount: number;
}

/** Reads the sweep CSV (never writes it), renders, writes the image file. */
export function renderFigure(spec: FigureSpec): RenderResult {
  const rows = readSweepCsv(spec.input);
  const figure = buildFigure(rows, spec);
  const svg = renderSvg(figure, spec.width, spec.height);
  if (spec.output.toLowerCase().endsWith(".png")) {
    writeFileSync(spec.output, new Resvg(svg).render().asPng());
  } else {
    writeFileSync(spec.output, svg);
  }
  return {
    output: spec.output,
    width: spec.width,
    height: spec.height,
    seriesCount: figure.series.length,
    rowCount: rows.length,
    cappedCount: figure.series.reduce((n, s) => n + s.capped.length, 0),
  };
}
