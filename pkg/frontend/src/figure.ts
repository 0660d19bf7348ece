import type { SweepRow } from "./csv.js";
import type { FigureSpec } from "./spec.js";

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  /** Numeric value of the seriesBy column for this group. */
  key: number;
  label: string;
  /** Converged rows, sorted by x. */
  points: Point[];
  /** x positions of diverged rows, drawn as capped markers at the axis top. */
  capped: number[];
}

export interface Figure {
  title: string;
  xLabel: string;
  yLabel: string;
  logY: boolean;
  series: Series[];
  /** Rows silently omitted because y <= 0 cannot sit on a log axis. */
  droppedNonpositive: number;
}

export function buildFigure(rows: SweepRow[], spec: FigureSpec): Figure {
  const groups = new Map<number, Series>();
  let dropped = 0;
  for (const row of rows) {
    const key = row[spec.seriesBy];
    let series = groups.get(key);
    if (!series) {
      series = {
        key,
        label: `${spec.seriesBy} = ${key}`,
        points: [],
        capped: [],
      };
      groups.set(key, series);
    }
    const x = row[spec.x];
    if (row.status === "diverged") {
      series.capped.push(x);
    } else if (spec.logY && !(row.finalError > 0)) {
      dropped += 1;
    } else {
      series.points.push({ x, y: row.finalError });
    }
  }
  const series = [...groups.values()].sort((a, b) => a.key - b.key);
  for (const s of series) {
    s.points.sort((a, b) => a.x - b.x);
    s.capped.sort((a, b) => a - b);
  }
  return {
    title: spec.title ?? `finalError vs ${spec.x} by ${spec.seriesBy}`,
    xLabel: spec.x,
    yLabel: "finalError",
    logY: spec.logY,
    series,
    droppedNonpositive: dropped,
  };
}
