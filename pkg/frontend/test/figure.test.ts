import { fileURLToPath } from "url";
import { describe, expect, it } from "vitest";
import { readSweepCsv, type SweepRow } from "../src/csv.js";
import { buildFigure } from "../src/figure.js";
import { figureSpecSchema } from "../src/spec.js";

const fixture = (name: string) =>
  fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));

const spec = (input: string, x: "N" | "T", seriesBy: "nonlinearity" | "N") =>
  figureSpecSchema.parse({ input, x, seriesBy, output: "out.svg" });

describe("buildFigure", () => {
  it("groups the burgers sweep into one series per nonlinearity level", () => {
    const rows = readSweepCsv(fixture("burgers_f2_sweep.csv"));
    const fig = buildFigure(rows, spec("in.csv", "N", "nonlinearity"));
    expect(fig.series.map((s) => s.key)).toEqual([0.5, 1, 2, 4]);
    expect(fig.series.map((s) => s.label)).toEqual([
      "nonlinearity = 0.5",
      "nonlinearity = 1",
      "nonlinearity = 2",
      "nonlinearity = 4",
    ]);
    for (const s of fig.series) {
      expect(s.points.map((p) => p.x)).toEqual([2, 3, 4, 5]);
      expect(s.capped).toHaveLength(0);
    }
  });

  it("groups the fpu duration sweep into one series per N", () => {
    const rows = readSweepCsv(fixture("fpu_T_sweep.csv"));
    const fig = buildFigure(rows, spec("in.csv", "T", "N"));
    expect(fig.series.map((s) => s.key)).toEqual([2, 3, 4]);
    for (const s of fig.series) {
      expect(s.points.map((p) => p.x)).toEqual([2.5, 5, 10]);
    }
  });

  it("routes diverged rows into capped markers, not line points", () => {
    const rows = readSweepCsv(fixture("bernoulli_mixed.csv"));
    const fig = buildFigure(rows, spec("in.csv", "N", "nonlinearity"));
    expect(fig.series.map((s) => s.key)).toEqual([0.1, 10]);
    expect(fig.series[0].points).toHaveLength(2);
    expect(fig.series[0].capped).toHaveLength(0);
    expect(fig.series[1].points).toHaveLength(0);
    expect(fig.series[1].capped).toEqual([2, 3]);
  });

  it("drops nonpositive errors from log plots but keeps them on linear ones", () => {
    const rows: SweepRow[] = [
      { model: "m", N: 2, T: 1, nonlinearity: 0.5, finalError: 0, status: "ok" },
      { model: "m", N: 3, T: 1, nonlinearity: 0.5, finalError: 1e-6, status: "ok" },
    ];
    const logFig = buildFigure(rows, spec("in.csv", "N", "nonlinearity"));
    expect(logFig.droppedNonpositive).toBe(1);
    expect(logFig.series[0].points).toHaveLength(1);

    const linSpec = figureSpecSchema.parse({
      input: "in.csv",
      x: "N",
      seriesBy: "nonlinearity",
      logY: false,
      output: "out.svg",
    });
    const linFig = buildFigure(rows, linSpec);
    expect(linFig.droppedNonpositive).toBe(0);
    expect(linFig.series[0].points).toHaveLength(2);
  });

  it("sorts points by x even when rows arrive shuffled", () => {
    const rows = readSweepCsv(fixture("kdv_f2_sweep.csv")).reverse();
    const fig = buildFigure(rows, spec("in.csv", "N", "nonlinearity"));
    for (const s of fig.series) {
      const xs = s.points.map((p) => p.x);
      expect(xs).toEqual([...xs].sort((a, b) => a - b));
    }
  });
});
