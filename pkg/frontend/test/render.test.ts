import { mkdtempSync, readFileSync } from "fs";
import { tmpdir } from "os";
import { fileURLToPath } from "url";
import { join } from "path";
import { describe, expect, it } from "vitest";
import { readSweepCsv } from "../src/csv.js";
import { buildFigure } from "../src/figure.js";
import { renderFigure } from "../src/render.js";
import { figureSpecSchema, type FigureSpec } from "../src/spec.js";
import { renderSvg } from "../src/svg.js";

const fixture = (name: string) =>
  fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));

const outDir = () => mkdtempSync(join(tmpdir(), "plots-"));

function makeSpec(overrides: Partial<FigureSpec> & { input: string; output: string }) {
  return figureSpecSchema.parse({
    x: "N",
    seriesBy: "nonlinearity",
    ...overrides,
  });
}

const count = (haystack: string, needle: string) =>
  haystack.split(needle).length - 1;

describe("renderFigure", () => {
  // one sweep per model family, as produced by `expcli sweep`
  const sweeps: Array<{
    name: string;
    x: "N" | "T";
    seriesBy: "nonlinearity" | "N";
    series: number;
  }> = [
    { name: "burgers_f2_sweep.csv", x: "N", seriesBy: "nonlinearity", series: 4 },
    { name: "kdv_f2_sweep.csv", x: "N", seriesBy: "nonlinearity", series: 3 },
    { name: "fpu_T_sweep.csv", x: "T", seriesBy: "N", series: 3 },
  ];

  for (const sweep of sweeps) {
    it(`renders ${sweep.name} with ${sweep.series} series and a log error axis`, () => {
      const out = join(outDir(), "fig.svg");
      const result = renderFigure(
        makeSpec({
          input: fixture(sweep.name),
          x: sweep.x,
          seriesBy: sweep.seriesBy,
          output: out,
        })
      );
      expect(result.seriesCount).toBe(sweep.series);
      expect(result.width).toBe(720);
      expect(result.height).toBe(480);
      const svg = readFileSync(out, "utf8");
      expect(svg).toContain('width="720" height="480"');
      expect(count(svg, 'class="series"')).toBe(sweep.series);
      // decade tick labels prove the log scale
      expect(svg).toMatch(/class="ytick"[^>]*>1e-\d+</);
    });
  }

  it("leaves the input CSV byte-identical", () => {
    const input = fixture("burgers_f2_sweep.csv");
    const before = readFileSync(input);
    renderFigure(makeSpec({ input, output: join(outDir(), "fig.svg") }));
    expect(readFileSync(input).equals(before)).toBe(true);
  });

  it("renders identical bytes for the same csv and spec", () => {
    const dir = outDir();
    const a = join(dir, "a.svg");
    const b = join(dir, "b.svg");
    renderFigure(makeSpec({ input: fixture("kdv_f2_sweep.csv"), output: a }));
    renderFigure(makeSpec({ input: fixture("kdv_f2_sweep.csv"), output: b }));
    expect(readFileSync(a).equals(readFileSync(b))).toBe(true);
  });

  it("draws one capped marker per diverged row", () => {
    const out = join(outDir(), "fig.svg");
    const result = renderFigure(
      makeSpec({ input: fixture("bernoulli_mixed.csv"), output: out })
    );
    expect(result.cappedCount).toBe(2);
    expect(count(readFileSync(out, "utf8"), 'class="capped"')).toBe(2);
  });

  it("honors custom dimensions (golden-dimension check)", () => {
    const out = join(outDir(), "fig.svg");
    renderFigure(
      makeSpec({
        input: fixture("burgers_f2_sweep.csv"),
        output: out,
        width: 400,
        height: 300,
      })
    );
    expect(readFileSync(out, "utf8")).toContain('width="400" height="300"');
  });

  it("writes a PNG whose header matches the FigureSpec dimensions", () => {
    const out = join(outDir(), "fig.png");
    renderFigure(makeSpec({ input: fixture("burgers_f2_sweep.csv"), output: out }));
    const png = readFileSync(out);
    expect(png.subarray(1, 4).toString()).toBe("PNG");
    expect(png.readUInt32BE(16)).toBe(720);
    expect(png.readUInt32BE(20)).toBe(480);
  });
});

describe("renderSvg", () => {
  it("uses a linear axis when logY is off", () => {
    const rows = readSweepCsv(fixture("burgers_f2_sweep.csv"));
    const spec = figureSpecSchema.parse({
      input: "in.csv",
      x: "N",
      seriesBy: "nonlinearity",
      logY: false,
      output: "out.svg",
    });
    const svg = renderSvg(buildFigure(rows, spec), 720, 480);
    expect(svg).not.toMatch(/class="ytick"[^>]*>1e-\d+</);
    expect(svg).toContain(">0<");
  });

  it("still renders when every row diverged", () => {
    const rows = readSweepCsv(fixture("bernoulli_mixed.csv")).filter(
      (r) => r.status === "diverged"
    );
    const spec = figureSpecSchema.parse({
      input: "in.csv",
      x: "N",
      seriesBy: "nonlinearity",
      output: "out.svg",
    });
    const svg = renderSvg(buildFigure(rows, spec), 720, 480);
    expect(count(svg, 'class="capped"')).toBe(2);
    expect(count(svg, "<polyline")).toBe(0);
  });
});
