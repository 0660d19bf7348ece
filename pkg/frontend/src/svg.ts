import type { Figure, Series } from "./figure.js";

const MARGIN = { top: 44, right: 184, bottom: 54, left: 78 };

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

const px = (v: number) => v.toFixed(2);

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1).replace("e+", "e");
  return String(Math.round(v * 1e6) / 1e6);
}

function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

/** Deterministic SVG: same figure + dimensions always yields the same bytes. */
export function renderSvg(fig: Figure, width: number, height: number): string {
  const left = MARGIN.left;
  const right = width - MARGIN.right;
  const top = MARGIN.top;
  const bottom = height - MARGIN.bottom;

  const xs = fig.series.flatMap((s) => s.points.map((p) => p.x).concat(s.capped));
  const ys = fig.series.flatMap((s) => s.points.map((p) => p.y));

  let [x0, x1] = xs.length ? [Math.min(...xs), Math.max(...xs)] : [0, 1];
  if (x0 === x1) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  const X = (v: number) => left + ((v - x0) / (x1 - x0)) * (right - left);

  let Y: (v: number) => number;
  let yTicks: number[];
  let yFormat: (v: number) => string;
  if (fig.logY) {
    // Decade-aligned log axis; falls back to the guard range when every
    // row diverged and there is no finite y data at all.
    let dLo: number;
    let dHi: number;
    if (ys.length) {
      dLo = Math.floor(Math.log10(Math.min(...ys)));
      dHi = Math.ceil(Math.log10(Math.max(...ys)));
      if (dLo === dHi) dHi = dLo + 1;
    } else {
      dLo = 0;
      dHi = 12;
    }
    Y = (v: number) =>
      bottom - ((Math.log10(v) - dLo) / (dHi - dLo)) * (bottom - top);
    const step = Math.max(1, Math.ceil((dHi - dLo) / 12));
    yTicks = [];
    for (let d = dLo; d <= dHi; d += step) yTicks.push(Math.pow(10, d));
    yFormat = (v: number) => `1e${Math.round(Math.log10(v))}`;
  } else {
    const yLo = ys.length ? Math.min(0, Math.min(...ys)) : 0;
    const yHi = ys.length ? Math.max(...ys) : 1;
    const span = yHi - yLo || 1;
    Y = (v: number) => bottom - ((v - yLo) / span) * (bottom - top);
    yTicks = [0, 1, 2, 3, 4].map((i) => yLo + (i * span) / 4);
    yFormat = fmtTick;
  }

  let xTicks = uniqueSorted(xs);
  if (xTicks.length > 12) {
    const stride = Math.ceil(xTicks.length / 12);
    xTicks = xTicks.filter((_, i) => i % stride === 0);
  }
  if (xTicks.length === 0) xTicks = [x0, x1];

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`
  );
  parts.push(`<rect width="${width}" height="${height}" fill="#ffffff"/>`);
  parts.push(
    `<text x="${px((left + right) / 2)}" y="24" text-anchor="middle" font-size="15">` +
      `${escapeXml(fig.title)}</text>`
  );

  // gridlines + y ticks
  for (const t of yTicks) {
    const y = Y(t);
    parts.push(
      `<line x1="${px(left)}" x2="${px(right)}" y1="${px(y)}" y2="${px(y)}" ` +
        `stroke="#dddddd" stroke-width="1"/>`
    );
    parts.push(
      `<text class="ytick" x="${px(left - 8)}" y="${px(y + 4)}" ` +
        `text-anchor="end">${yFormat(t)}</text>`
    );
  }
  // x ticks
  for (const t of xTicks) {
    const x = X(t);
    parts.push(
      `<line x1="${px(x)}" x2="${px(x)}" y1="${px(bottom)}" y2="${px(bottom + 5)}" ` +
        `stroke="#333333" stroke-width="1"/>`
    );
    parts.push(
      `<text class="xtick" x="${px(x)}" y="${px(bottom + 20)}" ` +
        `text-anchor="middle">${fmtTick(t)}</text>`
    );
  }

  parts.push(
    `<rect x="${px(left)}" y="${px(top)}" width="${px(right - left)}" ` +
      `height="${px(bottom - top)}" fill="none" stroke="#333333" stroke-width="1"/>`
  );
  parts.push(
    `<text x="${px((left + right) / 2)}" y="${px(height - 14)}" ` +
      `text-anchor="middle">${escapeXml(fig.xLabel)}</text>`
  );
  parts.push(
    `<text x="20" y="${px((top + bottom) / 2)}" text-anchor="middle" ` +
      `transform="rotate(-90 20 ${px((top + bottom) / 2)})">${escapeXml(
        fig.yLabel
      )}${fig.logY ? " (log)" : ""}</text>`
  );

  fig.series.forEach((s, i) => {
    parts.push(renderSeries(s, PALETTE[i % PALETTE.length], X, Y, top));
  });

  // legend, one entry per series, in key order
  fig.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const y = top + 10 + i * 18;
    const x = right + 14;
    parts.push(
      `<line x1="${px(x)}" x2="${px(x + 22)}" y1="${px(y)}" y2="${px(y)}" ` +
        `stroke="${color}" stroke-width="2"/>`
    );
    parts.push(
      `<text x="${px(x + 28)}" y="${px(y + 4)}">${escapeXml(s.label)}</text>`
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function renderSeries(
  s: Series,
  color: string,
  X: (v: number) => number,
  Y: (v: number) => number,
  top: number
): string {
  const parts: string[] = [];
  parts.push(`<g class="series" data-key="${s.key}">`);
  if (s.points.length >= 2) {
    const pts = s.points.map((p) => `${px(X(p.x))},${px(Y(p.y))}`).join(" ");
    parts.push(
      `<polyline fill="none" stroke="${color}" stroke-width="1.8" points="${pts}"/>`
    );
  }
  for (const p of s.points) {
    parts.push(
      `<circle cx="${px(X(p.x))}" cy="${px(Y(p.y))}" r="2.6" fill="${color}"/>`
    );
  }
  // Diverged cells: a cap bar on the top axis with an arrowhead pointing
  // out of the plotted range, in the series color.
  for (const cx of s.capped) {
    const x = X(cx);
    parts.push(`<g class="capped">`);
    parts.push(
      `<line x1="${px(x - 5)}" x2="${px(x + 5)}" y1="${px(top)}" y2="${px(top)}" ` +
        `stroke="${color}" stroke-width="2"/>`
    );
    parts.push(
      `<path d="M ${px(x)} ${px(top + 1)} L ${px(x - 4)} ${px(top + 9)} ` +
        `L ${px(x + 4)} ${px(top + 9)} Z" fill="${color}"/>`
    );
    parts.push(`</g>`);
  }
  parts.push(`</g>`);
  return parts.join("\n");
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
