/** SVG string rendering for the four metric charts.
 *
 * Scales are plain coordinate transforms; any number a person can read in
 * the output (axis ends, tick labels, guide values) comes pre-formatted
 * from the view model, which sources it from a service response.
 */

import type { ChartVM, SeriesPoint } from "./viewmodel.js";
import { fmtNum } from "./viewmodel.js";

export interface ChartGeometry {
  width: number;
  height: number;
  padLeft: number;
  padRight: number;
  padTop: number;
  padBottom: number;
}

export const DEFAULT_GEOMETRY: ChartGeometry = {
  width: 360,
  height: 220,
  padLeft: 52,
  padRight: 12,
  padTop: 24,
  padBottom: 28,
};

export function xScale(vm: ChartVM, geom: ChartGeometry): (n: number) => number {
  const ns = vm.series.map((p) => p.n);
  const lo = Math.min(...ns);
  const hi = Math.max(...ns);
  const span = hi - lo;
  const inner = geom.width - geom.padLeft - geom.padRight;
  return (n) =>
    geom.padLeft + (span === 0 ? inner / 2 : ((n - lo) / span) * inner);
}

export function yScale(vm: ChartVM, geom: ChartGeometry): (v: number) => number {
  const span = vm.yMax - vm.yMin;
  const inner = geom.height - geom.padTop - geom.padBottom;
  return (v) =>
    span === 0
      ? geom.padTop + inner / 2
      : geom.padTop + ((vm.yMax - v) / span) * inner;
}

const co = (v: number) => v.toFixed(2);

function polylinePoints(
  points: readonly SeriesPoint[],
  sx: (n: number) => number,
  sy: (v: number) => number,
): string {
  return points.map((p) => `${co(sx(p.n))},${co(sy(p.value))}`).join(" ");
}

export function renderChart(
  vm: ChartVM,
  geom: ChartGeometry = DEFAULT_GEOMETRY,
): string {
  const sx = xScale(vm, geom);
  const sy = yScale(vm, geom);
  const parts: string[] = [];
  parts.push(
    `<svg class="chart chart-${vm.metric}" viewBox="0 0 ${geom.width} ${geom.height}" ` +
      `width="${geom.width}" height="${geom.height}" role="img">`,
  );
  parts.push(`<text class="chart-title" x="${co(geom.padLeft)}" y="14">${vm.title}</text>`);

  if (vm.band) {
    const upper = vm.band.map((b) => `${co(sx(b.n))},${co(sy(b.hi))}`);
    const lower = [...vm.band].reverse().map((b) => `${co(sx(b.n))},${co(sy(b.lo))}`);
    parts.push(
      `<polygon class="band" points="${[...upper, ...lower].join(" ")}"></polygon>`,
    );
  }
  for (const g of vm.guides) {
    const y = co(sy(g.value));
    parts.push(
      `<line class="${g.cls}" x1="${co(geom.padLeft)}" y1="${y}" ` +
        `x2="${co(geom.width - geom.padRight)}" y2="${y}"></line>`,
    );
    parts.push(
      `<text class="${g.cls}-label" x="${co(geom.width - geom.padRight)}" ` +
        `y="${y}" text-anchor="end">${g.label}` +
        (g.labelValue === null ? "" : ` at ${g.labelValue}`) +
        `</text>`,
    );
  }
  if (vm.overlay) {
    parts.push(
      `<polyline class="overlay" fill="none" ` +
        `points="${polylinePoints(vm.overlay, sx, sy)}"></polyline>`,
    );
  }
  parts.push(
    `<polyline class="series" fill="none" ` +
      `points="${polylinePoints(vm.series, sx, sy)}"></polyline>`,
  );

  const y0 = geom.height - geom.padBottom;
  parts.push(
    `<text class="axis-y" x="${co(geom.padLeft - 6)}" y="${co(sy(vm.yMax))}" ` +
      `text-anchor="end">${fmtNum(vm.yMax)}</text>`,
  );
  parts.push(
    `<text class="axis-y" x="${co(geom.padLeft - 6)}" y="${co(sy(vm.yMin))}" ` +
      `text-anchor="end">${fmtNum(vm.yMin)}</text>`,
  );
  for (const t of vm.xTicks) {
    parts.push(
      `<text class="axis-x" x="${co(sx(t.n))}" y="${co(y0 + 16)}" ` +
        `text-anchor="middle">${t.label}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
