/** Hand-rolled SVG output: enough axes, polylines, and legends for the two
 * figure styles this package produces. No DOM, just strings. */

export interface Extent {
  min: number;
  max: number;
}

export interface Frame {
  x0: number;
  y0: number;
  width: number;
  height: number;
  xExtent: Extent;
  yExtent: Extent;
  xLog: boolean;
  yLog: boolean;
}

export const SERIES_COLORS = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

export function extentOf(values: number[], padFraction = 0.05): Extent {
  let min = Math.min(...values);
  let max = Math.max(...values);
  if (min === max) {
    min -= 1;
    max += 1;
  }
  const pad = (max - min) * padFraction;
  return { min: min - pad, max: max + pad };
}

export function xPixel(frame: Frame, x: number): number {
  const { min, max } = frame.xExtent;
  const t = frame.xLog
    ? (Math.log10(x) - Math.log10(min)) / (Math.log10(max) - Math.log10(min))
    : (x - min) / (max - min);
  return frame.x0 + t * frame.width;
}

export function yPixel(frame: Frame, y: number): number {
  const { min, max } = frame.yExtent;
  const t = frame.yLog
    ? (Math.log10(y) - Math.log10(min)) / (Math.log10(max) - Math.log10(min))
    : (y - min) / (max - min);
  return frame.y0 + frame.height - t * frame.height;
}

export function polyline(
  frame: Frame,
  points: Array<[number, number]>,
  color: string,
  options: { dashed?: boolean; markers?: boolean } = {},
): string {
  const coords = points
    .map(([x, y]) => `${xPixel(frame, x).toFixed(2)},${yPixel(frame, y).toFixed(2)}`)
    .join(" ");
  const dash = options.dashed ? ` stroke-dasharray="6 4"` : "";
  let svg =
    `<polyline points="${coords}" fill="none" stroke="${color}"` +
    ` stroke-width="1.5"${dash}/>`;
  if (options.markers) {
    for (const [x, y] of points) {
      svg +=
        `<circle cx="${xPixel(frame, x).toFixed(2)}"` +
        ` cy="${yPixel(frame, y).toFixed(2)}" r="3" fill="${color}"/>`;
    }
  }
  return svg;
}

function logTicks(extent: Extent): number[] {
  const ticks: number[] = [];
  const lo = Math.ceil(Math.log10(extent.min));
  const hi = Math.floor(Math.log10(extent.max));
  for (let e = lo; e <= hi; e++) ticks.push(Math.pow(10, e));
  return ticks;
}

function linearTicks(extent: Extent, count = 5): number[] {
  const span = extent.max - extent.min;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const mult = span / count / step > 5 ? 5 : span / count / step > 2 ? 2 : 1;
  const inc = mult * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(extent.min / inc) * inc; v <= extent.max; v += inc) {
    ticks.push(v);
  }
  return ticks;
}

function fmtTick(v: number, log: boolean): string {
  if (log) {
    const e = Math.round(Math.log10(v));
    return `1e${e}`;
  }
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0);
  return String(Number(v.toPrecision(4)));
}

export function axes(frame: Frame, xLabel: string, yLabel: string): string {
  const left = frame.x0;
  const right = frame.x0 + frame.width;
  const top = frame.y0;
  const bottom = frame.y0 + frame.height;
  let svg =
    `<rect x="${left}" y="${top}" width="${frame.width}"` +
    ` height="${frame.height}" fill="none" stroke="#333"/>`;
  const xTicks = frame.xLog ? logTicks(frame.xExtent) : linearTicks(frame.xExtent);
  for (const t of xTicks) {
    const px = xPixel(frame, t);
    svg += `<line x1="${px.toFixed(2)}" y1="${bottom}" x2="${px.toFixed(2)}"` +
      ` y2="${bottom - 5}" stroke="#333"/>`;
    svg += `<text x="${px.toFixed(2)}" y="${bottom + 16}" font-size="11"` +
      ` text-anchor="middle">${fmtTick(t, frame.xLog)}</text>`;
  }
  const yTicks = frame.yLog ? logTicks(frame.yExtent) : linearTicks(frame.yExtent);
  for (const t of yTicks) {
    const py = yPixel(frame, t);
    svg += `<line x1="${left}" y1="${py.toFixed(2)}" x2="${left + 5}"` +
      ` y2="${py.toFixed(2)}" stroke="#333"/>`;
    svg += `<text x="${left - 6}" y="${(py + 4).toFixed(2)}" font-size="11"` +
      ` text-anchor="end">${fmtTick(t, frame.yLog)}</text>`;
  }
  svg += `<text x="${left + frame.width / 2}" y="${bottom + 34}"` +
    ` font-size="13" text-anchor="middle">${xLabel}</text>`;
  svg += `<text x="${left - 52}" y="${top + frame.height / 2}" font-size="13"` +
    ` text-anchor="middle" transform="rotate(-90 ${left - 52}` +
    ` ${top + frame.height / 2})">${yLabel}</text>`;
  return svg;
}

export function legend(
  frame: Frame,
  entries: Array<{ label: string; color: string; dashed?: boolean }>,
): string {
  const x = frame.x0 + frame.width + 12;
  let svg = "";
  entries.forEach((entry, i) => {
    const y = frame.y0 + 14 + i * 18;
    const dash = entry.dashed ? ` stroke-dasharray="6 4"` : "";
    svg += `<line x1="${x}" y1="${y}" x2="${x + 22}" y2="${y}"` +
      ` stroke="${entry.color}" stroke-width="2"${dash}/>`;
    svg += `<text x="${x + 28}" y="${y + 4}" font-size="12">${entry.label}</text>`;
  });
  return svg;
}

export function document(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}"` +
    ` height="${height}" viewBox="0 0 ${width} ${height}">` +
    `<rect width="${width}" height="${height}" fill="white"/>` +
    body +
    `</svg>`
  );
}

export function title(x: number, y: number, text: string): string {
  return `<text x="${x}" y="${y}" font-size="15" font-weight="bold"` +
    ` text-anchor="middle">${text}</text>`;
}
