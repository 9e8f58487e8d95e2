/**
 * Log-log convergence figure: max-norm endpoint error against step size, one
 * series per method, with dashed reference guides of slopes 2, 4, 5, and 6.
 *
 * Input schema (from the experiment CLI's `convergence` command):
 *   method,h,err_q,err_p,fitted_order
 * Data rows carry h/err values; per-method summary rows leave h empty and
 * carry the fitted order.
 */

import { CsvSchemaError, numberAt, parseCsv, requireColumns } from "./csv.js";
import * as svg from "./svg.js";

export interface ConvergenceSeries {
  method: string;
  points: Array<[number, number]>; // (h, err_q), h decreasing as written
  fittedOrder: number | null;
}

export const GUIDE_ORDERS = [2, 4, 5, 6];

export function readConvergenceCsv(text: string, path: string): ConvergenceSeries[] {
  const table = parseCsv(text, path);
  requireColumns(table, ["method", "h", "err_q", "err_p", "fitted_order"], path);
  const byMethod = new Map<string, ConvergenceSeries>();
  table.rows.forEach((row, i) => {
    const method = row[0];
    if (!method) {
      throw new CsvSchemaError(`${path}: row ${i + 2}: empty method name`);
    }
    let series = byMethod.get(method);
    if (!series) {
      series = { method, points: [], fittedOrder: null };
      byMethod.set(method, series);
    }
    if (row[1] === "") {
      // summary row: only the fitted order (may be empty for failed series)
      if (row[4] !== "") {
        series.fittedOrder = numberAt(row, 4, "fitted_order", i, path);
      }
      return;
    }
    const h = numberAt(row, 1, "h", i, path);
    if (row[2] === "" && row[3] === "") {
      return; // recorded failure at this step size
    }
    const err = numberAt(row, 2, "err_q", i, path);
    if (h <= 0 || err < 0) {
      throw new CsvSchemaError(
        `${path}: row ${i + 2}: need h > 0 and err_q >= 0, got (${h}, ${err})`,
      );
    }
    if (err > 0) series.points.push([h, err]);
  });
  const result = [...byMethod.values()];
  if (result.every((s) => s.points.length === 0)) {
    throw new CsvSchemaError(`${path}: no plottable (h, err_q) pairs`);
  }
  return result;
}

export interface GuideLine {
  order: number;
  points: Array<[number, number]>;
}

/** Reference guides err = C h^p anchored near the data cloud's lower left. */
export function slopeGuides(series: ConvergenceSeries[]): GuideLine[] {
  const all = series.flatMap((s) => s.points);
  const hMin = Math.min(...all.map(([h]) => h));
  const hMax = Math.max(...all.map(([h]) => h));
  const eMin = Math.min(...all.map(([, e]) => e));
  return GUIDE_ORDERS.map((order) => {
    const anchor = eMin * 3;
    const c = anchor / Math.pow(hMin, order);
    return {
      order,
      points: [
        [hMin, anchor],
        [hMax, c * Math.pow(hMax, order)],
      ] as Array<[number, number]>,
    };
  });
}

export interface ConvergenceFigure {
  svg: string;
  series: ConvergenceSeries[];
  guides: GuideLine[];
}

export function buildConvergenceFigure(
  text: string,
  path: string,
  figureTitle = "Convergence",
): ConvergenceFigure {
  const series = readConvergenceCsv(text, path).filter(
    (s) => s.points.length > 0,
  );
  const guides = slopeGuides(series);
  const allPoints = series.flatMap((s) => s.points);
  const guidePoints = guides.flatMap((g) => g.points);
  const frame: svg.Frame = {
    x0: 80,
    y0: 46,
    width: 540,
    height: 430,
    xExtent: logPad(allPoints.map(([h]) => h)),
    yExtent: logPad(allPoints.concat(guidePoints).map(([, e]) => e)),
    xLog: true,
    yLog: true,
  };
  let body = svg.title(frame.x0 + frame.width / 2, 24, figureTitle);
  body += svg.axes(frame, "step size h", "max-norm error at T");
  const legendEntries: Array<{ label: string; color: string; dashed?: boolean }> = [];
  series.forEach((s, i) => {
    const color = svg.SERIES_COLORS[i % svg.SERIES_COLORS.length];
    body += svg.polyline(frame, s.points, color, { markers: true });
    const label = s.fittedOrder === null
      ? s.method
      : `${s.method} (p=${s.fittedOrder.toFixed(2)})`;
    legendEntries.push({ label, color });
  });
  for (const guide of guides) {
    body += svg.polyline(frame, guide.points, "#999", { dashed: true });
    legendEntries.push({
      label: `slope ${guide.order}`,
      color: "#999",
      dashed: true,
    });
  }
  body += svg.legend(frame, legendEntries);
  return { svg: svg.document(820, 540, body), series, guides };
}

function logPad(values: number[]): svg.Extent {
  const min = Math.min(...values);
  const max = Math.max(...values);
  return { min: min / 1.5, max: max * 1.5 };
}
