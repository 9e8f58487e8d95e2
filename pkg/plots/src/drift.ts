/**
 * Hamiltonian drift figure: two panels sharing the H axis scale idea from
 * the experiment write-ups, a close-up on the initial interval on the left
 * and the full horizon on the right.
 *
 * Input schema (from the experiment CLI's `drift` command):
 *   t,H,constraint_residual
 */

import { CsvSchemaError, numberAt, parseCsv, requireColumns } from "./csv.js";
import * as svg from "./svg.js";

export interface DriftData {
  times: number[];
  hamiltonian: number[];
  constraint: number[];
}

export function readDriftCsv(text: string, path: string): DriftData {
  const table = parseCsv(text, path);
  requireColumns(table, ["t", "H", "constraint_residual"], path);
  const times: number[] = [];
  const hamiltonian: number[] = [];
  const constraint: number[] = [];
  table.rows.forEach((row, i) => {
    times.push(numberAt(row, 0, "t", i, path));
    hamiltonian.push(numberAt(row, 1, "H", i, path));
    constraint.push(numberAt(row, 2, "constraint_residual", i, path));
  });
  for (let i = 1; i < times.length; i++) {
    if (times[i] <= times[i - 1]) {
      throw new CsvSchemaError(
        `${path}: row ${i + 2}: times must increase strictly ` +
          `(${times[i - 1]} then ${times[i]})`,
      );
    }
  }
  return { times, hamiltonian, constraint };
}

export interface DriftFigure {
  svg: string;
  closeupHorizon: number;
  data: DriftData;
}

export function buildDriftFigure(
  text: string,
  path: string,
  figureTitle = "Hamiltonian drift",
): DriftFigure {
  const data = readDriftCsv(text, path);
  const tEnd = data.times[data.times.length - 1];
  // initial close-up: a tenth of the horizon, capped at 150 time units
  const closeupHorizon = Math.min(150, tEnd / 10) || tEnd;
  const closeIdx = data.times.findIndex((t) => t > closeupHorizon);
  const nClose = closeIdx === -1 ? data.times.length : Math.max(closeIdx, 2);

  const panels: Array<{ x0: number; label: string; n: number }> = [
    { x0: 70, label: `close-up t <= ${fmt(closeupHorizon)}`, n: nClose },
    { x0: 480, label: "full horizon", n: data.times.length },
  ];
  let body = svg.title(410, 22, figureTitle);
  for (const panel of panels) {
    const times = data.times.slice(0, panel.n);
    const values = data.hamiltonian.slice(0, panel.n);
    const frame: svg.Frame = {
      x0: panel.x0,
      y0: 50,
      width: 330,
      height: 330,
      xExtent: svg.extentOf(times, 0.02),
      yExtent: svg.extentOf(values, 0.08),
      xLog: false,
      yLog: false,
    };
    body += svg.axes(frame, "t", "H");
    body += svg.polyline(
      frame,
      times.map((t, i) => [t, values[i]] as [number, number]),
      svg.SERIES_COLORS[0],
    );
    body += svg.title(frame.x0 + frame.width / 2, 44, panel.label);
  }
  return { svg: svg.document(880, 440, body), closeupHorizon, data };
}

function fmt(x: number): string {
  return x >= 100 ? x.toFixed(0) : String(Number(x.toPrecision(3)));
}
