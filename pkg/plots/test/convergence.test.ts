import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { main } from "../src/cli-convergence.js";
import {
  buildConvergenceFigure,
  readConvergenceCsv,
  slopeGuides,
} from "../src/convergence.js";
import { CsvSchemaError } from "../src/csv.js";

const FIXTURES = join(__dirname, "fixtures");

function syntheticCsv(order: number, c = 0.3): string {
  const lines = ["method,h,err_q,err_p,fitted_order"];
  for (let k = 0; k < 6; k++) {
    const h = 0.2 / 2 ** k;
    const err = c * h ** order;
    lines.push(`exact,${h},${err},${err},`);
  }
  lines.push(`exact,,,,${order}`);
  return lines.join("\n") + "\n";
}

describe("readConvergenceCsv", () => {
  it("reads the Kepler experiment output", () => {
    const text = readFileSync(join(FIXTURES, "kepler_convergence.csv"), "utf8");
    const series = readConvergenceCsv(text, "kepler_convergence.csv");
    const byName = new Map(series.map((s) => [s.method, s]));
    expect(byName.has("gauss1")).toBe(true);
    expect(byName.has("radau_iia3")).toBe(true);
    // the 2-stage Lobatto pair never produces usable points
    expect(byName.get("lobatto2")!.points.length).toBe(0);
    expect(byName.get("gauss2")!.fittedOrder).toBeCloseTo(4.0, 0);
    // h values decrease and errors follow for the convergent series
    const g1 = byName.get("gauss1")!.points;
    expect(g1.length).toBeGreaterThanOrEqual(7);
    expect(g1[0][0]).toBeGreaterThan(g1[g1.length - 1][0]);
  });

  it("keeps failure rows out of the series", () => {
    const text =
      "method,h,err_q,err_p,fitted_order\n" +
      "m,0.2,1e-3,1e-3,\n" +
      "m,0.1,,,\n" + // a recorded failure at this step size
      "m,0.05,1e-5,1e-5,\n";
    const series = readConvergenceCsv(text, "x.csv");
    expect(series[0].points.length).toBe(2);
  });

  it("rejects a wrong header with a diagnostic", () => {
    expect(() => readConvergenceCsv("a,b,c\n1,2,3\n", "x.csv")).toThrow(
      /expected column 1 to be 'method'/,
    );
  });

  it("rejects non-numeric errors", () => {
    const text = "method,h,err_q,err_p,fitted_order\nm,0.1,oops,1e-3,\n";
    expect(() => readConvergenceCsv(text, "x.csv")).toThrow(CsvSchemaError);
  });

  it("rejects a file with no plottable points", () => {
    const text = "method,h,err_q,err_p,fitted_order\nm,,,,\n";
    expect(() => readConvergenceCsv(text, "x.csv")).toThrow(/no plottable/);
  });
});

describe("slopeGuides", () => {
  it("produces guides of the advertised slopes", () => {
    const series = readConvergenceCsv(syntheticCsv(2), "syn.csv");
    for (const guide of slopeGuides(series)) {
      const [[h0, e0], [h1, e1]] = guide.points;
      const slope = (Math.log(e1) - Math.log(e0)) / (Math.log(h1) - Math.log(h0));
      expect(slope).toBeCloseTo(guide.order, 10);
    }
  });
});

describe("buildConvergenceFigure", () => {
  it("renders series, markers, and guides into svg", () => {
    const text = readFileSync(join(FIXTURES, "kepler_convergence.csv"), "utf8");
    const fig = buildConvergenceFigure(text, "kepler_convergence.csv");
    expect(fig.svg).toContain("<svg");
    expect(fig.svg).toContain("polyline");
    expect(fig.svg).toContain("stroke-dasharray"); // slope guides
    expect(fig.svg).toContain("gauss3");
    expect(fig.series.length).toBeGreaterThanOrEqual(6);
    expect(fig.guides.map((g) => g.order)).toEqual([2, 4, 5, 6]);
  });

  it("synthetic order-2 data runs parallel to the slope-2 guide", () => {
    const fig = buildConvergenceFigure(syntheticCsv(2), "syn.csv");
    const series = fig.series[0];
    const guide = fig.guides.find((g) => g.order === 2)!;
    const offset = (h: number, e: number) => Math.log(e) - 2 * Math.log(h);
    const guideOffset = offset(guide.points[0][0], guide.points[0][1]);
    const offsets = series.points.map(([h, e]) => offset(h, e));
    for (const o of offsets) {
      expect(o - offsets[0]).toBeCloseTo(0, 8); // constant offset = parallel
    }
    expect(Number.isFinite(guideOffset)).toBe(true);
  });
});

describe("cli", () => {
  it.each(["vortex2_convergence.csv", "lotka_volterra_convergence.csv"])(
    "writes an svg for %s",
    (fixture) => {
      const dir = mkdtempSync(join(tmpdir(), "plots-"));
      const out = join(dir, "fig.svg");
      const rc = main([join(FIXTURES, fixture), out]);
      expect(rc).toBe(0);
      expect(readFileSync(out, "utf8")).toContain("</svg>");
    },
  );

  it("fails diagnostically on malformed input", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "definitely,not,the,schema\n1,2,3,4\n");
    const rc = main([bad, join(dir, "out.svg")]);
    expect(rc).toBe(1);
  });

  it("fails on a missing file", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    expect(main([join(dir, "nope.csv"), join(dir, "out.svg")])).toBe(1);
  });

  it("reports usage without arguments", () => {
    expect(main([])).toBe(2);
  });
});
