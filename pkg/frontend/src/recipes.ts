/**
 * One recipe per figure id, consuming only the documented export schema
 * (errors.csv / ratios.csv / samples.csv / signal.csv / dephasing.csv /
 * qcr.csv plus meta.json). Guide lines come from guides.ts formulas.
 */

import { existsSync } from "fs";
import { join } from "path";

import { groupBy, num, readCsv, readMeta, requireColumns, str, Meta, Row } from "./csv.js";
import { hlThreshold, idealSignal, qcrBound, sqlThreshold } from "./guides.js";
import { Panel, PALETTE } from "./svg.js";

export const FIGURE_IDS = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"] as const;
export type FigureId = (typeof FIGURE_IDS)[number];

export interface RecipeInput {
  dir: string;
  meta: Meta;
}

function load(input: RecipeInput, name: string, columns: string[]): Row[] {
  const path = join(input.dir, name);
  if (!existsSync(path)) {
    throw new Error(`${input.meta.figure}: required input ${name} not found in ${input.dir}`);
  }
  const rows = readCsv(path);
  requireColumns(rows, columns, name);
  return rows;
}

function color(i: number): string {
  return PALETTE[i % PALETTE.length];
}

function sortedBy(rows: Row[], key: string): Row[] {
  return [...rows].sort((a, b) => num(a, key) - num(b, key));
}

function seriesByDegree(
  rows: Row[],
  xKey: string,
  yKey: string,
  panel: Panel,
  opts: { marker?: "circle" | "square" | "triangle"; labelPrefix?: string } = {},
): void {
  const groups = groupBy(rows, (r) => str(r, "n_excitations"));
  [...groups.keys()]
    .sort((a, b) => Number(a) - Number(b))
    .forEach((n, i) => {
      const pts = sortedBy(groups.get(n)!.filter((r) => Number.isFinite(num(r, yKey))), xKey);
      panel.addSeries({
        label: `${opts.labelPrefix ?? "N="}${n}`,
        x: pts.map((r) => num(r, xKey)),
        y: pts.map((r) => num(r, yKey)),
        color: color(i),
        marker: opts.marker ?? "circle",
      });
    });
}

function addSqlHlGuides(panel: Panel, degrees: number[], withHl: boolean): void {
  degrees
    .filter((n) => n >= 2)
    .forEach((n, i) => {
      panel.addHLine({ y: sqlThreshold(n), color: color(i + 1), label: `sqrt(${n})` });
      if (withHl) {
        panel.addHLine({ y: hlThreshold(n), color: color(i + 1), label: `HL ${n}`, dash: "2 3" });
      }
    });
}

function fig2(input: RecipeInput): Panel[] {
  const rows = load(input, "signal.csv", ["n_excitations", "phi", "i_est"]);
  const panel = new Panel({
    title: "Trained output signal vs phase",
    xLabel: "phase (rad)",
    yLabel: "estimated signal",
  });
  const groups = groupBy(rows, (r) => str(r, "n_excitations"));
  [...groups.keys()]
    .sort((a, b) => Number(a) - Number(b))
    .forEach((n, i) => {
      const pts = sortedBy(groups.get(n)!, "phi");
      panel.addSeries({
        label: `N=${n}`,
        x: pts.map((r) => num(r, "phi")),
        y: pts.map((r) => num(r, "i_est")),
        color: color(i),
        line: false,
      });
      const grid = Array.from({ length: 201 }, (_, k) => (2 * Math.PI * k) / 200);
      panel.addCurve({
        label: "",
        x: grid,
        y: grid.map((phi) => idealSignal(phi, Number(n))),
        color: color(i),
      });
    });
  return [panel];
}

function fig3(input: RecipeInput): Panel[] {
  const samples = load(input, "samples.csv", ["axis_value", "phi_true", "phi_est"]);
  const scatter = new Panel({
    title: "Estimated vs ideal phase",
    xLabel: "ideal phase (rad)",
    yLabel: "estimated phase (rad)",
  });
  const byXi = groupBy(samples, (r) => str(r, "axis_value"));
  [...byXi.keys()]
    .sort((a, b) => Number(b) - Number(a))
    .forEach((xi, i) => {
      const pts = byXi.get(xi)!;
      scatter.addSeries({
        label: `xi=${xi}`,
        x: pts.map((r) => num(r, "phi_true")),
        y: pts.map((r) => num(r, "phi_est")),
        color: color(i),
        line: false,
      });
    });
  const diag = [0, Math.PI];
  scatter.addCurve({ label: "", x: diag, y: diag, color: "#222", dash: "4 3" });

  const errors = load(input, "errors.csv", ["axis", "axis_value", "err_slope"]);
  const qRows = errors.filter((r) => str(r, "axis") === "Q");
  const scaling = new Panel({
    title: "Error vs network size",
    xLabel: "network nodes Q",
    yLabel: "phase error (rad)",
    yLog: true,
  });
  if (qRows.length > 0) {
    const pts = sortedBy(qRows, "axis_value");
    scaling.addSeries({
      label: "SDM",
      x: pts.map((r) => num(r, "axis_value")),
      y: pts.map((r) => num(r, "err_slope")),
      color: color(0),
    });
    scaling.addSeries({
      label: "random phases",
      x: pts.map((r) => num(r, "axis_value")),
      y: pts.map((r) => num(r, "err_random")),
      color: color(1),
      marker: "square",
    });
  }
  return [scatter, scaling];
}

function fig4(input: RecipeInput): Panel[] {
  const errors = load(input, "errors.csv", ["family", "n_excitations", "axis", "axis_value", "err_random"]);
  const xiRows = errors.filter((r) => str(r, "axis") === "xi");
  const panels: Panel[] = [];
  const families = ["noon", "classical"].filter((f) => xiRows.some((r) => str(r, "family") === f));
  for (const family of families) {
    const errPanel = new Panel({
      title: `Error scaling (${family})`,
      xLabel: "measurement error xi",
      yLabel: "phase error (rad)",
      xLog: true,
      yLog: true,
    });
    seriesByDegree(xiRows.filter((r) => str(r, "family") === family), "axis_value", "err_random", errPanel);
    panels.push(errPanel);

    const ratioRows = load(input, "ratios.csv", ["family", "n_excitations", "axis_value", "eta_random"]).filter(
      (r) => str(r, "family") === family && str(r, "axis") === "xi",
    );
    const ratioPanel = new Panel({
      title: `Error ratios vs degree-1 (${family})`,
      xLabel: "measurement error xi",
      yLabel: "ratio",
      xLog: true,
    });
    seriesByDegree(ratioRows, "axis_value", "eta_random", ratioPanel, { marker: "triangle" });
    addSqlHlGuides(ratioPanel, input.meta.n_values, true);
    panels.push(ratioPanel);
  }
  const dephasingPath = join(input.dir, "dephasing.csv");
  if (existsSync(dephasingPath)) {
    const rows = readCsv(dephasingPath);
    requireColumns(rows, ["p", "err_random", "coherence"], "dephasing.csv");
    const pts = sortedBy(rows, "p");
    const panel = new Panel({
      title: "Fock-basis dephasing",
      xLabel: "off-diagonal coefficient p",
      yLabel: "phase error / coherence (nats)",
    });
    panel.addSeries({
      label: "error",
      x: pts.map((r) => num(r, "p")),
      y: pts.map((r) => num(r, "err_random")),
      color: color(0),
    });
    panel.addSeries({
      label: "coherence",
      x: pts.map((r) => num(r, "p")),
      y: pts.map((r) => num(r, "coherence")),
      color: color(2),
      marker: "square",
    });
    panels.push(panel);
  }
  return panels;
}

function ratioVsTimePanels(input: RecipeInput, splitKey: "q_nodes" | "coupling"): Panel[] {
  const ratios = load(input, "ratios.csv", ["q_nodes", "coupling", "n_excitations", "axis", "axis_value", "eta_slope"]);
  const tRows = ratios.filter((r) => str(r, "axis") === "t");
  const panels: Panel[] = [];
  for (const [groupValue, rows] of groupBy(tRows, (r) => str(r, splitKey))) {
    const panel = new Panel({
      title: `SDM ratio vs time (${splitKey === "q_nodes" ? "Q=" : ""}${groupValue})`,
      xLabel: "time (1/Omega)",
      yLabel: "ratio to degree 1",
    });
    seriesByDegree(rows, "axis_value", "eta_slope", panel, { marker: "triangle" });
    const degrees = [...new Set(rows.map((r) => num(r, "n_excitations")))].sort();
    addSqlHlGuides(panel, degrees, false);
    panels.push(panel);
  }
  return panels;
}

function fig5(input: RecipeInput): Panel[] {
  return ratioVsTimePanels(input, "q_nodes");
}

function fig6(input: RecipeInput): Panel[] {
  const errors = load(input, "errors.csv", ["channel", "n_excitations", "axis", "axis_value", "err_slope"]);
  const gRows = errors.filter((r) => str(r, "axis") === "gamma");
  const errPanel = new Panel({
    title: "SDM vs noise strength",
    xLabel: "gamma (hbar Omega)",
    yLabel: "phase error (rad)",
    xLog: true,
    yLog: true,
  });
  let i = 0;
  for (const [key, rows] of groupBy(gRows, (r) => `${str(r, "channel")} N=${str(r, "n_excitations")}`)) {
    const pts = sortedBy(rows, "axis_value");
    errPanel.addSeries({
      label: key,
      x: pts.map((r) => num(r, "axis_value")),
      y: pts.map((r) => num(r, "err_slope")),
      color: color(i),
      marker: i % 2 ? "square" : "circle",
      dash: i % 2 ? "4 3" : "",
    });
    i += 1;
  }
  const ratios = load(input, "ratios.csv", ["channel", "axis", "axis_value", "eta_slope"]).filter(
    (r) => str(r, "axis") === "gamma",
  );
  const ratioPanel = new Panel({
    title: "Quantum advantage under noise",
    xLabel: "gamma (hbar Omega)",
    yLabel: "ratio eta_12",
    xLog: true,
  });
  i = 0;
  for (const [key, rows] of groupBy(ratios, (r) => str(r, "channel"))) {
    const pts = sortedBy(rows, "axis_value");
    ratioPanel.addSeries({
      label: key,
      x: pts.map((r) => num(r, "axis_value")),
      y: pts.map((r) => num(r, "eta_slope")),
      color: color(i),
    });
    i += 1;
  }
  ratioPanel.addHLine({ y: sqlThreshold(2), color: "#c23b22", label: "sqrt(2)" });
  return [errPanel, ratioPanel];
}

function fig7(input: RecipeInput): Panel[] {
  const errors = load(input, "errors.csv", ["scenario", "coupling", "n_excitations", "axis", "axis_value", "err_slope"]);
  const tRows = errors.filter((r) => str(r, "axis") === "t");
  const panels: Panel[] = [];
  for (const [scenarioKey, rows] of groupBy(tRows, (r) => str(r, "scenario").replace(/-n\d+$/, ""))) {
    const panel = new Panel({
      title: `SDM vs time (${scenarioKey.replace(/^fig\d+-/, "")})`,
      xLabel: "time (1/Omega)",
      yLabel: "phase error (rad)",
      yLog: true,
    });
    seriesByDegree(rows, "axis_value", "err_slope", panel);
    panels.push(panel);
  }
  const ratioPanels = ratioVsTimePanels(input, "coupling");
  return [...panels.slice(0, 2), ...ratioPanels];
}

function fig8(input: RecipeInput): Panel[] {
  const errors = load(input, "errors.csv", ["axis", "axis_value", "err_random"]);
  const panels: Panel[] = [];
  const lamRows = errors.filter((r) => str(r, "axis") === "lambda");
  if (lamRows.length > 0) {
    const pts = sortedBy(lamRows, "axis_value");
    panels.push(
      new Panel({
        title: "Error vs ridge parameter",
        xLabel: "ridge parameter",
        yLabel: "phase error (rad)",
        xLog: true,
        yLog: true,
      }).addSeries({
        label: "",
        x: pts.map((r) => num(r, "axis_value")),
        y: pts.map((r) => num(r, "err_random")),
        color: color(0),
      }),
    );
  }
  const trainRows = errors.filter((r) => str(r, "axis") === "n_train");
  if (trainRows.length > 0) {
    const pts = sortedBy(trainRows, "axis_value");
    panels.push(
      new Panel({
        title: "Error vs training-set size",
        xLabel: "training sets",
        yLabel: "phase error (rad)",
        yLog: true,
      }).addSeries({
        label: "",
        x: pts.map((r) => num(r, "axis_value")),
        y: pts.map((r) => num(r, "err_random")),
        color: color(1),
      }),
    );
  }
  if (panels.length === 0) {
    throw new Error("fig8: no lambda or n_train sweep rows in errors.csv");
  }
  return panels;
}

function fig9(input: RecipeInput): Panel[] {
  const rows = load(input, "qcr.csv", ["axis", "axis_value", "family", "n_excitations", "dphi_ave", "dphi_min", "m_shots"]);
  const panels: Panel[] = [];
  for (const [key, group] of groupBy(rows, (r) => `${str(r, "family")} vs ${str(r, "axis")}`)) {
    const axis = str(group[0], "axis");
    const panel = new Panel({
      title: `Search vs Cramer-Rao bound (${key})`,
      xLabel: axis === "N" ? "resource degree N" : "network nodes Q",
      yLabel: "standard deviation (rad)",
      yLog: true,
    });
    const pts = sortedBy(group, "axis_value");
    panel.addSeries({
      label: "average",
      x: pts.map((r) => num(r, "axis_value")),
      y: pts.map((r) => num(r, "dphi_ave")),
      color: "#222222",
    });
    panel.addSeries({
      label: "minimum",
      x: pts.map((r) => num(r, "axis_value")),
      y: pts.map((r) => num(r, "dphi_min")),
      color: color(0),
      marker: "triangle",
    });
    const mShots = num(pts[0], "m_shots");
    panel.addCurve({
      label: "bound",
      x: pts.map((r) => num(r, "axis_value")),
      y: pts.map((r) => qcrBound(mShots, axis === "N" ? num(r, "axis_value") : num(r, "n_excitations"))),
      color: "#555555",
      dash: "6 3 1.5 3",
    });
    panels.push(panel);
  }
  return panels;
}

const RECIPES: Record<FigureId, (input: RecipeInput) => Panel[]> = {
  fig2,
  fig3,
  fig4,
  fig5,
  fig6,
  fig7,
  fig8,
  fig9,
};

export function buildPanels(figureId: string, dir: string): Panel[] {
  if (!(FIGURE_IDS as readonly string[]).includes(figureId)) {
    throw new Error(`unknown figure id '${figureId}' (expected ${FIGURE_IDS.join(", ")})`);
  }
  const meta = readMeta(join(dir, "meta.json"));
  if (meta.figure !== figureId) {
    throw new Error(`meta.json is for ${meta.figure}, expected ${figureId}`);
  }
  return RECIPES[figureId as FigureId]({ dir, meta });
}
