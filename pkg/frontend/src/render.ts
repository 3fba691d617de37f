/**
 * File-in/file-out rendering: reads the figure's export directory, writes
 * <figId>.svg. Inputs are never mutated; nothing is written when a recipe
 * fails (missing inputs, empty tables, schema mismatches).
 */

import { mkdirSync, writeFileSync } from "fs";
import { join } from "path";

import { buildPanels } from "./recipes.js";
import { renderFigure } from "./svg.js";

export function renderToString(figureId: string, inDir: string): string {
  const panels = buildPanels(figureId, join(inDir, figureId));
  return renderFigure(panels);
}

export function render(figureId: string, inDir: string, outDir: string): string {
  const svg = renderToString(figureId, inDir);
  mkdirSync(outDir, { recursive: true });
  const target = join(outDir, `${figureId}.svg`);
  writeFileSync(target, svg, "utf-8");
  return target;
}
