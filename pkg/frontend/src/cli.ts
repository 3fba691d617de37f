/**
 * Usage:
 *   node dist/cli.js render --figure fig4 --in ../figure-data --out ../figures
 *   node dist/cli.js render --all --in ../figure-data --out ../figures
 *
 * Exit codes: 0 rendered, 1 runtime failure (missing/empty inputs), 2 bad usage.
 */

import { existsSync } from "fs";
import { join } from "path";

import { FIGURE_IDS } from "./recipes.js";
import { render } from "./render.js";

interface Args {
  figures: string[];
  inDir: string;
  outDir: string;
}

function parseArgs(argv: string[]): Args {
  if (argv[0] !== "render") {
    throw new UsageError(`unknown command '${argv[0] ?? ""}' (expected 'render')`);
  }
  let figure: string | null = null;
  let all = false;
  let inDir = "figure-data";
  let outDir = "figures";
  for (let i = 1; i < argv.length; i++) {
    switch (argv[i]) {
      case "--figure":
        figure = argv[++i];
        break;
      case "--all":
        all = true;
        break;
      case "--in":
        inDir = argv[++i];
        break;
      case "--out":
        outDir = argv[++i];
        break;
      default:
        throw new UsageError(`unknown argument '${argv[i]}'`);
    }
  }
  if (!all && !figure) {
    throw new UsageError("pass --figure <figN> or --all");
  }
  if (figure && !(FIGURE_IDS as readonly string[]).includes(figure)) {
    throw new UsageError(`unknown figure '${figure}' (expected ${FIGURE_IDS.join(", ")})`);
  }
  const figures = all
    ? FIGURE_IDS.filter((id) => existsSync(join(inDir, id, "meta.json")))
    : [figure as string];
  if (figures.length === 0) {
    throw new Error(`no figure exports found under ${inDir}`);
  }
  return { figures, inDir, outDir };
}

class UsageError extends Error {}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String((err as Error).message));
    return err instanceof UsageError ? 2 : 1;
  }
  try {
    for (const figureId of args.figures) {
      const target = render(figureId, args.inDir, args.outDir);
      console.log(`${figureId} -> ${target}`);
    }
    return 0;
  } catch (err) {
    console.error(String((err as Error).message));
    return 1;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
