#!/usr/bin/env node
/**
 * render-all <csv-dir> <img-dir>
 *
 * Renders every figure in the default set from the simulator's CSV output.
 * Fails (nonzero exit) on a missing or malformed CSV or a unit-convention
 * mismatch; writes one PNG per figure into <img-dir>.
 */

import { mkdirSync, writeFileSync } from "fs";
import { join } from "path";
import { FIGURES, renderFigure } from "./figures.js";

export function renderAll(csvDir: string, imgDir: string): string[] {
  mkdirSync(imgDir, { recursive: true });
  const written: string[] = [];
  for (const spec of FIGURES) {
    const rendered = renderFigure(spec, join(csvDir, spec.csv));
    const out = join(imgDir, `${rendered.name}.png`);
    writeFileSync(out, rendered.png);
    written.push(out);
  }
  return written;
}

function main(argv: string[]): number {
  if (argv.length !== 2) {
    console.error("usage: render-all <csv-dir> <img-dir>");
    return 2;
  }
  try {
    for (const path of renderAll(argv[0], argv[1])) {
      console.log(`wrote ${path}`);
    }
  } catch (err) {
    console.error(`render-all: ${(err as Error).message}`);
    return 1;
  }
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("renderAll.js")) {
  process.exit(main(process.argv.slice(2)));
}
