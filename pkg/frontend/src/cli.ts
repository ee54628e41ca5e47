#!/usr/bin/env node
/**
 * helmtrap-render: turn a figure recipe into an SVG file.
 *
 *   helmtrap-render render --recipe fig.recipe
 */

import { readFileSync, writeFileSync } from "node:fs";
import { renderFigure } from "./figures.js";
import { parseRecipe } from "./recipe.js";

export function main(argv: string[]): number {
  if (argv.length < 1 || argv[0] !== "render") {
    process.stderr.write("usage: helmtrap-render render --recipe <file>\n");
    return 2;
  }
  const i = argv.indexOf("--recipe");
  if (i < 0 || i + 1 >= argv.length) {
    process.stderr.write("missing --recipe <file>\n");
    return 2;
  }
  const recipePath = argv[i + 1];
  try {
    const recipe = parseRecipe(readFileSync(recipePath, "utf-8"));
    const svg = renderFigure(recipe);
    writeFileSync(recipe.out, svg);
    process.stdout.write(`${recipe.out}\n`);
    return 0;
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
