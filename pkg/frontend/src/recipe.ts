/**
 * Figure recipes in the same flat `key = value` format as the CLI configs.
 *
 * Required keys: `kind` (one of the figure kinds) plus the kind's input
 * paths; `out` names the SVG file to write.
 */

export const FIGURE_KINDS = [
  "loglog-iterations-with-fit",
  "eigenvalue-scatter",
  "flow-arrows",
  "counting-vs-prediction",
  "field-heatmap",
  "error-curves",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureRecipe {
  kind: FigureKind;
  input: string;
  fitInput?: string;
  out: string;
  title: string;
  width: number;
  height: number;
  rectReMin?: number;
  rectReMax?: number;
  rectImMin?: number;
  rectImMax?: number;
}

export class RecipeError extends Error {}

const NUMERIC_KEYS = new Set([
  "width", "height",
  "rect_re_min", "rect_re_max", "rect_im_min", "rect_im_max",
]);
const STRING_KEYS = new Set(["kind", "input", "fit_input", "out", "title"]);

export function parseRecipe(text: string): FigureRecipe {
  const values = new Map<string, string>();
  const lines = text.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line.length === 0 || line.startsWith("#")) continue;
    const eq = line.indexOf("=");
    if (eq < 0) {
      throw new RecipeError(`line ${i + 1}: expected 'key = value', got '${line}'`);
    }
    const key = line.slice(0, eq).trim();
    const value = line.slice(eq + 1).trim();
    if (!NUMERIC_KEYS.has(key) && !STRING_KEYS.has(key)) {
      throw new RecipeError(`line ${i + 1}: unknown key '${key}'`);
    }
    if (NUMERIC_KEYS.has(key) && Number.isNaN(Number(value))) {
      throw new RecipeError(`line ${i + 1}: cannot parse number for '${key}'`);
    }
    values.set(key, value);
  }
  const kind = values.get("kind");
  if (!kind || !(FIGURE_KINDS as readonly string[]).includes(kind)) {
    throw new RecipeError(
      `recipe needs kind = one of ${FIGURE_KINDS.join(" | ")}`,
    );
  }
  const input = values.get("input");
  if (!input) throw new RecipeError("recipe needs input = <csv path>");
  const out = values.get("out");
  if (!out) throw new RecipeError("recipe needs out = <svg path>");
  const num = (k: string, dflt: number) =>
    values.has(k) ? Number(values.get(k)) : dflt;
  return {
    kind: kind as FigureKind,
    input,
    fitInput: values.get("fit_input"),
    out,
    title: values.get("title") ?? "",
    width: num("width", 640),
    height: num("height", 480),
    rectReMin: values.has("rect_re_min") ? num("rect_re_min", 0) : undefined,
    rectReMax: values.has("rect_re_max") ? num("rect_re_max", 0) : undefined,
    rectImMin: values.has("rect_im_min") ? num("rect_im_min", 0) : undefined,
    rectImMax: values.has("rect_im_max") ? num("rect_im_max", 0) : undefined,
  };
}
