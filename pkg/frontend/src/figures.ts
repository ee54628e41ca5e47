/**
 * The six figure renderers.  All numerical content comes from the CSVs; no
 * science is recomputed here (fit lines re-use the CLI's exponent columns).
 */

import { numericColumns, readTable, stringColumn } from "./csv.js";
import { FigureRecipe } from "./recipe.js";
import { DEFAULT_MARGINS, heatColor, Scale, SERIES_COLORS, Svg } from "./svg.js";

function frame(recipe: FigureRecipe) {
  const m = DEFAULT_MARGINS;
  const svg = new Svg(recipe.width, recipe.height);
  if (recipe.title) {
    svg.text(recipe.width / 2, 18, recipe.title, 'font-size="13" text-anchor="middle"');
  }
  return {
    svg,
    xr: [m.left, recipe.width - m.right] as const,
    yr: [recipe.height - m.bottom, m.top] as const,
  };
}

export function renderFigure(recipe: FigureRecipe): string {
  switch (recipe.kind) {
    case "loglog-iterations-with-fit":
      return loglogIterations(recipe);
    case "eigenvalue-scatter":
      return eigenvalueScatter(recipe);
    case "flow-arrows":
      return flowArrows(recipe);
    case "counting-vs-prediction":
      return countingVsPrediction(recipe);
    case "field-heatmap":
      return fieldHeatmap(recipe);
    case "error-curves":
      return errorCurves(recipe);
  }
}

function loglogIterations(recipe: FigureRecipe): string {
  const table = readTable(recipe.input);
  const data = numericColumns(table, ["k", "iterations"], recipe.input);
  const { svg, xr, yr } = frame(recipe);
  const sx = Scale.fit(data.map((r) => r[0]), xr[0], xr[1], true);
  const sy = Scale.fit(data.map((r) => r[1]), yr[0], yr[1], true);
  svg.axes(sx, sy, "wavenumber k", "GMRES iterations");
  for (const [k, it] of data) {
    if (k > 0 && it > 0) svg.circle(sx.apply(k), sy.apply(it), 3, SERIES_COLORS[0]);
  }
  if (recipe.fitInput) {
    const fit = readTable(recipe.fitInput);
    const [[a, c]] = numericColumns(fit, ["exponent", "prefactor"], recipe.fitInput);
    const ks = data.map((r) => r[0]).filter((k) => k > 0);
    if (ks.length) {
      const k0 = Math.min(...ks);
      const k1 = Math.max(...ks);
      const pts: string[] = [];
      for (let i = 0; i <= 64; i++) {
        const k = k0 * (k1 / k0) ** (i / 64);
        const v = c * k ** a;
        pts.push(`${i === 0 ? "M" : "L"}${sx.apply(k).toFixed(3)} ${sy.apply(v).toFixed(3)}`);
      }
      svg.path(pts.join(" "), SERIES_COLORS[1]);
      svg.text(xr[1] - 8, yr[1] + 14, `fit ~ k^${a.toFixed(3)}`,
        'font-size="11" text-anchor="end"');
    }
  }
  return svg.render();
}

function eigenvalueScatter(recipe: FigureRecipe): string {
  const table = readTable(recipe.input);
  const data = numericColumns(table, ["re_lambda", "im_lambda"], recipe.input);
  const { svg, xr, yr } = frame(recipe);
  const sx = Scale.fit(data.map((r) => r[0]).concat([0]), xr[0], xr[1]);
  const sy = Scale.fit(data.map((r) => r[1]).concat([0]), yr[0], yr[1]);
  svg.axes(sx, sy, "Re", "Im");
  if (recipe.rectReMin !== undefined && recipe.rectReMax !== undefined
      && recipe.rectImMin !== undefined && recipe.rectImMax !== undefined) {
    const x = sx.apply(recipe.rectReMin);
    const y = sy.apply(recipe.rectImMax);
    svg.rect(x, y, sx.apply(recipe.rectReMax) - x, sy.apply(recipe.rectImMin) - y,
      'fill="none" stroke="#000" stroke-dasharray="4 3"');
  }
  for (const [re, im] of data) {
    svg.circle(sx.apply(re), sy.apply(im), 2.2, SERIES_COLORS[0]);
  }
  return svg.render();
}

function flowArrows(recipe: FigureRecipe): string {
  const table = readTable(recipe.input);
  const data = numericColumns(table, ["path", "k", "re_lambda", "im_lambda"],
    recipe.input);
  const { svg, xr, yr } = frame(recipe);
  const sx = Scale.fit(data.map((r) => r[2]), xr[0], xr[1]);
  const sy = Scale.fit(data.map((r) => r[3]), yr[0], yr[1]);
  svg.axes(sx, sy, "Re", "Im");
  const byPath = new Map<number, [number, number, number][]>();
  for (const [p, k, re, im] of data) {
    if (!byPath.has(p)) byPath.set(p, []);
    byPath.get(p)!.push([k, re, im]);
  }
  let idx = 0;
  for (const [, pts] of [...byPath.entries()].sort((a, b) => a[0] - b[0])) {
    pts.sort((a, b) => a[0] - b[0]);
    const color = SERIES_COLORS[idx % SERIES_COLORS.length];
    idx += 1;
    const d = pts
      .map(([, re, im], i) =>
        `${i === 0 ? "M" : "L"}${sx.apply(re).toFixed(3)} ${sy.apply(im).toFixed(3)}`)
      .join(" ");
    svg.path(d, color, 1);
    for (let i = 1; i < pts.length; i++) {
      const [x0, y0] = [sx.apply(pts[i - 1][1]), sy.apply(pts[i - 1][2])];
      const [x1, y1] = [sx.apply(pts[i][1]), sy.apply(pts[i][2])];
      arrowHead(svg, x0, y0, x1, y1, color);
    }
  }
  return svg.render();
}

function arrowHead(svg: Svg, x0: number, y0: number, x1: number, y1: number,
                   color: string): void {
  const dx = x1 - x0;
  const dy = y1 - y0;
  const len = Math.hypot(dx, dy);
  if (len < 1e-9) return;
  const ux = dx / len, uy = dy / len;
  const s = 3.5;
  const bx = x1 - s * ux, by = y1 - s * uy;
  svg.path(
    `M${x1.toFixed(3)} ${y1.toFixed(3)} ` +
    `L${(bx - s * 0.5 * uy).toFixed(3)} ${(by + s * 0.5 * ux).toFixed(3)} ` +
    `L${(bx + s * 0.5 * uy).toFixed(3)} ${(by - s * 0.5 * ux).toFixed(3)} Z`,
    color, 0.5, color,
  );
}

function countingVsPrediction(recipe: FigureRecipe): string {
  const table = readTable(recipe.input);
  const data = numericColumns(table, ["k", "predicted_count", "measured_count"],
    recipe.input);
  const { svg, xr, yr } = frame(recipe);
  data.sort((a, b) => a[0] - b[0]);
  const sx = Scale.fit(data.map((r) => r[0]), xr[0], xr[1]);
  const sy = Scale.fit(
    data.flatMap((r) => [r[1], r[2]]).concat([0]), yr[0], yr[1]);
  svg.axes(sx, sy, "wavenumber k", "near-zero eigenvalues");
  const d = data
    .map(([k, p], i) => `${i === 0 ? "M" : "L"}${sx.apply(k).toFixed(3)} ${sy.apply(p).toFixed(3)}`)
    .join(" ");
  svg.path(d, SERIES_COLORS[1]);
  for (const [k, , m] of data) {
    svg.circle(sx.apply(k), sy.apply(m), 3, SERIES_COLORS[0]);
  }
  svg.text(xr[1] - 8, yr[1] + 14, "markers: measured, line: predicted",
    'font-size="11" text-anchor="end"');
  return svg.render();
}

function fieldHeatmap(recipe: FigureRecipe): string {
  const table = readTable(recipe.input);
  const data = numericColumns(table, ["x", "y", "abs_u"], recipe.input);
  const { svg, xr, yr } = frame(recipe);
  const xs = [...new Set(data.map((r) => r[0]))].sort((a, b) => a - b);
  const ys = [...new Set(data.map((r) => r[1]))].sort((a, b) => a - b);
  const sx = Scale.fit(xs, xr[0], xr[1]);
  const sy = Scale.fit(ys, yr[0], yr[1]);
  svg.axes(sx, sy, "x", "y");
  const vmax = Math.max(...data.map((r) => r[2]), 1e-30);
  const cw = xs.length > 1 ? (sx.apply(xs[1]) - sx.apply(xs[0])) : 8;
  const ch = ys.length > 1 ? Math.abs(sy.apply(ys[1]) - sy.apply(ys[0])) : 8;
  for (const [x, y, v] of data) {
    svg.rect(sx.apply(x) - cw / 2, sy.apply(y) - ch / 2, cw, ch,
      `fill="${heatColor(v / vmax)}"`);
  }
  return svg.render();
}

function errorCurves(recipe: FigureRecipe): string {
  const table = readTable(recipe.input);
  // works for both galerkin-error (grouped by level_factor) and gmres-error
  const grouped = table.columns.includes("level_factor");
  const cols = grouped ? ["k", "level_factor", "rel_l2_error"]
                       : ["k", "rel_l2_error"];
  const data = numericColumns(table, cols, recipe.input);
  const { svg, xr, yr } = frame(recipe);
  const sx = Scale.fit(data.map((r) => r[0]), xr[0], xr[1]);
  const sy = Scale.fit(data.map((r) => r[grouped ? 2 : 1]), yr[0], yr[1], true);
  svg.axes(sx, sy, "wavenumber k", "relative L2 error");
  const series = new Map<number, [number, number][]>();
  for (const row of data) {
    const key = grouped ? row[1] : 0;
    if (!series.has(key)) series.set(key, []);
    series.get(key)!.push([row[0], row[grouped ? 2 : 1]]);
  }
  let idx = 0;
  for (const [key, pts] of [...series.entries()].sort((a, b) => a[0] - b[0])) {
    pts.sort((a, b) => a[0] - b[0]);
    const color = SERIES_COLORS[idx % SERIES_COLORS.length];
    idx += 1;
    const d = pts
      .map(([k, e], i) => `${i === 0 ? "M" : "L"}${sx.apply(k).toFixed(3)} ${sy.apply(e).toFixed(3)}`)
      .join(" ");
    svg.path(d, color);
    for (const [k, e] of pts) svg.circle(sx.apply(k), sy.apply(e), 2.5, color);
    if (grouped) {
      svg.text(xr[1] - 8, yr[1] + 14 + 12 * (idx - 1), `level ${key}`,
        `font-size="11" text-anchor="end" fill="${color}"`);
    }
  }
  return svg.render();
}
