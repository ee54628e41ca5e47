/**
 * Minimal deterministic SVG scene builder: linear/log scales, axes with
 * tick labels, markers, polylines, rects.  Numbers are formatted with a
 * fixed precision so identical inputs always produce identical bytes.
 */

export interface Margins {
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export const DEFAULT_MARGINS: Margins = { left: 64, right: 16, top: 28, bottom: 44 };

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const s = x.toPrecision(8);
  return s.includes(".") || s.includes("e")
    ? s.replace(/\.?0+($|e)/, "$1")
    : s;
}

export class Scale {
  constructor(
    readonly lo: number,
    readonly hi: number,
    readonly rLo: number,
    readonly rHi: number,
    readonly log: boolean,
  ) {}

  static fit(values: number[], rLo: number, rHi: number, log = false): Scale {
    const finite = values.filter((v) => Number.isFinite(v) && (!log || v > 0));
    let lo = finite.length ? Math.min(...finite) : log ? 1 : 0;
    let hi = finite.length ? Math.max(...finite) : log ? 10 : 1;
    if (lo === hi) {
      lo = log ? lo / 2 : lo - 1;
      hi = log ? hi * 2 : hi + 1;
    }
    if (!log) {
      const pad = 0.05 * (hi - lo);
      lo -= pad;
      hi += pad;
    }
    return new Scale(lo, hi, rLo, rHi, log);
  }

  apply(v: number): number {
    const t = this.log
      ? (Math.log(v) - Math.log(this.lo)) / (Math.log(this.hi) - Math.log(this.lo))
      : (v - this.lo) / (this.hi - this.lo);
    return this.rLo + t * (this.rHi - this.rLo);
  }

  ticks(n = 6): number[] {
    if (this.log) {
      const lo = Math.ceil(Math.log10(this.lo));
      const hi = Math.floor(Math.log10(this.hi));
      const out: number[] = [];
      for (let e = lo; e <= hi; e++) out.push(10 ** e);
      if (out.length === 0) out.push(this.lo, this.hi);
      return out;
    }
    const span = this.hi - this.lo;
    const step = 10 ** Math.floor(Math.log10(span / n));
    const mult = span / n / step >= 5 ? 5 : span / n / step >= 2 ? 2 : 1;
    const s = step * mult;
    const start = Math.ceil(this.lo / s) * s;
    const out: number[] = [];
    for (let v = start; v <= this.hi + 1e-12 * span; v += s) out.push(v);
    return out;
  }
}

export class Svg {
  private parts: string[] = [];
  constructor(readonly width: number, readonly height: number) {}

  add(tag: string): void {
    this.parts.push(tag);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, w = 1): void {
    this.add(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
        `stroke="${stroke}" stroke-width="${w}"/>`,
    );
  }

  circle(cx: number, cy: number, r: number, fill: string): void {
    this.add(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${r}" fill="${fill}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, attrs: string): void {
    this.add(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ${attrs}/>`,
    );
  }

  path(d: string, stroke: string, w = 1.5, fill = "none"): void {
    this.add(`<path d="${d}" stroke="${stroke}" stroke-width="${w}" fill="${fill}"/>`);
  }

  text(x: number, y: number, s: string, attrs = ""): void {
    this.add(`<text x="${fmt(x)}" y="${fmt(y)}" font-family="sans-serif" ${attrs}>${escapeXml(s)}</text>`);
  }

  axes(sx: Scale, sy: Scale, xLabel: string, yLabel: string): void {
    const x0 = sx.rLo, x1 = sx.rHi, y0 = sy.rLo, y1 = sy.rHi;
    this.line(x0, y0, x1, y0, "#000");
    this.line(x0, y0, x0, y1, "#000");
    for (const t of sx.ticks()) {
      const px = sx.apply(t);
      this.line(px, y0, px, y0 + 4, "#000");
      this.text(px, y0 + 16, tickLabel(t, sx.log), 'font-size="10" text-anchor="middle"');
    }
    for (const t of sy.ticks()) {
      const py = sy.apply(t);
      this.line(x0 - 4, py, x0, py, "#000");
      this.text(x0 - 6, py + 3, tickLabel(t, sy.log), 'font-size="10" text-anchor="end"');
    }
    this.text((x0 + x1) / 2, y0 + 34, xLabel, 'font-size="12" text-anchor="middle"');
    this.add(
      `<text x="14" y="${fmt((y0 + y1) / 2)}" font-family="sans-serif" font-size="12" ` +
        `text-anchor="middle" transform="rotate(-90 14 ${fmt((y0 + y1) / 2)})">${escapeXml(yLabel)}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect x="0" y="0" width="${this.width}" height="${this.height}" fill="#ffffff"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function tickLabel(v: number, log: boolean): string {
  if (log) {
    const e = Math.round(Math.log10(v));
    return `1e${e}`;
  }
  return fmt(v);
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Blue-to-red heat colormap on [0, 1]. */
export function heatColor(t: number): string {
  const c = Math.max(0, Math.min(1, t));
  const r = Math.round(255 * Math.min(1, 1.5 * c));
  const g = Math.round(255 * (1 - Math.abs(2 * c - 1)) * 0.85);
  const b = Math.round(255 * Math.min(1, 1.5 * (1 - c)));
  return `rgb(${r},${g},${b})`;
}

export const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
