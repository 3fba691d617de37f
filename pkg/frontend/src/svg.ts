/**
 * Minimal deterministic SVG plotting: fixed canvas size, no timestamps, no
 * randomness, numbers formatted with a fixed precision so identical inputs
 * produce byte-identical files.
 */

export interface PanelSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xLog?: boolean;
  yLog?: boolean;
}

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  marker?: "circle" | "square" | "triangle" | "none";
  line?: boolean;
  dash?: string;
}

export interface HLine {
  y: number;
  color: string;
  label: string;
  dash?: string;
}

export interface Curve {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dash?: string;
}

const WIDTH = 460;
const HEIGHT = 340;
const MARGIN = { left: 62, right: 16, top: 30, bottom: 46 };

export const PALETTE = ["#1f5fa8", "#c23b22", "#2e8b57", "#8b5a9e", "#b58900", "#3aa6b9", "#777777", "#d2691e"];

function fmt(value: number): string {
  if (!Number.isFinite(value)) {
    throw new Error(`non-finite coordinate ${value}`);
  }
  return value.toFixed(2);
}

function niceNumber(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 0.01 && abs < 10000) {
    return String(Number(value.toPrecision(3)));
  }
  return value.toExponential(0).replace("+", "");
}

class Scale {
  constructor(
    readonly lo: number,
    readonly hi: number,
    readonly pixLo: number,
    readonly pixHi: number,
    readonly log: boolean,
  ) {}

  at(value: number): number {
    const [a, b] = this.log ? [Math.log10(this.lo), Math.log10(this.hi)] : [this.lo, this.hi];
    const v = this.log ? Math.log10(value) : value;
    const t = b === a ? 0.5 : (v - a) / (b - a);
    return this.pixLo + t * (this.pixHi - this.pixLo);
  }

  ticks(count = 5): number[] {
    if (this.log) {
      const lo = Math.ceil(Math.log10(this.lo) - 1e-9);
      const hi = Math.floor(Math.log10(this.hi) + 1e-9);
      const out: number[] = [];
      for (let d = lo; d <= hi; d++) out.push(Math.pow(10, d));
      return out.length >= 2 ? out : [this.lo, this.hi];
    }
    const out: number[] = [];
    for (let i = 0; i <= count; i++) out.push(this.lo + ((this.hi - this.lo) * i) / count);
    return out;
  }
}

function extent(values: number[], log: boolean): [number, number] {
  const finite = values.filter((v) => Number.isFinite(v) && (!log || v > 0));
  if (finite.length === 0) {
    throw new Error("no plottable values");
  }
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (lo === hi) {
    lo = log ? lo / 2 : lo - 1;
    hi = log ? hi * 2 : hi + 1;
  } else if (log) {
    lo /= 1.3;
    hi *= 1.3;
  } else {
    const pad = 0.06 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  return [lo, hi];
}

function marker(shape: string, x: number, y: number, color: string): string {
  const s = 3.2;
  switch (shape) {
    case "square":
      return `<rect x="${fmt(x - s)}" y="${fmt(y - s)}" width="${fmt(2 * s)}" height="${fmt(2 * s)}" fill="${color}"/>`;
    case "triangle":
      return `<path d="M ${fmt(x)} ${fmt(y - s)} L ${fmt(x + s)} ${fmt(y + s)} L ${fmt(x - s)} ${fmt(y + s)} Z" fill="${color}"/>`;
    default:
      return `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${fmt(s)}" fill="${color}"/>`;
  }
}

export class Panel {
  private series: Series[] = [];
  private hlines: HLine[] = [];
  private curves: Curve[] = [];

  constructor(readonly spec: PanelSpec) {}

  addSeries(series: Series): this {
    if (series.x.length !== series.y.length) {
      throw new Error(`series '${series.label}': x/y length mismatch`);
    }
    this.series.push(series);
    return this;
  }

  addHLine(line: HLine): this {
    this.hlines.push(line);
    return this;
  }

  addCurve(curve: Curve): this {
    this.curves.push(curve);
    return this;
  }

  render(): string {
    const xs = [...this.series, ...this.curves].flatMap((s) => s.x);
    const ys = [
      ...[...this.series, ...this.curves].flatMap((s) => s.y),
      ...this.hlines.map((l) => l.y),
    ];
    const [xLo, xHi] = extent(xs, !!this.spec.xLog);
    const [yLo, yHi] = extent(ys, !!this.spec.yLog);
    const sx = new Scale(xLo, xHi, MARGIN.left, WIDTH - MARGIN.right, !!this.spec.xLog);
    const sy = new Scale(yLo, yHi, HEIGHT - MARGIN.bottom, MARGIN.top, !!this.spec.yLog);

    const parts: string[] = [];
    parts.push(
      `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${WIDTH - MARGIN.left - MARGIN.right}" ` +
        `height="${HEIGHT - MARGIN.top - MARGIN.bottom}" fill="none" stroke="#222" stroke-width="1"/>`,
    );
    for (const tick of sx.ticks()) {
      if (tick < xLo || tick > xHi) continue;
      const px = sx.at(tick);
      parts.push(`<line x1="${fmt(px)}" y1="${HEIGHT - MARGIN.bottom}" x2="${fmt(px)}" y2="${HEIGHT - MARGIN.bottom + 4}" stroke="#222"/>`);
      parts.push(`<text x="${fmt(px)}" y="${HEIGHT - MARGIN.bottom + 16}" text-anchor="middle" font-size="10">${niceNumber(tick)}</text>`);
    }
    for (const tick of sy.ticks()) {
      if (tick < yLo || tick > yHi) continue;
      const py = sy.at(tick);
      parts.push(`<line x1="${MARGIN.left - 4}" y1="${fmt(py)}" x2="${MARGIN.left}" y2="${fmt(py)}" stroke="#222"/>`);
      parts.push(`<text x="${MARGIN.left - 7}" y="${fmt(py + 3)}" text-anchor="end" font-size="10">${niceNumber(tick)}</text>`);
    }

    for (const line of this.hlines) {
      const py = sy.at(line.y);
      parts.push(
        `<line x1="${MARGIN.left}" y1="${fmt(py)}" x2="${WIDTH - MARGIN.right}" y2="${fmt(py)}" ` +
          `stroke="${line.color}" stroke-width="1" stroke-dasharray="${line.dash ?? "6 3 1.5 3"}"/>`,
      );
    }
    for (const curve of this.curves) {
      const d = curve.x.map((x, i) => `${i ? "L" : "M"} ${fmt(sx.at(x))} ${fmt(sy.at(curve.y[i]))}`).join(" ");
      parts.push(`<path d="${d}" fill="none" stroke="${curve.color}" stroke-width="1.2" stroke-dasharray="${curve.dash ?? ""}"/>`);
    }
    for (const series of this.series) {
      const points = series.x
        .map((x, i) => [x, series.y[i]] as const)
        .filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y) && (!this.spec.xLog || x > 0) && (!this.spec.yLog || y > 0));
      if (series.line !== false && points.length > 1) {
        const d = points.map(([x, y], i) => `${i ? "L" : "M"} ${fmt(sx.at(x))} ${fmt(sy.at(y))}`).join(" ");
        parts.push(`<path d="${d}" fill="none" stroke="${series.color}" stroke-width="1.4" stroke-dasharray="${series.dash ?? ""}"/>`);
      }
      if (series.marker !== "none") {
        for (const [x, y] of points) {
          parts.push(marker(series.marker ?? "circle", sx.at(x), sy.at(y), series.color));
        }
      }
    }

    parts.push(`<text x="${WIDTH / 2}" y="16" text-anchor="middle" font-size="12" font-weight="bold">${this.spec.title}</text>`);
    parts.push(`<text x="${WIDTH / 2}" y="${HEIGHT - 10}" text-anchor="middle" font-size="11">${this.spec.xLabel}</text>`);
    parts.push(
      `<text x="14" y="${HEIGHT / 2}" text-anchor="middle" font-size="11" transform="rotate(-90 14 ${HEIGHT / 2})">${this.spec.yLabel}</text>`,
    );

    const legendEntries = [...this.series.map((s) => ({ label: s.label, color: s.color })),
                           ...this.curves.map((c) => ({ label: c.label, color: c.color })),
                           ...this.hlines.map((l) => ({ label: l.label, color: l.color }))]
      .filter((e) => e.label.length > 0);
    legendEntries.slice(0, 8).forEach((entry, i) => {
      const y = MARGIN.top + 12 + 13 * i;
      parts.push(`<line x1="${WIDTH - 120}" y1="${y - 3}" x2="${WIDTH - 104}" y2="${y - 3}" stroke="${entry.color}" stroke-width="2"/>`);
      parts.push(`<text x="${WIDTH - 100}" y="${y}" font-size="9">${entry.label}</text>`);
    });

    return parts.join("\n");
  }
}

export function renderFigure(panels: Panel[]): string {
  const columns = Math.min(panels.length, 2);
  const rows = Math.ceil(panels.length / columns);
  const width = WIDTH * columns;
  const height = HEIGHT * rows;
  const body = panels
    .map((panel, i) => {
      const tx = (i % columns) * WIDTH;
      const ty = Math.floor(i / columns) * HEIGHT;
      return `<g transform="translate(${tx} ${ty})">\n${panel.render()}\n</g>`;
    })
    .join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n${body}\n</svg>\n`
  );
}
