/**
 * Minimal deterministic SVG scene builder: linear/log axes, polylines,
 * markers, annotations.  No timestamps or randomness, so re-rendering the
 * same inputs yields identical bytes.
 */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

const FMT = (x: number): string => {
  if (!Number.isFinite(x)) return "0";
  return Number(x.toFixed(3)).toString();
};

export class Scale {
  constructor(
    readonly lo: number,
    readonly hi: number,
    readonly pixLo: number,
    readonly pixHi: number,
    readonly log = false,
  ) {}

  at(v: number): number {
    const [a, b] = this.log
      ? [Math.log10(this.lo), Math.log10(this.hi)]
      : [this.lo, this.hi];
    const x = this.log ? Math.log10(v) : v;
    const t = (x - a) / (b - a || 1);
    return this.pixLo + t * (this.pixHi - this.pixLo);
  }

  ticks(n = 6): number[] {
    if (this.log) {
      const lo = Math.ceil(Math.log10(this.lo));
      const hi = Math.floor(Math.log10(this.hi));
      const out: number[] = [];
      const step = Math.max(1, Math.round((hi - lo) / n));
      for (let e = lo; e <= hi; e += step) out.push(Math.pow(10, e));
      return out;
    }
    const span = this.hi - this.lo;
    if (span <= 0) return [this.lo];
    const raw = span / n;
    const mag = Math.pow(10, Math.floor(Math.log10(raw)));
    const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= n)!;
    const out: number[] = [];
    for (let v = Math.ceil(this.lo / step) * step; v <= this.hi + 1e-12 * span; v += step) {
      out.push(v);
    }
    return out;
  }
}

export class Svg {
  private parts: string[] = [];

  constructor(
    readonly width = 720,
    readonly height = 480,
    readonly margin: Margin = { top: 36, right: 24, bottom: 48, left: 72 },
  ) {}

  get innerLeft(): number {
    return this.margin.left;
  }

  get innerRight(): number {
    return this.width - this.margin.right;
  }

  get innerTop(): number {
    return this.margin.top;
  }

  get innerBottom(): number {
    return this.height - this.margin.bottom;
  }

  xScale(lo: number, hi: number, log = false): Scale {
    return new Scale(lo, hi, this.innerLeft, this.innerRight, log);
  }

  yScale(lo: number, hi: number, log = false): Scale {
    return new Scale(lo, hi, this.innerBottom, this.innerTop, log);
  }

  polyline(xs: number[], ys: number[], sx: Scale, sy: Scale, stroke: string,
           cls = "series"): void {
    const pts: string[] = [];
    for (let i = 0; i < xs.length; i++) {
      if (!Number.isFinite(xs[i]) || !Number.isFinite(ys[i])) continue;
      if (sy.log && ys[i] <= 0) continue;
      pts.push(`${FMT(sx.at(xs[i]))},${FMT(sy.at(ys[i]))}`);
    }
    this.parts.push(
      `<polyline class="${cls}" fill="none" stroke="${stroke}" ` +
        `stroke-width="1.5" points="${pts.join(" ")}"/>`,
    );
  }

  marker(x: number, y: number, sx: Scale, sy: Scale, fill: string,
         cls = "marker", r = 3.5): void {
    this.parts.push(
      `<circle class="${cls}" cx="${FMT(sx.at(x))}" cy="${FMT(sy.at(y))}" ` +
        `r="${r}" fill="${fill}"/>`,
    );
  }

  vline(x: number, sx: Scale, stroke: string, cls = "vline"): void {
    this.parts.push(
      `<line class="${cls}" x1="${FMT(sx.at(x))}" y1="${this.innerTop}" ` +
        `x2="${FMT(sx.at(x))}" y2="${this.innerBottom}" stroke="${stroke}" ` +
        `stroke-dasharray="5,4" stroke-width="1.2"/>`,
    );
  }

  text(x: number, y: number, content: string, cls = "label",
       anchor = "start"): void {
    this.parts.push(
      `<text class="${cls}" x="${FMT(x)}" y="${FMT(y)}" ` +
        `text-anchor="${anchor}" font-family="sans-serif" ` +
        `font-size="12">${escapeXml(content)}</text>`,
    );
  }

  axes(sx: Scale, sy: Scale, xLabel: string, yLabel: string): void {
    const b = this.innerBottom;
    const l = this.innerLeft;
    this.parts.push(
      `<line x1="${l}" y1="${b}" x2="${this.innerRight}" y2="${b}" stroke="#333"/>`,
      `<line x1="${l}" y1="${this.innerTop}" x2="${l}" y2="${b}" stroke="#333"/>`,
    );
    for (const t of sx.ticks()) {
      const px = FMT(sx.at(t));
      this.parts.push(
        `<line x1="${px}" y1="${b}" x2="${px}" y2="${b + 5}" stroke="#333"/>`,
        `<text x="${px}" y="${b + 18}" text-anchor="middle" ` +
          `font-family="sans-serif" font-size="10">${tickLabel(t, sx.log)}</text>`,
      );
    }
    for (const t of sy.ticks()) {
      const py = FMT(sy.at(t));
      this.parts.push(
        `<line x1="${l - 5}" y1="${py}" x2="${l}" y2="${py}" stroke="#333"/>`,
        `<text x="${l - 8}" y="${Number(py) + 3}" text-anchor="end" ` +
          `font-family="sans-serif" font-size="10">${tickLabel(t, sy.log)}</text>`,
      );
    }
    this.text((l + this.innerRight) / 2, this.height - 10, xLabel, "axis-label",
              "middle");
    this.parts.push(
      `<text class="axis-label" x="16" y="${(this.innerTop + b) / 2}" ` +
        `text-anchor="middle" font-family="sans-serif" font-size="12" ` +
        `transform="rotate(-90 16 ${(this.innerTop + b) / 2})">` +
        `${escapeXml(yLabel)}</text>`,
    );
  }

  title(content: string): void {
    this.text(this.innerLeft, 20, content, "title");
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function tickLabel(t: number, log: boolean): string {
  if (log) {
    const e = Math.round(Math.log10(t));
    return `1e${e}`;
  }
  if (t === 0) return "0";
  const a = Math.abs(t);
  if (a >= 1e4 || a < 1e-3) return t.toExponential(0);
  return Number(t.toPrecision(6)).toString();
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}
