/** Minimal deterministic SVG assembly: fixed canvas, fixed formatting,
 * no timestamps or generated ids, so identical inputs yield identical
 * bytes. */

export const WIDTH = 640;
export const HEIGHT = 480;
export const MARGIN = { top: 40, right: 24, bottom: 56, left: 72 };

export const PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#8c564b'];

/** Fixed-point pixel coordinate (avoids float formatting jitter). */
export function px(value: number): string {
  return value.toFixed(2);
}

/** Deterministic tick/annotation label for a data value. */
export function label(value: number): string {
  if (value === 0) return '0';
  const abs = Math.abs(value);
  if (abs >= 0.01 && abs < 10000) {
    return String(parseFloat(value.toPrecision(6)));
  }
  return value.toExponential(0).replace('e+', 'e');
}

export interface Scale {
  (value: number): number;
  ticks(): number[];
  domain: [number, number];
}

export function logScale(lo: number, hi: number, rlo: number, rhi: number): Scale {
  const la = Math.log10(lo);
  const lb = Math.log10(hi);
  const scale = ((value: number) =>
    rlo + ((Math.log10(value) - la) / (lb - la)) * (rhi - rlo)) as Scale;
  scale.domain = [lo, hi];
  scale.ticks = () => {
    const ticks: number[] = [];
    for (let e = Math.ceil(la); e <= Math.floor(lb); e++) {
      ticks.push(Math.pow(10, e));
    }
    if (ticks.length < 2) return [lo, hi];
    return ticks;
  };
  return scale;
}

export function linearScale(lo: number, hi: number, rlo: number, rhi: number): Scale {
  const span = hi - lo || 1;
  const scale = ((value: number) =>
    rlo + ((value - lo) / span) * (rhi - rlo)) as Scale;
  scale.domain = [lo, hi];
  scale.ticks = () => {
    const n = 6;
    const ticks: number[] = [];
    for (let i = 0; i <= n; i++) {
      ticks.push(lo + (span * i) / n);
    }
    return ticks;
  };
  return scale;
}

export class SvgBuilder {
  private parts: string[] = [];

  constructor(title: string) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
        `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      `<text x="${px(WIDTH / 2)}" y="24" text-anchor="middle" font-size="15">` +
        `${escapeXml(title)}</text>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, dash = ''): void {
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : '';
    this.parts.push(
      `<line x1="${px(x1)}" y1="${px(y1)}" x2="${px(x2)}" y2="${px(y2)}" ` +
        `stroke="${stroke}" stroke-width="1"${dashAttr}/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, dash = ''): void {
    if (points.length === 0) return;
    const coords = points.map(([x, y]) => `${px(x)},${px(y)}`).join(' ');
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : '';
    this.parts.push(
      `<polyline points="${coords}" fill="none" stroke="${stroke}" ` +
        `stroke-width="1.5"${dashAttr}/>`,
    );
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.parts.push(
      `<circle cx="${px(x)}" cy="${px(y)}" r="${px(r)}" fill="${fill}"/>`,
    );
  }

  /** Upward triangle marker, used for diverged rows pinned to the top edge. */
  marker(x: number, y: number, fill: string): void {
    const d = 5;
    this.parts.push(
      `<path d="M ${px(x)} ${px(y - d)} L ${px(x + d)} ${px(y + d)} ` +
        `L ${px(x - d)} ${px(y + d)} Z" fill="${fill}"/>`,
    );
  }

  text(x: number, y: number, content: string, opts: { anchor?: string; size?: number; fill?: string } = {}): void {
    const anchor = opts.anchor ?? 'start';
    const size = opts.size ?? 12;
    const fill = opts.fill ?? '#000';
    this.parts.push(
      `<text x="${px(x)}" y="${px(y)}" text-anchor="${anchor}" ` +
        `font-size="${size}" fill="${fill}">${escapeXml(content)}</text>`,
    );
  }

  axes(xScale: Scale, yScale: Scale, xLabel: string, yLabel: string): void {
    const x0 = MARGIN.left;
    const x1 = WIDTH - MARGIN.right;
    const y0 = HEIGHT - MARGIN.bottom;
    const y1 = MARGIN.top;
    this.line(x0, y0, x1, y0, '#000');
    this.line(x0, y0, x0, y1, '#000');
    for (const t of xScale.ticks()) {
      const x = xScale(t);
      this.line(x, y0, x, y0 + 4, '#000');
      this.line(x, y0, x, y1, '#ddd');
      this.text(x, y0 + 18, label(t), { anchor: 'middle', size: 11 });
    }
    for (const t of yScale.ticks()) {
      const y = yScale(t);
      this.line(x0 - 4, y, x0, y, '#000');
      this.line(x0, y, x1, y, '#ddd');
      this.text(x0 - 8, y + 4, label(t), { anchor: 'end', size: 11 });
    }
    this.text((x0 + x1) / 2, HEIGHT - 16, xLabel, { anchor: 'middle' });
    this.parts.push(
      `<text x="18" y="${px((y0 + y1) / 2)}" text-anchor="middle" font-size="12" ` +
        `transform="rotate(-90 18 ${px((y0 + y1) / 2)})">${escapeXml(yLabel)}</text>`,
    );
  }

  render(): string {
    return this.parts.join('\n') + '\n</svg>\n';
  }
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;');
}
