import {
  FigureKind,
  ResultRow,
  ResultTable,
  SchemaError,
  numeric,
  readTable,
} from './csv';
import { logLogSlope } from './fit';
import {
  HEIGHT,
  MARGIN,
  PALETTE,
  Scale,
  SvgBuilder,
  WIDTH,
  linearScale,
  logScale,
} from './svg';

export interface PlotSpec {
  inputCsv: string;
  figureKind: FigureKind;
  outputImage: string;
  guideSlopes: number[];
}

export interface RenderResult {
  svg: string;
  /** Fitted log-log slope per series, as annotated on the figure. */
  slopes: Record<string, number>;
}

const X0 = MARGIN.left;
const X1 = WIDTH - MARGIN.right;
const Y0 = HEIGHT - MARGIN.bottom;
const Y1 = MARGIN.top;

function groupByMethod(rows: ResultRow[]): Map<string, ResultRow[]> {
  const groups = new Map<string, ResultRow[]>();
  for (const row of rows) {
    const method = row['method'];
    if (!groups.has(method)) groups.set(method, []);
    groups.get(method)!.push(row);
  }
  return groups;
}

function positiveExtent(values: number[]): [number, number] {
  const positive = values.filter((v) => v > 0);
  if (positive.length === 0) {
    throw new SchemaError('no positive values to place on a log axis');
  }
  return [Math.min(...positive), Math.max(...positive)];
}

function renderOrder(table: ResultTable, guideSlopes: number[]): RenderResult {
  const taus: number[] = [];
  const errs: number[] = [];
  for (const row of table.rows) {
    const tau = numeric(row, 'tau');
    const err = numeric(row, 'h1_error');
    if (tau !== null && tau > 0) taus.push(tau);
    if (err !== null && err > 0) errs.push(err);
  }
  const [tLo, tHi] = positiveExtent(taus);
  const [eLo, eHi] = positiveExtent(errs);
  const xScale = logScale(tLo, tHi, X0, X1);
  const yScale = logScale(eLo, eHi, Y0, Y1);

  const svg = new SvgBuilder('Temporal convergence (H1 error at final time)');
  svg.axes(xScale, yScale, 'step size tau', 'H1 error');

  for (const slope of guideSlopes) {
    // anchor each guide line at the coarsest tau and the largest error
    const anchorY = (tau: number) => eHi * Math.pow(tau / tHi, slope);
    svg.polyline(
      [
        [xScale(tLo), yScale(anchorY(tLo))],
        [xScale(tHi), yScale(anchorY(tHi))],
      ],
      '#888',
      '6 4',
    );
    svg.text(xScale(tLo) + 6, yScale(anchorY(tLo)) - 6, `slope ${slope}`, {
      size: 11,
      fill: '#888',
    });
  }

  const slopes: Record<string, number> = {};
  let seriesIndex = 0;
  let legendY = Y1 + 14;
  for (const [method, rows] of groupByMethod(table.rows)) {
    const color = PALETTE[seriesIndex % PALETTE.length];
    const points: Array<[number, number]> = [];
    const fitTaus: number[] = [];
    const fitErrs: number[] = [];
    for (const row of rows) {
      const tau = numeric(row, 'tau');
      if (tau === null || tau <= 0) continue;
      const err = numeric(row, 'h1_error');
      if (row['status'] !== 'ok' || err === null) {
        svg.marker(xScale(tau), Y1, color);
        continue;
      }
      if (err <= 0) continue;
      points.push([xScale(tau), yScale(err)]);
      fitTaus.push(tau);
      fitErrs.push(err);
    }
    points.sort((a, b) => a[0] - b[0]);
    svg.polyline(points, color);
    for (const [x, y] of points) svg.circle(x, y, 3, color);
    let legend = method;
    if (fitTaus.length >= 2) {
      const slope = logLogSlope(fitTaus, fitErrs);
      slopes[method] = slope;
      legend += ` (slope ${slope.toFixed(6)})`;
    }
    svg.text(X1 - 8, legendY, legend, { anchor: 'end', fill: color, size: 11 });
    legendY += 16;
    seriesIndex += 1;
  }
  return { svg: svg.render(), slopes };
}

function renderDrift(table: ResultTable): RenderResult {
  const errorColumns = table.columns.includes('pairing_err')
    ? ['pairing_err']
    : ['momentum_err', 'hamiltonian_err'];
  const times: number[] = [];
  const errs: number[] = [];
  for (const row of table.rows) {
    const t = numeric(row, 'time');
    if (t !== null) times.push(t);
    for (const column of errorColumns) {
      const err = numeric(row, column);
      if (err !== null && err > 0) errs.push(err);
    }
  }
  if (times.length === 0) throw new SchemaError('no finite time values');
  const [eLo, eHi] = positiveExtent(errs);
  const xScale = linearScale(Math.min(...times), Math.max(...times), X0, X1);
  const yScale = logScale(eLo, eHi, Y0, Y1);

  const svg = new SvgBuilder('Conserved-quantity drift over time');
  svg.axes(xScale, yScale, 'time', 'absolute drift');

  let seriesIndex = 0;
  let legendY = Y1 + 14;
  for (const [method, rows] of groupByMethod(table.rows)) {
    const color = PALETTE[seriesIndex % PALETTE.length];
    errorColumns.forEach((column, k) => {
      const dash = k === 1 ? '4 3' : '';
      const points: Array<[number, number]> = [];
      for (const row of rows) {
        const t = numeric(row, 'time');
        if (t === null) continue;
        if (row['status'] !== 'ok') {
          if (k === 0) svg.marker(xScale(t), Y1, color);
          continue;
        }
        const err = numeric(row, column);
        if (err !== null && err > 0) points.push([xScale(t), yScale(err)]);
      }
      svg.polyline(points, color, dash);
      const name = errorColumns.length > 1 ? `${method} ${column}` : method;
      svg.text(X1 - 8, legendY, name, { anchor: 'end', fill: color, size: 11 });
      legendY += 16;
    });
    seriesIndex += 1;
  }
  return { svg: svg.render(), slopes: {} };
}

function renderSweep(table: ResultTable): RenderResult {
  const taus: number[] = [];
  const errs: number[] = [];
  for (const row of table.rows) {
    const tau = numeric(row, 'tau');
    if (tau !== null && tau > 0) taus.push(tau);
    const err = numeric(row, 'max_hamiltonian_err');
    if (err !== null && err > 0) errs.push(err);
  }
  const [tLo, tHi] = positiveExtent(taus);
  const [eLo, eHi] = positiveExtent(errs);
  const xScale = logScale(tLo, tHi, X0, X1);
  const yScale = logScale(eLo, eHi, Y0, Y1);

  const svg = new SvgBuilder('Long-time Hamiltonian error across step sizes');
  svg.axes(xScale, yScale, 'step size tau', 'max Hamiltonian drift');

  const color = PALETTE[0];
  const fitTaus: number[] = [];
  const fitErrs: number[] = [];
  for (const row of table.rows) {
    const tau = numeric(row, 'tau');
    if (tau === null || tau <= 0) continue;
    const err = numeric(row, 'max_hamiltonian_err');
    if (row['status'] !== 'ok' || err === null) {
      svg.marker(xScale(tau), Y1, color);
      continue;
    }
    if (err <= 0) continue;
    svg.circle(xScale(tau), yScale(err), 2.5, color);
    fitTaus.push(tau);
    fitErrs.push(err);
  }
  const slopes: Record<string, number> = {};
  if (fitTaus.length >= 2) {
    const slope = logLogSlope(fitTaus, fitErrs);
    slopes['sweep'] = slope;
    svg.text(X1 - 8, Y1 + 14, `fit slope ${slope.toFixed(6)}`, {
      anchor: 'end',
      fill: color,
      size: 11,
    });
  }
  return { svg: svg.render(), slopes };
}

/** Render a figure from a harness result CSV; returns the SVG body. */
export function render(spec: PlotSpec): RenderResult {
  const table = readTable(spec.inputCsv, spec.figureKind);
  switch (spec.figureKind) {
    case 'order':
      return renderOrder(table, spec.guideSlopes);
    case 'drift':
      return renderDrift(table);
    case 'sweep':
      return renderSweep(table);
  }
}
