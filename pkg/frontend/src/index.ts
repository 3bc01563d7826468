export { FIGURE_KINDS, FigureKind, SCHEMAS, SchemaError, readTable, numeric } from './csv';
export { leastSquaresSlope, logLogSlope } from './fit';
export { PlotSpec, RenderResult, render } from './figures';
export { main, parseArgs } from './cli';
