/** Least-squares slope of y against x (the harness's slope rule applied
 * in log-log or semi-log coordinates by the caller). */
export function leastSquaresSlope(x: number[], y: number[]): number {
  if (x.length !== y.length || x.length < 2) {
    throw new Error('slope fit needs at least two (x, y) pairs');
  }
  const n = x.length;
  const mx = x.reduce((a, b) => a + b, 0) / n;
  const my = y.reduce((a, b) => a + b, 0) / n;
  let sxy = 0;
  let sxx = 0;
  for (let i = 0; i < n; i++) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx === 0) {
    throw new Error('slope fit needs at least two distinct x values');
  }
  return sxy / sxx;
}

/** Slope of log(error) against log(tau) over positive pairs. */
export function logLogSlope(taus: number[], errors: number[]): number {
  const lx: number[] = [];
  const ly: number[] = [];
  for (let i = 0; i < taus.length; i++) {
    if (taus[i] > 0 && errors[i] > 0) {
      lx.push(Math.log(taus[i]));
      ly.push(Math.log(errors[i]));
    }
  }
  return leastSquaresSlope(lx, ly);
}
