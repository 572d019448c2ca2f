/**
 * Exponential-rate fit on the [lo, hi] window, mirroring the simulator's
 * `fit` subcommand: the window opens at the first sample at or below hi and
 * closes at the first later sample below lo, and the rate is minus the
 * least-squares slope of log(values) there.
 */

export interface DecayFit {
  rate: number;
  intercept: number;
  window: [number, number];
  rSquared: number;
  nPoints: number;
}

export class WindowNotFound extends Error {}

export function fitDecay(
  times: number[],
  values: number[],
  lo = 1e-8,
  hi = 1e-3,
): DecayFit {
  if (times.length !== values.length) {
    throw new WindowNotFound("times/values length mismatch");
  }
  let i0 = -1;
  for (let i = 0; i < values.length; i++) {
    if (values[i] <= hi) {
      i0 = i;
      break;
    }
  }
  if (i0 < 0) {
    throw new WindowNotFound(`quantity never drops to ${hi}`);
  }
  let i1 = values.length;
  for (let i = i0; i < values.length; i++) {
    if (values[i] < lo) {
      i1 = i;
      break;
    }
  }
  if (i1 - i0 < 5) {
    throw new WindowNotFound("decay window holds fewer than 5 samples");
  }
  let sx = 0;
  let sy = 0;
  let sxx = 0;
  let sxy = 0;
  const n = i1 - i0;
  for (let i = i0; i < i1; i++) {
    if (values[i] <= 0) {
      throw new WindowNotFound("nonpositive value inside the fit window");
    }
    const x = times[i];
    const y = Math.log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const denom = n * sxx - sx * sx;
  const slope = (n * sxy - sx * sy) / denom;
  const intercept = (sy - slope * sx) / n;
  let ssRes = 0;
  let ssTot = 0;
  const mean = sy / n;
  for (let i = i0; i < i1; i++) {
    const y = Math.log(values[i]);
    const yhat = slope * times[i] + intercept;
    ssRes += (y - yhat) * (y - yhat);
    ssTot += (y - mean) * (y - mean);
  }
  return {
    rate: -slope,
    intercept,
    window: [times[i0], times[i1 - 1]],
    rSquared: ssTot > 0 ? 1 - ssRes / ssTot : 1,
    nPoints: n,
  };
}
