/**
 * Guide-line values are always computed from the formulas, never from data:
 * the standard quantum limit sqrt(N), the Heisenberg limit N, and the
 * Cramer-Rao bound 1/(sqrt(M) * N) for an N-fold phase generator.
 */

export function sqlThreshold(n: number): number {
  if (!Number.isInteger(n) || n < 1) {
    throw new Error(`excitation degree must be a positive integer, got ${n}`);
  }
  return Math.sqrt(n);
}

export function hlThreshold(n: number): number {
  if (!Number.isInteger(n) || n < 1) {
    throw new Error(`excitation degree must be a positive integer, got ${n}`);
  }
  return n;
}

export function qcrBound(mShots: number, n: number): number {
  if (mShots < 1) {
    throw new Error(`repetition count must be >= 1, got ${mShots}`);
  }
  return 1.0 / (Math.sqrt(mShots) * hlThreshold(n));
}

/** Ideal output signal (1 - cos(N phi)) / 2 used as the fig2 reference curve. */
export function idealSignal(phi: number, n: number): number {
  return 0.5 * (1.0 - Math.cos(n * phi));
}
