/**
 * Catalog fixture for the pure unit tests: the real id/stage/verdict
 * lattice with placeholder wording.  Tests that care about rule TEXT use
 * the live catalog from the API instead (no guideline copy lives here).
 */

import type { Rule, Stage } from "../src/api.js";

function block(
  prefix: string,
  stage: Stage,
  verdict: string,
  mto: (n: number) => boolean = () => false,
): Rule[] {
  return [1, 2, 3].map((n) => ({
    id: `${prefix}${n}`,
    stage,
    verdict,
    prompt: `placeholder prompt ${prefix}${n}`,
    example: `placeholder example ${prefix}${n}`,
    mto_based: mto(n),
  }));
}

export const CATALOG: Rule[] = [
  ...block("N", "TopLevel", "Neutral"),
  ...block("H", "TopLevel", "Hostile"),
  ...block("S", "Structure", "Simple"),
  ...block("C", "Structure", "Complex"),
  ...block("SH", "SimpleFine", "Hateful"),
  ...block("SO", "SimpleFine", "Offensive"),
  ...block("CH", "ComplexFine", "Hateful", (n) => n >= 2),
  ...block("CO", "ComplexFine", "Offensive", (n) => n >= 2),
];

/** Deterministic PRNG for reproducible random walks. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function pick<T>(rng: () => number, items: readonly T[]): T {
  if (items.length === 0) throw new Error("empty pick");
  return items[Math.floor(rng() * items.length)]!;
}
