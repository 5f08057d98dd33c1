/** Shared test data and small helpers for the console tests. */

import type { ExplainResponse, ModelInfo } from "../src/api.js";

export const MODEL: ModelInfo = {
  target: { name: "p_survival", classes: ["alive", "not_alive"] },
  features: [
    { name: "rec_afp", kind: "numeric", categories: null, thresholds: [509, 635] },
    { name: "rec_vhc", kind: "categorical", categories: ["false", "true"], thresholds: null },
    { name: "don_age", kind: "numeric", categories: null, thresholds: null },
    { name: "rec_provenance", kind: "categorical", categories: ["home", "other"], thresholds: null },
    { name: "don_microesteatosis", kind: "numeric", categories: null, thresholds: [50] },
  ],
  labels: {
    nodes: { alive: "Good (>=5years)", not_alive: "Bad (<5years)" },
    paths: { alive: "Good forecast", not_alive: "Bad forecast (<5years)" },
  },
};

export const EXPLANATION: ExplainResponse = {
  prediction: "not_alive",
  rendered:
    '>> prediction(14)\t[1]\n  *\n  |__"Bad forecast (<5years)"\n' +
    '     |__"rec_afp in (509,635]"\n     |__"rec_vhc = true"\n',
  explanations: [
    {
      label: "Bad forecast (<5years)",
      children: [
        { label: "rec_afp in (509,635]", children: [] },
        { label: "rec_vhc = true", children: [] },
      ],
    },
  ],
};

/** Deterministic 32-bit PRNG so randomized checks are reproducible. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export const pick = <T>(rand: () => number, items: T[]): T => {
  const index = Math.floor(rand() * items.length);
  return items[Math.min(index, items.length - 1)] as T;
};

export const jsonResponse = (body: unknown, status = 200): Response =>
  new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
