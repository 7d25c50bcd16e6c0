/**
 * Deterministic hashed token embeddings and alignment scoring.
 *
 * Each token maps to a fixed vector built from hashed character trigrams,
 * so equal tokens always share one embedding and the service needs no
 * model weights. Similarity between two texts is a greedy token
 * alignment: every token of one side is matched to its best counterpart
 * on the other, and the two directional means combine into an F1. Scores
 * live in [0, 1], identical texts score exactly 1, and no other pairing
 * can exceed the self score.
 */

const DIM = 64;

const TOKEN_RE = /[^\W_]+/gu;

export function tokenize(text: string): string[] {
  return text.normalize("NFKC").toLowerCase().match(TOKEN_RE) ?? [];
}

/** FNV-1a 32-bit hash; stable across platforms. */
function fnv1a(text: string, seed: number): number {
  let hash = (0x811c9dc5 ^ seed) >>> 0;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return hash >>> 0;
}

const embeddingCache = new Map<string, Float64Array>();

export function embedToken(token: string): Float64Array {
  const cached = embeddingCache.get(token);
  if (cached) return cached;

  const vector = new Float64Array(DIM);
  const padded = `^${token}$`;
  for (let i = 0; i <= padded.length - 3; i++) {
    const gram = padded.slice(i, i + 3);
    const hash = fnv1a(gram, 0);
    const index = hash % DIM;
    const sign = (hash >>> 8) & 1 ? 1 : -1;
    vector[index] += sign;
  }
  // whole-token component keeps very short tokens distinguishable
  const whole = fnv1a(token, 0x9e3779b9);
  vector[whole % DIM] += (whole >>> 8) & 1 ? 2 : -2;

  let norm = 0;
  for (let i = 0; i < DIM; i++) norm += vector[i] * vector[i];
  norm = Math.sqrt(norm) || 1;
  for (let i = 0; i < DIM; i++) vector[i] /= norm;

  embeddingCache.set(token, vector);
  return vector;
}

function cosine(a: Float64Array, b: Float64Array): number {
  let dot = 0;
  for (let i = 0; i < DIM; i++) dot += a[i] * b[i];
  // unit vectors, so anything past [-1, 1] is rounding noise
  return Math.max(-1, Math.min(1, dot));
}

/** Mean over `from` tokens of the best (non-negative) match in `to`.
 * Exact token matches score exactly 1 so self-similarity is exact. */
function directionalScore(from: string[], to: string[]): number {
  if (from.length === 0 || to.length === 0) return 0;
  const toSet = new Set(to);
  const toVecs = to.map(embedToken);
  let total = 0;
  for (const token of from) {
    if (toSet.has(token)) {
      total += 1;
      continue;
    }
    const vector = embedToken(token);
    let best = 0;
    for (const other of toVecs) {
      const sim = cosine(vector, other);
      if (sim > best) best = sim;
    }
    total += best;
  }
  return total / from.length;
}

export type Direction = "f1" | "cand2src" | "src2cand";

export function alignmentScore(
  candidate: string,
  source: string,
  direction: Direction = "f1",
): number {
  const candTokens = tokenize(candidate);
  const srcTokens = tokenize(source);
  const precision = directionalScore(candTokens, srcTokens);
  if (direction === "cand2src") return precision;
  const recall = directionalScore(srcTokens, candTokens);
  if (direction === "src2cand") return recall;
  if (precision === 1 && recall === 1) return 1;
  if (precision + recall === 0) return 0;
  return (2 * precision * recall) / (precision + recall);
}
