/**
 * Metric providers behind the scoring endpoint.
 *
 * `hash` is the deterministic builtin (no model weights, always loadable).
 * `transformers` lazily imports @xenova/transformers and serves embedding
 * cosine similarity from a local model; it only activates when configured,
 * so the service runs fully offline by default. Providers score batches
 * internally and must preserve input order.
 */

import { alignmentScore, type Direction } from "./embedding.js";

export interface Pair {
  candidate: string;
  source: string;
}

export interface MetricProvider {
  readonly name: string;
  readonly version: string;
  scoreBatch(pairs: Pair[]): Promise<number[]>;
}

export interface MetricConfig {
  name: string;
  provider: "hash" | "transformers";
  version?: string;
  /** hash provider: which alignment direction to report */
  direction?: Direction;
  /** transformers provider: model id resolvable by @xenova/transformers */
  model?: string;
}

export class HashProvider implements MetricProvider {
  readonly name: string;
  readonly version: string;
  private readonly direction: Direction;

  constructor(config: MetricConfig) {
    this.name = config.name;
    this.version = config.version ?? "1";
    this.direction = config.direction ?? "f1";
  }

  async scoreBatch(pairs: Pair[]): Promise<number[]> {
    return pairs.map((p) => alignmentScore(p.candidate, p.source, this.direction));
  }
}

type FeaturePipeline = (
  text: string,
  options: { pooling: "mean"; normalize: boolean },
) => Promise<{ data: Float32Array }>;

export class TransformersProvider implements MetricProvider {
  readonly name: string;
  readonly version: string;
  private readonly model: string;
  private pipe: FeaturePipeline | null = null;

  constructor(config: MetricConfig) {
    if (!config.model) {
      throw new Error(`metric '${config.name}': transformers provider needs a model`);
    }
    this.name = config.name;
    this.model = config.model;
    this.version = config.version ?? config.model;
  }

  async load(): Promise<void> {
    // dynamic import so the dependency stays optional
    const moduleName = "@xenova/transformers";
    const transformers = await import(moduleName);
    this.pipe = (await transformers.pipeline(
      "feature-extraction",
      this.model,
    )) as FeaturePipeline;
  }

  private async embed(text: string): Promise<Float32Array> {
    if (!this.pipe) await this.load();
    const output = await this.pipe!(text, { pooling: "mean", normalize: true });
    return output.data;
  }

  async scoreBatch(pairs: Pair[]): Promise<number[]> {
    const scores: number[] = [];
    for (const pair of pairs) {
      const a = await this.embed(pair.candidate);
      const b = await this.embed(pair.source);
      let dot = 0;
      for (let i = 0; i < a.length; i++) dot += a[i] * b[i];
      scores.push(dot);
    }
    return scores;
  }
}

export function buildProvider(config: MetricConfig): MetricProvider {
  if (config.provider === "hash") return new HashProvider(config);
  if (config.provider === "transformers") return new TransformersProvider(config);
  throw new Error(`unknown provider '${(config as MetricConfig).provider}'`);
}

/** Offline default: one symmetric metric plus the two directional views. */
export const DEFAULT_METRICS: MetricConfig[] = [
  { name: "hash-sim", provider: "hash", version: "1", direction: "f1" },
  { name: "hash-sim-cand2src", provider: "hash", version: "1", direction: "cand2src" },
  { name: "hash-sim-src2cand", provider: "hash", version: "1", direction: "src2cand" },
];
