/**
 * HTTP surface of the scoring sidecar.
 *
 *   POST /v1/score   {"metric": str, "pairs": [{"candidate", "source"}, ...]}
 *                    -> 200 {"scores": [number, ...]} in input order
 *                    -> 400 {"error": ...} unknown metric / malformed body
 *                    -> 413 {"error": ...} more than 64 pairs
 *   GET  /v1/health  -> 200 {"status": "ok", "metrics": [...], "versions": {...}}
 *
 * The reply always carries exactly one score per pair; versions are echoed
 * so clients can build stable cache keys.
 */

import { createServer, type IncomingMessage, type Server, type ServerResponse } from "node:http";

import { buildProvider, type MetricConfig, type MetricProvider, type Pair } from "./providers.js";

export const BATCH_LIMIT = 64;
const INTERNAL_CHUNK = 16;

export class ScorerService {
  private readonly providers = new Map<string, MetricProvider>();

  constructor(metrics: MetricConfig[]) {
    for (const config of metrics) {
      if (this.providers.has(config.name)) {
        throw new Error(`duplicate metric name '${config.name}'`);
      }
      this.providers.set(config.name, buildProvider(config));
    }
    if (this.providers.size === 0) {
      throw new Error("at least one metric must be configured");
    }
  }

  metricNames(): string[] {
    return [...this.providers.keys()];
  }

  versions(): Record<string, string> {
    const out: Record<string, string> = {};
    for (const [name, provider] of this.providers) out[name] = provider.version;
    return out;
  }

  async score(metric: string, pairs: Pair[]): Promise<number[]> {
    const provider = this.providers.get(metric);
    if (!provider) throw new UnknownMetricError(metric);
    const scores: number[] = [];
    for (let i = 0; i < pairs.length; i += INTERNAL_CHUNK) {
      const chunk = pairs.slice(i, i + INTERNAL_CHUNK);
      const chunkScores = await provider.scoreBatch(chunk);
      if (chunkScores.length !== chunk.length) {
        throw new Error(`provider '${metric}' returned a mismatched score count`);
      }
      scores.push(...chunkScores);
    }
    return scores;
  }
}

export class UnknownMetricError extends Error {
  constructor(metric: string) {
    super(`unknown metric '${metric}'`);
  }
}

function send(res: ServerResponse, status: number, payload: unknown): void {
  const body = JSON.stringify(payload);
  res.writeHead(status, {
    "Content-Type": "application/json",
    "Content-Length": Buffer.byteLength(body),
  });
  res.end(body);
}

function readBody(req: IncomingMessage): Promise<string> {
  return new Promise((resolve, reject) => {
    const chunks: Buffer[] = [];
    req.on("data", (chunk) => chunks.push(chunk));
    req.on("end", () => resolve(Buffer.concat(chunks).toString("utf-8")));
    req.on("error", reject);
  });
}

interface ScoreRequest {
  metric: string;
  pairs: Pair[];
}

function parseScoreRequest(raw: string): ScoreRequest {
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch {
    throw new Error("body is not valid JSON");
  }
  if (typeof parsed !== "object" || parsed === null) {
    throw new Error("body must be a JSON object");
  }
  const body = parsed as Record<string, unknown>;
  if (typeof body.metric !== "string" || body.metric.length === 0) {
    throw new Error("'metric' must be a non-empty string");
  }
  if (!Array.isArray(body.pairs) || body.pairs.length === 0) {
    throw new Error("'pairs' must be a non-empty array");
  }
  const pairs: Pair[] = body.pairs.map((entry, index) => {
    if (
      typeof entry !== "object" || entry === null ||
      typeof (entry as Record<string, unknown>).candidate !== "string" ||
      typeof (entry as Record<string, unknown>).source !== "string"
    ) {
      throw new Error(`pairs[${index}] must have string 'candidate' and 'source'`);
    }
    const pair = entry as { candidate: string; source: string };
    return { candidate: pair.candidate, source: pair.source };
  });
  return { metric: body.metric, pairs };
}

export function createScorerServer(service: ScorerService): Server {
  return createServer(async (req, res) => {
    try {
      if (req.method === "GET" && req.url === "/v1/health") {
        send(res, 200, {
          status: "ok",
          metrics: service.metricNames(),
          versions: service.versions(),
        });
        return;
      }
      if (req.method === "POST" && req.url === "/v1/score") {
        let request: ScoreRequest;
        try {
          request = parseScoreRequest(await readBody(req));
        } catch (err) {
          send(res, 400, { error: (err as Error).message });
          return;
        }
        if (request.pairs.length > BATCH_LIMIT) {
          send(res, 413, {
            error: `batch of ${request.pairs.length} exceeds the ${BATCH_LIMIT}-pair limit`,
          });
          return;
        }
        try {
          const scores = await service.score(request.metric, request.pairs);
          send(res, 200, { scores });
        } catch (err) {
          if (err instanceof UnknownMetricError) {
            send(res, 400, { error: err.message });
          } else {
            send(res, 500, { error: (err as Error).message });
          }
        }
        return;
      }
      send(res, 404, { error: `no route for ${req.method} ${req.url}` });
    } catch (err) {
      send(res, 500, { error: (err as Error).message });
    }
  });
}
