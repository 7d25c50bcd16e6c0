/**
 * Entry point: load the metric configuration and serve.
 *
 *   node dist/src/index.js [--port 8701] [--config metrics.json]
 *
 * The config file is a JSON array of metric definitions; without one the
 * service exposes the deterministic hash metrics, which need no weights.
 */

import { readFileSync } from "node:fs";

import { DEFAULT_METRICS, type MetricConfig } from "./providers.js";
import { ScorerService, createScorerServer } from "./server.js";

function parseArgs(argv: string[]): { port: number; config?: string } {
  let port = 8701;
  let config: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--port") port = Number(argv[++i]);
    else if (argv[i] === "--config") config = argv[++i];
    else throw new Error(`unknown argument '${argv[i]}'`);
  }
  if (!Number.isInteger(port) || port < 0 || port > 65535) {
    throw new Error(`invalid port '${port}'`);
  }
  return { port, config };
}

function loadMetrics(path?: string): MetricConfig[] {
  if (!path) return DEFAULT_METRICS;
  const parsed = JSON.parse(readFileSync(path, "utf-8"));
  if (!Array.isArray(parsed) || parsed.length === 0) {
    throw new Error("config must be a non-empty JSON array of metric definitions");
  }
  return parsed as MetricConfig[];
}

const { port, config } = parseArgs(process.argv.slice(2));
const service = new ScorerService(loadMetrics(config));
const server = createScorerServer(service);
server.listen(port, () => {
  const address = server.address();
  const bound = typeof address === "object" && address ? address.port : port;
  console.log(
    `scorer-service listening on :${bound} with metrics [${service.metricNames().join(", ")}]`,
  );
});
