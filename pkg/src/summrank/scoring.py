"""Semantic-similarity scoring behind one uniform interface.

Three kinds of scorer sit behind ``score_batch``: the deterministic builtin
lexical scorer (idf-weighted bag-of-words cosine, always available), remote
scorers spoken to over a small JSON protocol, and anything a caller wires in
as a callable.  Scores for (candidate, source) pairs are cached on disk in
an append-only record log keyed by content digest, one directory per scorer,
so repeated runs are bit-identical and free.

Wire protocol (shared with the sidecar scorer service):
    POST /v1/score   {"metric": str, "pairs": [{"candidate": str, "source": str}, ...]}
                     -> {"scores": [float, ...]}, len(scores) == len(pairs)
    GET  /v1/health  -> {"status": "ok", "metrics": [str, ...]}
Batches are capped at 64 pairs per request.
"""

import hashlib
import json
import logging
import math
import os
import threading
import time
import urllib.error
import urllib.request
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParameterError, ProtocolError, TransportError
from .text import DEFAULT_TOKENIZER, TokenizerConfig, tokenize

logger = logging.getLogger(__name__)

BUILTIN_LEXICAL = "builtin-lexical"
KNOWN_SCORERS = (BUILTIN_LEXICAL, "bertscore", "bartscore", "bleurt", "custom")

WIRE_BATCH_LIMIT = 64
RETRY_ATTEMPTS = 3
RETRY_BASE_DELAY = 0.25

CACHE_ENV_VAR = "SUMMRANK_CACHE_DIR"


@dataclass(frozen=True)
class ScorerId:
    """Identity of a scorer; (name, version) pins the score semantics."""

    name: str
    version: str = "1"

    def cache_dir_name(self) -> str:
        return f"{self.name}-{self.version}"


@dataclass(frozen=True)
class IdfTable:
    """Smoothed inverse document frequencies: log((1+D)/(1+df)) + 1."""

    weights: dict = field(default_factory=dict)
    default: float = 1.0

    def weight(self, token: str) -> float:
        return self.weights.get(token, self.default)

    @classmethod
    def from_documents(
        cls, documents: list[str], config: TokenizerConfig = DEFAULT_TOKENIZER
    ) -> "IdfTable":
        doc_count = len(documents)
        df: Counter = Counter()
        for doc in documents:
            df.update(set(tokenize(doc, config).tokens))
        weights = {
            token: math.log((1 + doc_count) / (1 + count)) + 1.0
            for token, count in df.items()
        }
        default = math.log((1 + doc_count) / 1.0) + 1.0
        return cls(weights=weights, default=default)


def builtin_lexical_score(
    candidate: str,
    source: str,
    idf: IdfTable,
    config: TokenizerConfig = DEFAULT_TOKENIZER,
) -> float:
    """Cosine similarity of idf-weighted token-count vectors, in [0, 1]."""
    cand_counts = Counter(tokenize(candidate, config).tokens)
    src_counts = Counter(tokenize(source, config).tokens)
    if not cand_counts or not src_counts:
        return 0.0
    dot = 0.0
    for token, count in cand_counts.items():
        if token in src_counts:
            w = idf.weight(token)
            dot += (count * w) * (src_counts[token] * w)
    if dot == 0.0:
        return 0.0
    cand_norm = math.sqrt(sum((c * idf.weight(t)) ** 2 for t, c in cand_counts.items()))
    src_norm = math.sqrt(sum((c * idf.weight(t)) ** 2 for t, c in src_counts.items()))
    return dot / (cand_norm * src_norm)


def pair_digest(scorer: ScorerId, candidate: str, source: str) -> str:
    """Content digest keying one (scorer, candidate, source) score."""
    h = hashlib.sha256()
    for part in (scorer.name, scorer.version, candidate, source):
        raw = part.encode("utf-8")
        h.update(len(raw).to_bytes(8, "little"))
        h.update(raw)
    return h.hexdigest()


def default_cache_dir() -> Path:
    override = os.environ.get(CACHE_ENV_VAR)
    if override:
        return Path(override)
    return Path.home() / ".cache" / "summrank"


class ScoreCache:
    """Append-only score log, one directory per scorer.

    Records are single JSON lines {"key": digest, "value": float}; corrupt
    lines are skipped with a warning and never fatal.  Writes go through a
    lock so concurrent scorers cannot interleave partial lines.
    """

    def __init__(self, root: Path | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()
        self._tables: dict[str, dict[str, float]] = {}
        self._lock = threading.Lock()

    def _log_path(self, scorer: ScorerId) -> Path:
        return self.root / scorer.cache_dir_name() / "records.jsonl"

    def _table(self, scorer: ScorerId) -> dict[str, float]:
        name = scorer.cache_dir_name()
        if name not in self._tables:
            table: dict[str, float] = {}
            path = self._log_path(scorer)
            if path.exists():
                with open(path, encoding="utf-8") as fh:
                    for line_no, line in enumerate(fh, 1):
                        line = line.strip()
                        if not line:
                            continue
                        try:
                            record = json.loads(line)
                            table[record["key"]] = float(record["value"])
                        except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                            logger.warning(
                                "skipping corrupt cache record %s:%d", path, line_no
                            )
            self._tables[name] = table
        return self._tables[name]

    def lookup(self, scorer: ScorerId, key: str) -> float | None:
        return self._table(scorer).get(key)

    def store(self, scorer: ScorerId, key: str, value: float) -> None:
        with self._lock:
            table = self._table(scorer)
            if table.get(key) == value:
                return
            path = self._log_path(scorer)
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps({"key": key, "value": value}) + "\n")
            table[key] = value


class RemoteScorer:
    """Client for the JSON scoring protocol.

    Transport failures are retried with exponential backoff (3 attempts,
    250 ms base); a reply that arrives but violates the contract is a
    protocol error and is not retried.
    """

    def __init__(self, endpoint: str, timeout: float = 30.0, max_in_flight: int = 4):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.max_in_flight = max(1, max_in_flight)

    def _post_chunk(self, metric: str, pairs: list[tuple[str, str]]) -> list[float]:
        body = json.dumps(
            {
                "metric": metric,
                "pairs": [{"candidate": c, "source": s} for c, s in pairs],
            }
        ).encode("utf-8")
        request = urllib.request.Request(
            self.endpoint + "/v1/score",
            data=body,
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        delay = RETRY_BASE_DELAY
        last_error: Exception | None = None
        for attempt in range(1, RETRY_ATTEMPTS + 1):
            try:
                with urllib.request.urlopen(request, timeout=self.timeout) as reply:
                    if reply.status != 200:
                        raise ProtocolError(
                            f"scorer replied with status {reply.status}"
                        )
                    payload = json.loads(reply.read().decode("utf-8"))
                break
            except urllib.error.HTTPError as err:
                raise ProtocolError(f"scorer replied with status {err.code}") from err
            except (urllib.error.URLError, OSError, TimeoutError) as err:
                last_error = err
                if attempt < RETRY_ATTEMPTS:
                    time.sleep(delay)
                    delay *= 2
        else:
            raise TransportError(
                f"scorer unreachable at {self.endpoint} after "
                f"{RETRY_ATTEMPTS} attempts: {last_error}",
                attempts=RETRY_ATTEMPTS,
            )
        try:
            scores = [float(v) for v in payload["scores"]]
        except (KeyError, TypeError, ValueError) as err:
            raise ProtocolError(f"malformed scorer reply: {err}") from err
        if len(scores) != len(pairs):
            raise ProtocolError(
                f"scorer returned {len(scores)} scores for {len(pairs)} pairs"
            )
        return scores

    def score(self, metric: str, pairs: list[tuple[str, str]]) -> list[float]:
        chunks = [
            pairs[i : i + WIRE_BATCH_LIMIT]
            for i in range(0, len(pairs), WIRE_BATCH_LIMIT)
        ]
        if len(chunks) <= 1 or self.max_in_flight == 1:
            results = [self._post_chunk(metric, chunk) for chunk in chunks]
        else:
            with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
                results = list(pool.map(lambda ch: self._post_chunk(metric, ch), chunks))
        return [score for chunk_scores in results for score in chunk_scores]

    def health(self) -> dict:
        request = urllib.request.Request(self.endpoint + "/v1/health")
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as reply:
                return json.loads(reply.read().decode("utf-8"))
        except (urllib.error.URLError, OSError) as err:
            raise TransportError(f"scorer health check failed: {err}") from err


class ScorerRegistry:
    """Resolves scorer ids to scoring callables, with the cache in front."""

    def __init__(
        self,
        idf: IdfTable | None = None,
        endpoints: dict[str, str] | None = None,
        cache: ScoreCache | None = None,
        config: TokenizerConfig = DEFAULT_TOKENIZER,
        max_in_flight: int = 4,
    ):
        self.idf = idf or IdfTable()
        self.endpoints = dict(endpoints or {})
        self.cache = cache
        self.config = config
        self.max_in_flight = max_in_flight

    def _backend(self, scorer: ScorerId):
        if scorer.name == BUILTIN_LEXICAL:
            return lambda pairs: [
                builtin_lexical_score(c, s, self.idf, self.config) for c, s in pairs
            ]
        endpoint = self.endpoints.get(scorer.name)
        if endpoint is None:
            raise ParameterError(
                f"no endpoint configured for remote scorer '{scorer.name}'"
            )
        remote = RemoteScorer(endpoint, max_in_flight=self.max_in_flight)
        return lambda pairs: remote.score(scorer.name, pairs)

    def score_batch(
        self, scorer: ScorerId, pairs: list[tuple[str, str]]
    ) -> list[float]:
        """Scores in input order; cache consulted first, populated on miss."""
        if not pairs:
            raise ParameterError("score_batch requires a non-empty pair list")
        keys = [pair_digest(scorer, c, s) for c, s in pairs]
        scores: list[float | None] = [None] * len(pairs)
        misses: list[int] = []
        if self.cache is not None:
            for i, key in enumerate(keys):
                cached = self.cache.lookup(scorer, key)
                if cached is None:
                    misses.append(i)
                else:
                    scores[i] = cached
        else:
            misses = list(range(len(pairs)))
        if misses:
            fresh = self._backend(scorer)([pairs[i] for i in misses])
            for i, value in zip(misses, fresh):
                scores[i] = value
                if self.cache is not None:
                    self.cache.store(scorer, keys[i], value)
        return [float(v) for v in scores]
