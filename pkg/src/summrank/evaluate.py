"""Reference-side evaluation and diagnostics.

Everything here may read the reference summaries, which the estimation path
never sees.  Provided are the trivial selection strategies (first, random,
minimum, oracle, longest, max of a single feature), corpus ROUGE means with
relative gain, recall@k over oracle candidates, overlap-with-trivial
diagnostics, and novel n-gram (abstractiveness) reporting.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Document
from .errors import ParameterError
from .features import FeatureMatrix
from .metrics import rouge_lsum, rouge_n
from .pseudo import document_seed
from .rerank import Selection
from .text import DEFAULT_TOKENIZER, TokenizerConfig, split_sentences, tokenize

BASE_STRATEGIES = ("first", "random", "minimum", "oracle", "longest")
DEFAULT_RECALL_THRESHOLDS = (1, 2, 3, 4, 5, 7, 10)


@dataclass
class RougeSummary:
    """Corpus means of the three ROUGE F1 scores."""

    r1: float
    r2: float
    rl: float

    @property
    def mean(self) -> float:
        return (self.r1 + self.r2 + self.rl) / 3.0


@dataclass
class StrategyResult:
    strategy: str
    chosen: dict[str, int]
    rouge: RougeSummary
    gain_pct: float | None = None


@dataclass
class RecallCurve:
    thresholds: list[int]
    recalls: list[float]


def _per_doc_rouge(candidate: str, reference: str, config: TokenizerConfig):
    cand_tokens = tokenize(candidate, config)
    ref_tokens = tokenize(reference, config)
    r1 = rouge_n(cand_tokens, ref_tokens, 1).f1
    r2 = rouge_n(cand_tokens, ref_tokens, 2).f1
    rl = rouge_lsum(
        split_sentences(candidate, config.abbreviations),
        split_sentences(reference, config.abbreviations),
        config,
    ).f1
    return r1, r2, rl


def _require_references(documents: list[Document], strategy: str) -> None:
    missing = [d.id for d in documents if d.reference is None]
    if missing:
        raise ParameterError(
            f"strategy '{strategy}' needs references; missing for {missing[:3]}"
        )


class ReferenceScores:
    """Cache of per-candidate mean ROUGE against the reference."""

    def __init__(self, documents: list[Document], config: TokenizerConfig = DEFAULT_TOKENIZER):
        self.config = config
        self._table: dict[str, np.ndarray] = {}
        self._documents = {d.id: d for d in documents}

    def candidate_means(self, doc: Document) -> np.ndarray:
        if doc.id not in self._table:
            values = []
            for candidate in doc.candidates:
                r1, r2, rl = _per_doc_rouge(candidate, doc.reference, self.config)
                values.append((r1 + r2 + rl) / 3.0)
            self._table[doc.id] = np.array(values)
        return self._table[doc.id]

    def oracle_set(self, doc: Document) -> set[int]:
        """All tied maximizers count as oracle candidates."""
        means = self.candidate_means(doc)
        best = means.max()
        return {i for i, v in enumerate(means) if v == best}


def baseline_select(
    strategy: str,
    documents: list[Document],
    scores: ReferenceScores | None = None,
    seed: int = 0,
    feature_matrix: FeatureMatrix | None = None,
    config: TokenizerConfig = DEFAULT_TOKENIZER,
) -> Selection:
    """Choose a candidate per document under one trivial strategy.

    ``max-feature:<id>`` picks the candidate maximizing one raw feature
    column; oracle and minimum need references; ties go to the lowest index.
    """
    chosen: dict[str, int] = {}
    if strategy.startswith("max-feature:"):
        if feature_matrix is None:
            raise ParameterError(f"strategy '{strategy}' needs a feature matrix")
        column = feature_matrix.spec.column(strategy.split(":", 1)[1])
        for doc in documents:
            chosen[doc.id] = int(np.argmax(feature_matrix.raw[doc.id][:, column]))
        return Selection(strategy=strategy, chosen=chosen)

    if strategy in ("oracle", "minimum"):
        _require_references(documents, strategy)
        if scores is None:
            scores = ReferenceScores(documents, config)

    for doc in documents:
        if strategy == "first":
            chosen[doc.id] = 0
        elif strategy == "random":
            rng = np.random.default_rng(document_seed(seed, doc.id))
            chosen[doc.id] = int(rng.integers(0, doc.k))
        elif strategy == "oracle":
            chosen[doc.id] = int(np.argmax(scores.candidate_means(doc)))
        elif strategy == "minimum":
            chosen[doc.id] = int(np.argmin(scores.candidate_means(doc)))
        elif strategy == "longest":
            lengths = [len(tokenize(c, config)) for c in doc.candidates]
            chosen[doc.id] = int(np.argmax(lengths))
        else:
            raise ParameterError(f"unknown strategy '{strategy}'")
    return Selection(strategy=strategy, chosen=chosen)


def score_selection(
    selection: Selection,
    documents: list[Document],
    config: TokenizerConfig = DEFAULT_TOKENIZER,
) -> RougeSummary:
    """Corpus mean R-1 / R-2 / R-L of the selected candidates."""
    _require_references(documents, "evaluation")
    totals = np.zeros(3)
    for doc in documents:
        candidate = doc.candidates[selection.chosen[doc.id]]
        totals += _per_doc_rouge(candidate, doc.reference, config)
    totals /= len(documents)
    return RougeSummary(r1=float(totals[0]), r2=float(totals[1]), rl=float(totals[2]))


def gain(selected_mean_rouge: float, baseline_mean_rouge: float) -> float:
    """Relative improvement in percent over a baseline mean ROUGE."""
    if baseline_mean_rouge <= 0:
        raise ParameterError("gain is undefined for a non-positive baseline")
    return 100.0 * (selected_mean_rouge - baseline_mean_rouge) / baseline_mean_rouge


def evaluate_strategies(
    documents: list[Document],
    strategies: list[str],
    summscore_selection: Selection | None = None,
    feature_matrix: FeatureMatrix | None = None,
    seed: int = 0,
    baseline: str = "first",
    config: TokenizerConfig = DEFAULT_TOKENIZER,
) -> list[StrategyResult]:
    scores = ReferenceScores(documents, config)
    results: list[StrategyResult] = []
    for strategy in strategies:
        if strategy == "summscore":
            if summscore_selection is None:
                raise ParameterError("no reranked selection supplied for 'summscore'")
            selection = summscore_selection
        else:
            selection = baseline_select(
                strategy, documents, scores=scores, seed=seed,
                feature_matrix=feature_matrix, config=config,
            )
        rouge = score_selection(selection, documents, config)
        results.append(StrategyResult(strategy=strategy, chosen=selection.chosen, rouge=rouge))

    by_name = {r.strategy: r for r in results}
    base = by_name.get(baseline)
    for result in results:
        if base is not None and base.rouge.mean > 0:
            result.gain_pct = gain(result.rouge.mean, base.rouge.mean)
    return results


def recall_at_k(
    rankings: dict[str, list[int]],
    oracle_sets: dict[str, set[int]],
    k: int,
) -> float:
    """Fraction of documents whose top-k ranked candidates hit an oracle."""
    if k < 1:
        raise ParameterError("recall threshold k must be >= 1")
    if not rankings:
        raise ParameterError("recall needs at least one document")
    hits = 0
    for doc_id, ranking in rankings.items():
        oracle = oracle_sets[doc_id]
        if not oracle:
            raise ParameterError(f"doc {doc_id}: empty oracle set")
        if set(ranking[:k]) & oracle:
            hits += 1
    return hits / len(rankings)


def score_rankings(selection: Selection) -> dict[str, list[int]]:
    """Candidate order by decreasing score, ties by original index."""
    rankings = {}
    for doc_id, values in selection.scores.items():
        order = sorted(range(len(values)), key=lambda i: (-values[i], i))
        rankings[doc_id] = order
    return rankings


def recall_curve(
    rankings: dict[str, list[int]],
    oracle_sets: dict[str, set[int]],
    thresholds: tuple[int, ...] = DEFAULT_RECALL_THRESHOLDS,
) -> RecallCurve:
    pool = max(len(r) for r in rankings.values())
    ks = sorted({min(k, pool) for k in thresholds} | {pool})
    return RecallCurve(
        thresholds=ks, recalls=[recall_at_k(rankings, oracle_sets, k) for k in ks]
    )


def overlap_diagnostics(
    summscore: Selection, trivial: list[Selection]
) -> dict[str, float]:
    """Percent of documents where a trivial strategy picks the same index."""
    out: dict[str, float] = {}
    ids = list(summscore.chosen)
    for selection in trivial:
        same = sum(1 for d in ids if selection.chosen.get(d) == summscore.chosen[d])
        out[selection.strategy] = 100.0 * same / len(ids)
    return out


def novel_ngram_fraction(candidate: str, source: str, n: int,
                         config: TokenizerConfig = DEFAULT_TOKENIZER) -> float:
    """Fraction of candidate n-gram occurrences absent from the source;
    0.0 when the candidate has no n-grams of that order."""
    cand_tokens = tokenize(candidate, config).tokens
    if len(cand_tokens) < n:
        return 0.0
    src_grams = set()
    src_tokens = tokenize(source, config).tokens
    for i in range(len(src_tokens) - n + 1):
        src_grams.add(src_tokens[i : i + n])
    total = len(cand_tokens) - n + 1
    novel = sum(
        1 for i in range(total) if cand_tokens[i : i + n] not in src_grams
    )
    return novel / total


def abstractiveness(
    selection: Selection,
    documents: list[Document],
    config: TokenizerConfig = DEFAULT_TOKENIZER,
) -> dict[int, float]:
    """Corpus mean fraction of novel n-grams (n = 1, 2, 3) in the selection."""
    out = {}
    for n in (1, 2, 3):
        values = [
            novel_ngram_fraction(
                doc.candidates[selection.chosen[doc.id]], doc.source, n, config
            )
            for doc in documents
        ]
        out[n] = float(np.mean(values))
    return out


# ---------------------------------------------------------------------------
# report files


def write_report_csv(results: list[StrategyResult], path: str | Path,
                     header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if header:
            fh.write(header)
        writer = csv.writer(fh)
        writer.writerow(["strategy", "r1", "r2", "rl", "mean", "gain_pct"])
        for r in results:
            writer.writerow([
                r.strategy,
                f"{100 * r.rouge.r1:.4f}",
                f"{100 * r.rouge.r2:.4f}",
                f"{100 * r.rouge.rl:.4f}",
                f"{100 * r.rouge.mean:.4f}",
                "" if r.gain_pct is None else f"{r.gain_pct:+.2f}",
            ])


def write_report_table(results: list[StrategyResult], path: str | Path,
                       header: str | None = None) -> None:
    """Human-readable table: strategy rows, R-1/R-2/R-L/gain columns."""
    rows = [["Candidate selection", "R-1", "R-2", "R-L", "Mean R", "Gain (%)"]]
    for r in results:
        rows.append([
            r.strategy,
            f"{100 * r.rouge.r1:.2f}",
            f"{100 * r.rouge.r2:.2f}",
            f"{100 * r.rouge.rl:.2f}",
            f"{100 * r.rouge.mean:.2f}",
            "-" if r.gain_pct is None else f"{r.gain_pct:+.2f}",
        ])
    widths = [max(len(row[c]) for row in rows) for c in range(len(rows[0]))]
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        for i, row in enumerate(rows):
            line = "  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row))
            fh.write(line.rstrip() + "\n")
            if i == 0:
                fh.write("-" * (sum(widths) + 2 * (len(widths) - 1)) + "\n")


def write_recall_csv(curve: RecallCurve, path: str | Path, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if header:
            fh.write(header)
        writer = csv.writer(fh)
        writer.writerow(["k", "recall"])
        for k, recall in zip(curve.thresholds, curve.recalls):
            writer.writerow([k, f"{recall:.6f}"])


def write_overlap_csv(overlaps: dict[str, float], path: str | Path,
                      header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if header:
            fh.write(header)
        writer = csv.writer(fh)
        writer.writerow(["strategy", "percent"])
        for strategy, percent in overlaps.items():
            writer.writerow([strategy, f"{percent:.2f}"])


def write_abstractiveness_csv(fractions: dict[int, float], path: str | Path,
                              header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if header:
            fh.write(header)
        writer = csv.writer(fh)
        writer.writerow(["n", "fraction"])
        for n in sorted(fractions):
            writer.writerow([n, f"{fractions[n]:.6f}"])
