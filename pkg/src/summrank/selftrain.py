"""Pseudo-label export for self-training.

The selected candidate of each training document becomes a fine-tuning
target.  Records carry an extractiveness score (1 minus the mean novel
n-gram fraction over orders 1..3, so verbatim copies score 1.0) and a
paraphrase flag marking the ceil(x * N) most extractive records, which an
external paraphraser is expected to rewrite before training.
"""

import json
from dataclasses import dataclass
from math import ceil
from pathlib import Path

from .corpus import Document
from .errors import ParameterError
from .evaluate import novel_ngram_fraction
from .rerank import Selection
from .text import DEFAULT_TOKENIZER, TokenizerConfig, tokenize

EXTRACTIVENESS_ORDERS = (1, 2, 3)


@dataclass
class PseudoLabelRecord:
    doc_id: str
    target: str
    extractiveness: float
    paraphrase: bool


@dataclass
class ExportStats:
    count: int
    flagged: int
    mean_extractiveness: float


def extractiveness(
    candidate: str, source: str, config: TokenizerConfig = DEFAULT_TOKENIZER
) -> float:
    """1 - mean novel n-gram fraction over n = 1..3; empty candidate -> 0."""
    if not tokenize(candidate, config).tokens:
        return 0.0
    novel = [
        novel_ngram_fraction(candidate, source, n, config)
        for n in EXTRACTIVENESS_ORDERS
    ]
    return 1.0 - sum(novel) / len(novel)


def build_labels(
    documents: list[Document],
    selection: Selection,
    x: float,
    config: TokenizerConfig = DEFAULT_TOKENIZER,
) -> tuple[list[PseudoLabelRecord], ExportStats]:
    """Label records sorted by document id, flags per the ceil(x*N) rule.

    Ties in extractiveness are broken by document id so the flagged set is
    deterministic.
    """
    if not 0.0 < x <= 1.0:
        raise ParameterError(f"paraphrase fraction must be in (0, 1], got {x}")
    missing = [d.id for d in documents if d.id not in selection.chosen]
    if missing:
        raise ParameterError(f"selection does not cover documents: {missing[:3]}")

    records = []
    for doc in documents:
        target = doc.candidates[selection.chosen[doc.id]]
        records.append(
            PseudoLabelRecord(
                doc_id=doc.id,
                target=target,
                extractiveness=extractiveness(target, doc.source, config),
                paraphrase=False,
            )
        )

    flag_count = min(len(records), ceil(x * len(records)))
    ranked = sorted(records, key=lambda r: (-r.extractiveness, r.doc_id))
    for record in ranked[:flag_count]:
        record.paraphrase = True

    records.sort(key=lambda r: r.doc_id)
    mean_ext = sum(r.extractiveness for r in records) / len(records) if records else 0.0
    return records, ExportStats(
        count=len(records), flagged=flag_count, mean_extractiveness=mean_ext
    )


def write_labels(
    records: list[PseudoLabelRecord], path: str | Path, header: str | None = None
) -> None:
    """JSONL contract consumed by downstream trainers:
    {"id", "target", "extractiveness", "paraphrase"}."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        for record in records:
            fh.write(
                json.dumps(
                    {
                        "id": record.doc_id,
                        "target": record.target,
                        "extractiveness": record.extractiveness,
                        "paraphrase": record.paraphrase,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
