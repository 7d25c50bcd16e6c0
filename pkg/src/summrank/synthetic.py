"""Synthetic corpus generation with planted, verifiable structure.

Documents are newline-delimited sentences of random vocabulary tokens.
Three plants are supported:

    bleu-oracle  exactly one candidate per document is a verbatim copy of
                 leading source sentences, so it strictly dominates every
                 distractor on high-order n-gram overlap with the source
                 and sits nearest any sentence-built pseudo-target;
    lead-bias    every candidate is a contiguous three-sentence window of
                 the source; the planted one is the window at the top;
    uniform      all candidates are random token strings, none privileged.

After generation each document is checked with the real metric
implementations (a distractor that accidentally beats the plant forces a
re-draw), and the ground truth goes to a sidecar file.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Document
from .errors import ParameterError
from .metrics import bleu, mean_rouge
from .text import split_sentences, tokenize

PLANTS = ("bleu-oracle", "lead-bias", "uniform")

DEFAULT_VOCAB_SIZE = 40
SENTENCE_TOKENS = (4, 10)
DOC_SENTENCES = (5, 12)


@dataclass
class PlantedCorpus:
    documents: list[Document]
    planted: dict[str, int | None]


def _sentence(rng: np.random.Generator, vocab: list[str]) -> str:
    length = int(rng.integers(SENTENCE_TOKENS[0], SENTENCE_TOKENS[1] + 1))
    return " ".join(vocab[int(i)] for i in rng.integers(0, len(vocab), length))


def _random_candidate(rng: np.random.Generator, vocab: list[str]) -> str:
    n_sents = int(rng.integers(1, 4))
    return "\n".join(_sentence(rng, vocab) for _ in range(n_sents))


def _bleu_against_source(candidate: str, source: str) -> float:
    return bleu(tokenize(candidate), tokenize(source))


def _build_document(
    rng: np.random.Generator, doc_id: str, k: int, vocab: list[str], plant: str
) -> tuple[Document, int | None]:
    sentences = [
        _sentence(rng, vocab)
        for _ in range(int(rng.integers(DOC_SENTENCES[0], DOC_SENTENCES[1] + 1)))
    ]
    source = "\n".join(sentences)
    reference = "\n".join(sentences[:3])

    if plant == "uniform":
        candidates = [_random_candidate(rng, vocab) for _ in range(k)]
        planted_index = None
    elif plant == "lead-bias":
        max_offset = len(sentences) - 3
        offsets = [0] + [int(o) for o in rng.integers(1, max_offset + 1, k - 1)]
        candidates = ["\n".join(sentences[o : o + 3]) for o in offsets]
        planted_index = int(rng.integers(0, k))
        candidates[0], candidates[planted_index] = candidates[planted_index], candidates[0]
    else:  # bleu-oracle
        planted_index = int(rng.integers(0, k))
        candidates = [_random_candidate(rng, vocab) for _ in range(k)]
        candidates[planted_index] = "\n".join(sentences[:3])

    doc = Document(id=doc_id, source=source, candidates=candidates, reference=reference)
    return doc, planted_index


def _plant_holds(doc: Document, planted_index: int | None, plant: str) -> bool:
    if plant == "uniform":
        return True
    lead = "\n".join(split_sentences(doc.source).sentences[:3])
    if plant == "bleu-oracle":
        scores = [_bleu_against_source(c, doc.source) for c in doc.candidates]
        best = max(range(len(scores)), key=lambda i: scores[i])
        if best != planted_index:
            return False
        if sum(1 for s in scores if s == scores[best]) > 1:
            return False
        # the copy must also sit nearest the lead-sentence pseudo-target
        closeness = [mean_rouge(c, lead) for c in doc.candidates]
        return max(range(len(closeness)), key=lambda i: closeness[i]) == planted_index
    # lead-bias: the planted window is the pseudo-target itself
    closeness = [mean_rouge(c, lead) for c in doc.candidates]
    best = max(range(len(closeness)), key=lambda i: closeness[i])
    return best == planted_index


def generate(
    seed: int,
    n_docs: int,
    k: int,
    vocab_size: int = DEFAULT_VOCAB_SIZE,
    plant: str = "bleu-oracle",
) -> PlantedCorpus:
    """Deterministic corpus with the plant verified post-generation."""
    if n_docs < 1:
        raise ParameterError("n_docs must be >= 1")
    if k < 2:
        raise ParameterError("k must be >= 2")
    if plant not in PLANTS:
        raise ParameterError(f"unknown plant '{plant}'; expected one of {PLANTS}")

    vocab = [f"w{i:02d}" for i in range(vocab_size)]
    documents: list[Document] = []
    planted: dict[str, int | None] = {}
    for index in range(n_docs):
        doc_id = f"doc-{index:04d}"
        rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
        for _ in range(50):
            doc, planted_index = _build_document(rng, doc_id, k, vocab, plant)
            if _plant_holds(doc, planted_index, plant):
                break
        else:
            raise ParameterError(
                f"could not realize plant '{plant}' for {doc_id}; "
                "vocabulary may be too small"
            )
        documents.append(doc)
        planted[doc_id] = planted_index
    return PlantedCorpus(documents=documents, planted=planted)


def save_plant_sidecar(corpus: PlantedCorpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            fh.write(
                json.dumps({"id": doc.id, "planted_index": corpus.planted[doc.id]})
                + "\n"
            )


def load_plant_sidecar(path: str | Path) -> dict[str, int | None]:
    planted: dict[str, int | None] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                record = json.loads(line)
                planted[record["id"]] = record["planted_index"]
    return planted
