"""Pseudo-summary construction from the source document alone.

Coefficient estimation needs a proxy target per document.  Five methods are
supported: the first three sentences, three random sentences, and the three
salience variants that keep the sentences scoring highest against the rest
of the document (unigram, bigram, or LCS overlap).  All methods return
source sentences in document order, so no human supervision enters.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import EmptyDocumentError, ParameterError
from .metrics import rouge_l, rouge_n
from .text import DEFAULT_TOKENIZER, SentenceList, TokenizerConfig, tokenize

PSEUDO_METHODS = ("random3", "lead3", "salient-r1", "salient-r2", "salient-rl")
DEFAULT_SALIENT_RATIO = 0.30
LEAD_SENTENCES = 3


@dataclass(frozen=True)
class PseudoTarget:
    """A proxy reference summary built from source sentences."""

    method: str
    text: str
    sentence_indices: tuple[int, ...]


def _make_target(method: str, doc: SentenceList, indices: list[int]) -> PseudoTarget:
    ordered = tuple(sorted(indices))
    text = " ".join(doc.sentences[i] for i in ordered)
    return PseudoTarget(method=method, text=text, sentence_indices=ordered)


def _require_sentences(doc: SentenceList) -> None:
    if len(doc) == 0:
        raise EmptyDocumentError("document has no sentences")


def lead3(doc: SentenceList) -> PseudoTarget:
    """First min(3, n) sentences of the document."""
    _require_sentences(doc)
    count = min(LEAD_SENTENCES, len(doc))
    return _make_target("lead3", doc, list(range(count)))


def random3(doc: SentenceList, seed: int) -> PseudoTarget:
    """min(3, n) sentences sampled without replacement, document order kept."""
    _require_sentences(doc)
    count = min(LEAD_SENTENCES, len(doc))
    rng = np.random.default_rng(seed)
    indices = rng.choice(len(doc), size=count, replace=False)
    return _make_target("random3", doc, [int(i) for i in indices])


def document_seed(run_seed: int, doc_id: str) -> int:
    """Stable per-document seed, independent of corpus order."""
    digest = hashlib.sha256(f"{run_seed}:{doc_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def salient(
    doc: SentenceList,
    variant: str,
    ratio: float = DEFAULT_SALIENT_RATIO,
    config: TokenizerConfig = DEFAULT_TOKENIZER,
) -> PseudoTarget:
    """Sentences scoring highest against the rest of the document.

    Each sentence is scored independently by the chosen overlap F1 against
    the concatenation of all other sentences; the top max(1, ceil(ratio*n))
    sentences are kept, ties going to the earlier position.
    """
    _require_sentences(doc)
    if not 0.0 < ratio <= 1.0:
        raise ParameterError(f"salient ratio must be in (0, 1], got {ratio}")
    if variant not in ("r1", "r2", "rl"):
        raise ParameterError(f"unknown salience variant '{variant}'")

    n = len(doc)
    count = min(n, max(1, int(np.ceil(ratio * n))))

    scores = []
    for i in range(n):
        rest = " ".join(s for j, s in enumerate(doc.sentences) if j != i)
        sent_tokens = tokenize(doc.sentences[i], config)
        rest_tokens = tokenize(rest, config)
        if variant == "r1":
            score = rouge_n(sent_tokens, rest_tokens, 1).f1
        elif variant == "r2":
            score = rouge_n(sent_tokens, rest_tokens, 2).f1
        else:
            score = rouge_l(sent_tokens, rest_tokens).f1
        scores.append(score)

    ranked = sorted(range(n), key=lambda i: (-scores[i], i))
    return _make_target(f"salient-{variant}", doc, ranked[:count])


def build_pseudo_target(
    method: str,
    doc: SentenceList,
    doc_id: str = "",
    seed: int = 0,
    ratio: float = DEFAULT_SALIENT_RATIO,
    config: TokenizerConfig = DEFAULT_TOKENIZER,
) -> PseudoTarget:
    """Dispatch on the method name used by configuration files."""
    if method == "lead3":
        return lead3(doc)
    if method == "random3":
        return random3(doc, document_seed(seed, doc_id))
    if method.startswith("salient-"):
        return salient(doc, method.removeprefix("salient-"), ratio, config)
    raise ParameterError(
        f"unknown pseudo-target method '{method}'; expected one of {PSEUDO_METHODS}"
    )
