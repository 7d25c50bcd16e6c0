"""Closed-form lexical metrics: ROUGE variants, BLEU, diversity, length.

All scores are fractions in [0, 1].  ROUGE values are F1 unless a caller
picks precision/recall off the returned triple.  Degenerate inputs (empty
token sequences) never raise; they produce zeros, except where a vacuous
ratio is documented as 1.0 (diversity).
"""

import math
from dataclasses import dataclass

from .text import (
    DEFAULT_TOKENIZER,
    SentenceList,
    TokenizerConfig,
    TokenSequence,
    ngrams,
    split_sentences,
    tokenize,
)

DIVERSITY_ORDERS = 3
BLEU_MAX_ORDER = 4


@dataclass(frozen=True)
class PRF:
    """Precision / recall / F1 triple."""

    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class DiversityScore:
    """Mean unique-to-total n-gram ratio over orders 1..3."""

    value: float
    per_order: tuple[float, ...]


@dataclass(frozen=True)
class LengthScore:
    """Smooth inverse of the distance to the mean candidate length."""

    value: float
    candidate_len: int
    mu_len: float


_ZERO_PRF = PRF(0.0, 0.0, 0.0)


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _prf(overlap: float, n_cand: float, n_ref: float) -> PRF:
    precision = overlap / n_cand if n_cand else 0.0
    recall = overlap / n_ref if n_ref else 0.0
    return PRF(precision, recall, _f1(precision, recall))


def rouge_n(candidate: TokenSequence, reference: TokenSequence, n: int) -> PRF:
    """Clipped n-gram overlap between candidate and reference (n in {1, 2})."""
    cand = ngrams(candidate, n)
    ref = ngrams(reference, n)
    overlap = sum(min(count, ref.counts[gram]) for gram, count in cand.counts.items())
    return _prf(overlap, cand.total(), ref.total())


def _lcs_table(a: tuple[str, ...], b: tuple[str, ...]) -> list[list[int]]:
    rows = len(a)
    cols = len(b)
    table = [[0] * (cols + 1) for _ in range(rows + 1)]
    for i in range(1, rows + 1):
        for j in range(1, cols + 1):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table


def lcs_length(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    if not a or not b:
        return 0
    return _lcs_table(a, b)[len(a)][len(b)]


def lcs_match_indices(a: tuple[str, ...], b: tuple[str, ...]) -> list[int]:
    """Indices in ``a`` of one longest common subsequence with ``b``.

    Several longest subsequences may exist; matches are taken greedily from
    the end of both sequences so the chosen index set is reproducible.
    """
    if not a or not b:
        return []
    table = _lcs_table(a, b)
    i, j = len(a), len(b)
    matched: list[int] = []
    while i > 0 and j > 0:
        if a[i - 1] == b[j - 1]:
            matched.append(i - 1)
            i -= 1
            j -= 1
        elif table[i][j - 1] > table[i - 1][j]:
            j -= 1
        else:
            i -= 1
    matched.reverse()
    return matched


def rouge_l(candidate: TokenSequence, reference: TokenSequence) -> PRF:
    """Sequence-level longest-common-subsequence overlap."""
    length = lcs_length(tuple(candidate.tokens), tuple(reference.tokens))
    return _prf(length, len(candidate), len(reference))


def _sentence_tokens(sents: SentenceList, config: TokenizerConfig) -> list[tuple[str, ...]]:
    return [tokenize(s, config).tokens for s in sents.sentences]


def rouge_lsum(
    candidate_sents: SentenceList,
    reference_sents: SentenceList,
    config: TokenizerConfig = DEFAULT_TOKENIZER,
) -> PRF:
    """Summary-level LCS overlap.

    For each reference sentence, the union of LCS match positions against
    every candidate sentence counts as hits.  Hits are clipped by token
    multiplicity on both sides so each candidate (and reference) token
    occurrence is credited at most once and precision/recall stay in [0, 1].
    Reduces to ``rouge_l`` on single-sentence inputs.
    """
    ref_tok = _sentence_tokens(reference_sents, config)
    cand_tok = _sentence_tokens(candidate_sents, config)
    n_ref = sum(len(t) for t in ref_tok)
    n_cand = sum(len(t) for t in cand_tok)
    if n_ref == 0 or n_cand == 0:
        return _ZERO_PRF

    cand_budget: dict[str, int] = {}
    ref_budget: dict[str, int] = {}
    for toks in cand_tok:
        for t in toks:
            cand_budget[t] = cand_budget.get(t, 0) + 1
    for toks in ref_tok:
        for t in toks:
            ref_budget[t] = ref_budget.get(t, 0) + 1

    hits = 0
    for r in ref_tok:
        union: set[int] = set()
        for c in cand_tok:
            union.update(lcs_match_indices(r, c))
        for idx in sorted(union):
            token = r[idx]
            if cand_budget.get(token, 0) > 0 and ref_budget.get(token, 0) > 0:
                hits += 1
                cand_budget[token] -= 1
                ref_budget[token] -= 1
    return _prf(hits, n_cand, n_ref)


def mean_rouge(
    candidate: str, reference: str, config: TokenizerConfig = DEFAULT_TOKENIZER
) -> float:
    """Mean of the unigram, bigram, and summary-level LCS F1 scores."""
    cand_tokens = tokenize(candidate, config)
    ref_tokens = tokenize(reference, config)
    r1 = rouge_n(cand_tokens, ref_tokens, 1).f1
    r2 = rouge_n(cand_tokens, ref_tokens, 2).f1
    rl = rouge_lsum(
        split_sentences(candidate, config.abbreviations),
        split_sentences(reference, config.abbreviations),
        config,
    ).f1
    return (r1 + r2 + rl) / 3.0


def bleu(candidate: TokenSequence, reference: TokenSequence) -> float:
    """Single-pair BLEU, max order 4, uniform weights.

    Modified (clipped) precisions get add-one smoothing whenever the raw
    clipped count is zero; short candidates skip orders they have no
    n-grams for.  Brevity penalty exp(1 - r/c) applies when the candidate
    is shorter than the reference.
    """
    c = len(candidate)
    r = len(reference)
    if c == 0 or r == 0:
        return 0.0

    log_sum = 0.0
    used = 0
    for n in range(1, BLEU_MAX_ORDER + 1):
        cand = ngrams(candidate, n)
        total = cand.total()
        if total == 0:
            continue
        ref = ngrams(reference, n)
        clipped = sum(min(count, ref.counts[g]) for g, count in cand.counts.items())
        if clipped == 0:
            precision = (clipped + 1.0) / (total + 1.0)
        else:
            precision = clipped / total
        log_sum += math.log(precision)
        used += 1
    if used == 0:
        return 0.0
    geo_mean = math.exp(log_sum / used)
    brevity = 1.0 if c >= r else math.exp(1.0 - r / c)
    return brevity * geo_mean


def diversity(candidate: TokenSequence) -> DiversityScore:
    """Proportion of unique n-grams, averaged over orders 1..3.

    A 0/0 ratio (candidate too short for that order) counts as 1.0: a
    candidate with no trigrams cannot repeat any.
    """
    per_order = []
    for n in range(1, DIVERSITY_ORDERS + 1):
        multiset = ngrams(candidate, n)
        total = multiset.total()
        per_order.append(len(multiset.counts) / total if total else 1.0)
    return DiversityScore(value=sum(per_order) / len(per_order), per_order=tuple(per_order))


def length_score(candidate_len: int, mu_len: float) -> LengthScore:
    """1 / max(1, |candidate_len - mu_len|)."""
    value = 1.0 / max(1.0, abs(candidate_len - mu_len))
    return LengthScore(value=value, candidate_len=candidate_len, mu_len=mu_len)
