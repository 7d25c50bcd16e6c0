"""Deterministic tokenization, sentence segmentation, and n-gram extraction.

Every lexical metric in the package shares this token and sentence view, so
the rules here are deliberately simple and reproducible byte-for-byte: text
is NFKC-normalized, lowercased, and split on non-alphanumeric boundaries;
sentences are split with a rule-based boundary detector and an abbreviation
allowlist (no statistical model).
"""

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field

from .errors import ParameterError
from .stem import porter_stem

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Common abbreviations that do not terminate a sentence even when followed
# by whitespace and a capital letter.
DEFAULT_ABBREVIATIONS = (
    "dr", "mr", "mrs", "ms", "prof", "sr", "jr", "st", "mt", "etc", "vs",
    "fig", "e.g", "i.e", "inc", "ltd", "co", "corp", "dept", "est",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct",
    "nov", "dec", "u.s", "u.k", "a.m", "p.m",
)

MAX_NGRAM_ORDER = 4


@dataclass(frozen=True)
class TokenizerConfig:
    """Serializable tokenizer settings; part of the run configuration."""

    stem: bool = False
    abbreviations: tuple[str, ...] = DEFAULT_ABBREVIATIONS

    def to_dict(self) -> dict:
        return {"stem": self.stem, "abbreviations": list(self.abbreviations)}

    @classmethod
    def from_dict(cls, data: dict) -> "TokenizerConfig":
        return cls(
            stem=bool(data.get("stem", False)),
            abbreviations=tuple(data.get("abbreviations", DEFAULT_ABBREVIATIONS)),
        )


@dataclass(frozen=True)
class TokenSequence:
    """Lowercase token view of a text."""

    tokens: tuple[str, ...]
    source_text: str

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


@dataclass(frozen=True)
class SentenceList:
    """Sentences of a text plus their character spans in the original."""

    sentences: tuple[str, ...]
    offsets: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)


@dataclass(frozen=True)
class NgramMultiset:
    """Sliding-window n-gram counts of a token sequence."""

    n: int
    counts: Counter = field(default_factory=Counter)

    def total(self) -> int:
        return sum(self.counts.values())


DEFAULT_TOKENIZER = TokenizerConfig()


def tokenize(text: str, config: TokenizerConfig = DEFAULT_TOKENIZER) -> TokenSequence:
    """Lowercase ``text`` and split it on non-alphanumeric boundaries.

    Digits are kept as token characters ("2nd" stays one token).  Porter
    stemming is applied per token when ``config.stem`` is set.
    """
    normalized = unicodedata.normalize("NFKC", text).lower()
    tokens = _TOKEN_RE.findall(normalized)
    if config.stem:
        tokens = [porter_stem(t) for t in tokens]
    return TokenSequence(tokens=tuple(tokens), source_text=text)


def _is_abbreviation(text: str, dot_index: int, abbreviations: tuple[str, ...]) -> bool:
    """True when the period at ``dot_index`` ends an allowlisted abbreviation
    or an uppercase initial such as the "J." in "J. Smith"."""
    start = dot_index
    while start > 0 and (text[start - 1].isalnum() or text[start - 1] == "."):
        start -= 1
    raw = text[start:dot_index]
    if not raw:
        return False
    if len(raw) == 1 and raw.isupper():
        return True
    return raw.lower().rstrip(".") in abbreviations


def split_sentences(
    text: str,
    abbreviations: tuple[str, ...] = DEFAULT_ABBREVIATIONS,
) -> SentenceList:
    """Split ``text`` into sentences with character spans.

    A boundary is terminal punctuation (. ! ?) followed by whitespace and an
    uppercase letter, digit, or opening quote, unless the punctuated word is
    an allowlisted abbreviation (or a single initial like "J.").  Newlines
    always end a sentence.  Spans cover every non-whitespace character of
    the original text, in order.
    """
    sentences: list[str] = []
    offsets: list[tuple[int, int]] = []

    def emit(start: int, end: int) -> None:
        # Trim surrounding whitespace out of the recorded span.
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        if end > start:
            sentences.append(text[start:end])
            offsets.append((start, end))

    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            emit(start, i)
            start = i + 1
        elif ch in ".!?":
            # Swallow a run of terminal punctuation plus closing quotes.
            j = i + 1
            while j < n and text[j] in ".!?\"'”’)":
                j += 1
            k = j
            while k < n and text[k] in " \t":
                k += 1
            follows_opener = k < n and (
                text[k].isupper() or text[k] in "\"'“‘("
            )
            if k > j and follows_opener:
                if not (ch == "." and _is_abbreviation(text, i, abbreviations)):
                    emit(start, j)
                    start = j
            i = j - 1
        i += 1
    emit(start, n)
    return SentenceList(sentences=tuple(sentences), offsets=tuple(offsets))


def ngrams(tokens: TokenSequence | tuple[str, ...] | list[str], n: int) -> NgramMultiset:
    """Sliding-window n-gram multiset; empty when the sequence is shorter than n."""
    if not 1 <= n <= MAX_NGRAM_ORDER:
        raise ParameterError(f"n-gram order must be in 1..{MAX_NGRAM_ORDER}, got {n}")
    seq = tuple(tokens.tokens if isinstance(tokens, TokenSequence) else tokens)
    counts = Counter(seq[i : i + n] for i in range(len(seq) - n + 1))
    return NgramMultiset(n=n, counts=counts)
