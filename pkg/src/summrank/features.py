"""Per-candidate feature vectors and their normalization.

Each document's candidate pool becomes a k x d matrix over a fixed, ordered
feature set partitioned into three groups:

    overlap   rouge1_src, rouge2_src, bleu_src   (candidate vs source)
    semantic  one feature per configured scorer  (candidate vs source)
    quality   diversity, length                  (candidate alone)

Raw values are kept beside normalized ones.  The default normalization is
per-instance min-max: within one document, each feature column is mapped to
[0, 1]; a constant column maps to 0.5 so uninformative features stay
neutral.  Min-max is invariant under positive affine rescaling of the raw
column, so selection downstream does not depend on feature scale.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Document
from .errors import ParameterError, ValidationError
from .metrics import bleu, diversity, length_score, rouge_n
from .scoring import BUILTIN_LEXICAL, ScorerId, ScorerRegistry
from .text import DEFAULT_TOKENIZER, TokenizerConfig, tokenize

OVERLAP_FEATURES = ("rouge1_src", "rouge2_src", "bleu_src")
QUALITY_FEATURES = ("diversity", "length")
NORMALIZATION_MODES = ("none", "per_instance_minmax")

GROUP_OVERLAP = "overlap"
GROUP_SEMANTIC = "semantic"
GROUP_DIVERSITY = "diversity"
GROUP_LENGTH = "length"


@dataclass(frozen=True)
class FeatureSpec:
    """Ordered feature identifiers with their group partition."""

    semantic_scorers: tuple[ScorerId, ...] = (ScorerId(BUILTIN_LEXICAL),)

    @property
    def overlap_ids(self) -> tuple[str, ...]:
        return OVERLAP_FEATURES

    @property
    def semantic_ids(self) -> tuple[str, ...]:
        return tuple(f"semantic_{s.name}" for s in self.semantic_scorers)

    @property
    def quality_ids(self) -> tuple[str, ...]:
        return QUALITY_FEATURES

    @property
    def ids(self) -> tuple[str, ...]:
        return self.overlap_ids + self.semantic_ids + self.quality_ids

    @property
    def dim(self) -> int:
        return len(self.ids)

    def column(self, feature_id: str) -> int:
        try:
            return self.ids.index(feature_id)
        except ValueError:
            raise ParameterError(f"unknown feature id '{feature_id}'") from None

    def columns(self, group: str) -> list[int]:
        """Column indices belonging to one stage-2 group."""
        if group == GROUP_OVERLAP:
            names = self.overlap_ids
        elif group == GROUP_SEMANTIC:
            names = self.semantic_ids
        elif group == GROUP_DIVERSITY:
            names = ("diversity",)
        elif group == GROUP_LENGTH:
            names = ("length",)
        else:
            raise ParameterError(f"unknown feature group '{group}'")
        return [self.column(n) for n in names]


@dataclass
class FeatureMatrix:
    """Feature values for a whole corpus, one k x d block per document."""

    spec: FeatureSpec
    doc_ids: list[str]
    raw: dict[str, np.ndarray]
    normalized: dict[str, np.ndarray]
    normalization: str
    mu_len: float

    def matrix(self, doc_id: str) -> np.ndarray:
        return self.normalized[doc_id]

    def __len__(self) -> int:
        return len(self.doc_ids)


def mean_candidate_length(
    documents: list[Document], config: TokenizerConfig = DEFAULT_TOKENIZER
) -> float:
    """Mean candidate token count over the corpus being re-ranked."""
    lengths = [
        len(tokenize(c, config)) for doc in documents for c in doc.candidates
    ]
    if not lengths:
        raise ParameterError("corpus has no candidates")
    return float(sum(lengths)) / len(lengths)


def _minmax_columns(block: np.ndarray) -> np.ndarray:
    out = np.empty_like(block)
    for j in range(block.shape[1]):
        column = block[:, j]
        low = column.min()
        high = column.max()
        if high > low:
            out[:, j] = (column - low) / (high - low)
        else:
            out[:, j] = 0.5
    return out


def normalize(
    raw: dict[str, np.ndarray], mode: str
) -> dict[str, np.ndarray]:
    """Apply a normalization mode to every document block."""
    if mode not in NORMALIZATION_MODES:
        raise ParameterError(
            f"unknown normalization mode '{mode}'; expected one of {NORMALIZATION_MODES}"
        )
    if mode == "none":
        return {doc_id: block.copy() for doc_id, block in raw.items()}
    return {doc_id: _minmax_columns(block) for doc_id, block in raw.items()}


def compute_features(
    documents: list[Document],
    spec: FeatureSpec,
    registry: ScorerRegistry,
    mu_len: float | None = None,
    normalization: str = "per_instance_minmax",
    config: TokenizerConfig = DEFAULT_TOKENIZER,
) -> FeatureMatrix:
    """Assemble the full per-candidate feature matrix for a corpus.

    Scorer failures propagate before anything is returned, so callers never
    see a partially scored matrix.
    """
    for doc in documents:
        if doc.k == 0:
            raise ValidationError(f"doc {doc.id}: document has no candidates")
    if mu_len is None:
        mu_len = mean_candidate_length(documents, config)

    semantic_scores: dict[str, list[float]] = {}
    pairs = [(c, doc.source) for doc in documents for c in doc.candidates]
    for scorer in spec.semantic_scorers:
        semantic_scores[scorer.name] = registry.score_batch(scorer, pairs)

    raw: dict[str, np.ndarray] = {}
    row = 0
    for doc in documents:
        src_tokens = tokenize(doc.source, config)
        block = np.zeros((doc.k, spec.dim))
        for i, candidate in enumerate(doc.candidates):
            cand_tokens = tokenize(candidate, config)
            values = [
                rouge_n(cand_tokens, src_tokens, 1).f1,
                rouge_n(cand_tokens, src_tokens, 2).f1,
                bleu(cand_tokens, src_tokens),
            ]
            for scorer in spec.semantic_scorers:
                values.append(semantic_scores[scorer.name][row + i])
            values.append(diversity(cand_tokens).value)
            values.append(length_score(len(cand_tokens), mu_len).value)
            block[i, :] = values
        raw[doc.id] = block
        row += doc.k

    return FeatureMatrix(
        spec=spec,
        doc_ids=[doc.id for doc in documents],
        raw=raw,
        normalized=normalize(raw, normalization),
        normalization=normalization,
        mu_len=mu_len,
    )


def write_features(
    matrix: FeatureMatrix, path: str | Path, header: str | None = None
) -> None:
    """JSONL form: one record per document, raw and normalized blocks."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        for doc_id in matrix.doc_ids:
            record = {
                "id": doc_id,
                "k": int(matrix.raw[doc_id].shape[0]),
                "features": matrix.normalized[doc_id].tolist(),
                "raw_features": matrix.raw[doc_id].tolist(),
                "spec": list(matrix.spec.ids),
                "mu_len": matrix.mu_len,
            }
            fh.write(json.dumps(record) + "\n")


def read_features(path: str | Path, spec: FeatureSpec | None = None) -> FeatureMatrix:
    if not Path(path).exists():
        raise ValidationError(f"feature file not found: {path}")
    doc_ids: list[str] = []
    raw: dict[str, np.ndarray] = {}
    normalized: dict[str, np.ndarray] = {}
    mu_len = 0.0
    ids_seen: list[str] | None = None
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            if "_provenance" in record:
                continue
            try:
                doc_id = record["id"]
                doc_ids.append(doc_id)
                raw[doc_id] = np.array(record["raw_features"], dtype=float)
                normalized[doc_id] = np.array(record["features"], dtype=float)
                mu_len = float(record["mu_len"])
                ids_seen = list(record["spec"])
            except (KeyError, TypeError, ValueError) as err:
                raise ValidationError(f"{path} line {line_no}: bad feature record ({err})") from err
    if ids_seen is None:
        raise ValidationError(f"{path}: no feature records")
    if spec is None:
        semantic = tuple(
            ScorerId(name.removeprefix("semantic_"))
            for name in ids_seen
            if name.startswith("semantic_")
        )
        spec = FeatureSpec(semantic_scorers=semantic)
    if list(spec.ids) != ids_seen:
        raise ValidationError(
            f"{path}: feature spec mismatch (file has {ids_seen}, expected {list(spec.ids)})"
        )
    return FeatureMatrix(
        spec=spec,
        doc_ids=doc_ids,
        raw=raw,
        normalized=normalized,
        normalization="unknown",
        mu_len=mu_len,
    )
