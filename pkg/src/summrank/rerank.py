"""Candidate scoring and selection from a simplex weight vector.

A candidate's score is the dot product of its feature row with the weight
vector theta; the selected candidate is the argmax, ties resolved to the
lowest index so that equal scores fall back to the generator's own ranking
(candidate order encodes generation rank, top beam first).
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParameterError, ValidationError
from .features import FeatureMatrix, FeatureSpec

WEIGHT_DECIMALS = 6
SIMPLEX_TOL = 1e-9

GROUP_ORDER = ("overlap", "semantic", "diversity", "length")


def round_simplex(weights: list[float], decimals: int = WEIGHT_DECIMALS) -> list[float]:
    """Round to fixed decimals, folding the residual into the largest
    coordinate so the rounded vector still sums to exactly 1."""
    rounded = [round(w, decimals) for w in weights]
    residual = round(1.0 - sum(rounded), decimals)
    if residual:
        largest = max(range(len(rounded)), key=lambda i: (rounded[i], -i))
        rounded[largest] = round(rounded[largest] + residual, decimals)
    return rounded


@dataclass
class CoefficientSet:
    """Simplex weights over the flat feature set, plus the two-stage
    factorization that produced them.

    theta[j] equals group_weights[g] * within_group[g][j'] for the group g
    feature j belongs to; the groups are overlap, semantic, diversity, and
    length, in that order.
    """

    feature_ids: list[str]
    theta: list[float]
    group_weights: dict[str, float]
    within_group: dict[str, list[float]]
    provenance: dict = field(default_factory=dict)

    @classmethod
    def from_factorization(
        cls,
        spec: FeatureSpec,
        group_weights: dict[str, float],
        within_group: dict[str, list[float]],
        provenance: dict | None = None,
    ) -> "CoefficientSet":
        theta: list[float] = []
        for group in GROUP_ORDER:
            for w in within_group[group]:
                theta.append(group_weights[group] * w)
        ordered_ids = list(spec.overlap_ids + spec.semantic_ids + spec.quality_ids)
        return cls(
            feature_ids=ordered_ids,
            theta=theta,
            group_weights=dict(group_weights),
            within_group={g: list(w) for g, w in within_group.items()},
            provenance=provenance or {},
        )

    @classmethod
    def uniform(cls, spec: FeatureSpec, provenance: dict | None = None) -> "CoefficientSet":
        d = spec.dim
        theta = [1.0 / d] * d
        n_sem = len(spec.semantic_ids)
        group_weights = {
            "overlap": 3.0 / d,
            "semantic": n_sem / d,
            "diversity": 1.0 / d,
            "length": 1.0 / d,
        }
        within_group = {
            "overlap": [1.0 / 3] * 3,
            "semantic": [1.0 / n_sem] * n_sem,
            "diversity": [1.0],
            "length": [1.0],
        }
        return cls(
            feature_ids=list(spec.ids),
            theta=theta,
            group_weights=group_weights,
            within_group=within_group,
            provenance=provenance or {},
        )

    def validate(self, factor_tol: float = 2e-6) -> None:
        """Check simplex and factorization invariants.

        The factorization bound defaults to 2e-6 because serialized files
        round every weight vector to 6 decimals independently; freshly
        estimated sets satisfy it at 1e-9.
        """
        if any(t < 0 for t in self.theta):
            raise ParameterError("coefficients must be non-negative")
        if abs(sum(self.theta) - 1.0) > SIMPLEX_TOL:
            raise ParameterError(f"coefficients sum to {sum(self.theta)}, not 1")
        j = 0
        for group in GROUP_ORDER:
            for w in self.within_group[group]:
                expected = self.group_weights[group] * w
                if abs(self.theta[j] - expected) > factor_tol:
                    raise ParameterError(
                        f"theta[{j}] does not factor through group '{group}'"
                    )
                j += 1

    def to_dict(self) -> dict:
        return {
            "feature_ids": self.feature_ids,
            "theta": round_simplex(self.theta),
            "group_weights": dict(
                zip(GROUP_ORDER, round_simplex([self.group_weights[g] for g in GROUP_ORDER]))
            ),
            "within_group": {g: round_simplex(self.within_group[g]) for g in GROUP_ORDER},
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CoefficientSet":
        try:
            return cls(
                feature_ids=list(data["feature_ids"]),
                theta=[float(t) for t in data["theta"]],
                group_weights={g: float(w) for g, w in data["group_weights"].items()},
                within_group={g: [float(x) for x in w] for g, w in data["within_group"].items()},
                provenance=dict(data.get("provenance", {})),
            )
        except (KeyError, TypeError, ValueError) as err:
            raise ValidationError(f"bad coefficient record: {err}") from err

    def save(self, path: str | Path, header: dict | None = None) -> None:
        payload = self.to_dict()
        if header:
            payload = {"_provenance": header, **payload}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "CoefficientSet":
        if not Path(path).exists():
            raise ValidationError(f"coefficient file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class Selection:
    """Chosen candidate per document under one strategy."""

    strategy: str
    chosen: dict[str, int]
    scores: dict[str, list[float]] = field(default_factory=dict)

    def save(self, path: str | Path, doc_order: list[str], header: str | None = None) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            if header:
                fh.write(header)
            for doc_id in doc_order:
                record = {
                    "id": doc_id,
                    "strategy": self.strategy,
                    "chosen": self.chosen[doc_id],
                    "scores": self.scores.get(doc_id, []),
                }
                fh.write(json.dumps(record) + "\n")


def combine(features: np.ndarray, theta: list[float] | np.ndarray) -> np.ndarray:
    """Weighted feature combination: score_c = sum_j theta_j * F_j(c)."""
    features = np.asarray(features, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if features.ndim != 2 or features.shape[1] != theta.shape[0]:
        raise ParameterError(
            f"feature matrix of shape {features.shape} does not match "
            f"{theta.shape[0]} coefficients"
        )
    return features @ theta


def select(scores: np.ndarray | list[float]) -> int:
    """Argmax with ties resolved to the lowest index."""
    scores = np.asarray(scores, dtype=float)
    if scores.size == 0:
        raise ParameterError("cannot select from an empty score vector")
    return int(np.argmax(scores))


def rerank_corpus(matrix: FeatureMatrix, coefficients: CoefficientSet) -> Selection:
    """Score and select for every document in the corpus."""
    coefficients.validate()
    if list(matrix.spec.ids) != coefficients.feature_ids:
        raise ParameterError(
            "coefficient feature ids do not match the feature matrix spec"
        )
    chosen: dict[str, int] = {}
    scores: dict[str, list[float]] = {}
    for doc_id in matrix.doc_ids:
        vector = combine(matrix.matrix(doc_id), coefficients.theta)
        chosen[doc_id] = select(vector)
        scores[doc_id] = [float(v) for v in vector]
    return Selection(strategy="summscore", chosen=chosen, scores=scores)
