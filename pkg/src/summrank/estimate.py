"""Coefficient estimation by hierarchical stochastic local search.

The objective is the corpus mean of the overlap between the selected
candidate and a pseudo-summary built from the source document.  Because the
per-candidate overlap values do not depend on theta, they are computed once
into a table; each search trial is then a cheap argmax pass over the
feature matrix.

The search is hierarchical to keep the dimensionality low: first the three
source-overlap features are tuned alone, then the semantic features, and
finally the two group composites compete with diversity and length in a
four-way search.  Flat coefficients are the product of the stage-2 group
weight and the stage-1 within-group weight.

Each stage is a budgeted hill climb with random restarts: starting uniform,
a trial either proposes a fresh random simplex point (probability 0.2) or
perturbs one coordinate of the incumbent by a step from +-{0.01, 0.02,
0.05, 0.1, 0.2}, clamping at zero and renormalizing; a proposal is accepted
only when the objective strictly increases.  Every stage makes at most
``trials_per_search`` objective evaluations, counting the initial one.
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .features import FeatureMatrix
from .metrics import mean_rouge
from .pseudo import PseudoTarget
from .rerank import GROUP_ORDER, CoefficientSet
from .text import DEFAULT_TOKENIZER, TokenizerConfig

DEFAULT_TRIALS = 1000
DEFAULT_TUNING_SUBSET = 1000
DEFAULT_RESTART_PROBABILITY = 0.2
PERTURBATION_STEPS = (0.01, 0.02, 0.05, 0.1, 0.2)

STAGE_NAMES = ("overlap", "semantic", "final")


@dataclass(frozen=True)
class EstimationConfig:
    """Search budget and randomness knobs."""

    trials_per_search: int = DEFAULT_TRIALS
    tuning_subset_size: int = DEFAULT_TUNING_SUBSET
    seed: int = 0
    restart_probability: float = DEFAULT_RESTART_PROBABILITY
    perturbation_steps: tuple[float, ...] = PERTURBATION_STEPS

    def __post_init__(self):
        if self.trials_per_search < 1:
            raise ParameterError("trials_per_search must be >= 1")
        if not 0.0 <= self.restart_probability <= 1.0:
            raise ParameterError("restart_probability must be in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "trials_per_search": self.trials_per_search,
            "tuning_subset_size": self.tuning_subset_size,
            "seed": self.seed,
            "restart_probability": self.restart_probability,
            "perturbation_steps": list(self.perturbation_steps),
        }


@dataclass
class ObjectiveTable:
    """Per-document candidate quality against the pseudo-target."""

    doc_ids: list[str]
    values: dict[str, np.ndarray]

    @classmethod
    def build(
        cls,
        documents,
        pseudo_targets: dict[str, PseudoTarget],
        config: TokenizerConfig = DEFAULT_TOKENIZER,
    ) -> "ObjectiveTable":
        doc_ids = []
        values = {}
        for doc in documents:
            target = pseudo_targets[doc.id]
            values[doc.id] = np.array(
                [mean_rouge(c, target.text, config) for c in doc.candidates]
            )
            doc_ids.append(doc.id)
        return cls(doc_ids=doc_ids, values=values)


@dataclass
class TrialRecord:
    stage: str
    trial: int
    objective: float
    accepted: bool


@dataclass
class SearchResult:
    weights: np.ndarray
    objective: float
    evaluations: int
    log: list[TrialRecord] = field(default_factory=list)


def objective_value(
    theta: np.ndarray,
    matrix: FeatureMatrix,
    table: ObjectiveTable,
    doc_ids: list[str] | None = None,
) -> float:
    """Mean over documents of the table entry the weighted argmax selects.

    The reduction is a numpy mean over the doc-id-ordered value vector, the
    same reduction the batched search evaluator uses, so both paths agree
    bit for bit.
    """
    ids = doc_ids if doc_ids is not None else matrix.doc_ids
    selected = np.empty(len(ids))
    for pos, doc_id in enumerate(ids):
        block = matrix.normalized.get(doc_id)
        if block is None or doc_id not in table.values:
            raise ParameterError(f"doc {doc_id} missing from matrix or objective table")
        scores = block @ theta
        selected[pos] = table.values[doc_id][int(np.argmax(scores))]
    return float(np.mean(selected))


class _BatchedObjective:
    """Argmax-lookup objective over a document set.

    When every document has the same candidate count, blocks are stacked
    into one (docs, k, d) tensor so a search trial is a single matmul plus
    a gather; otherwise evaluation falls back to the per-document loop.
    Ties resolve to the lowest candidate index on both paths.
    """

    def __init__(self, matrix: FeatureMatrix, table: ObjectiveTable, doc_ids: list[str]):
        self.matrix = matrix
        self.table = table
        self.doc_ids = doc_ids
        shapes = {matrix.normalized[d].shape for d in doc_ids if d in matrix.normalized}
        self.stacked = None
        self.values = None
        if len(shapes) == 1:
            missing = [
                d for d in doc_ids
                if d not in matrix.normalized or d not in table.values
            ]
            if not missing:
                self.stacked = np.stack([matrix.normalized[d] for d in doc_ids])
                self.values = np.stack([np.asarray(table.values[d]) for d in doc_ids])

    def __call__(self, theta: np.ndarray) -> float:
        if self.stacked is None:
            return objective_value(theta, self.matrix, self.table, self.doc_ids)
        scores = self.stacked @ theta
        chosen = scores.argmax(axis=1)
        return float(np.mean(self.values[np.arange(len(self.doc_ids)), chosen]))


def _random_simplex_point(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Uniform over the simplex via normalized exponentials."""
    raw = rng.exponential(1.0, dim)
    return raw / raw.sum()


def _perturb(rng: np.random.Generator, point: np.ndarray, ladder) -> np.ndarray:
    proposal = point.copy()
    coord = int(rng.integers(0, len(point)))
    step = float(rng.choice(ladder))
    if rng.random() < 0.5:
        step = -step
    proposal[coord] = max(0.0, proposal[coord] + step)
    total = proposal.sum()
    if total <= 0.0:
        return point.copy()
    return proposal / total


def local_search(
    dim: int,
    objective_fn,
    config: EstimationConfig,
    rng: np.random.Generator,
    stage: str = "search",
) -> SearchResult:
    """Budgeted stochastic hill climb over the simplex, keeping best-so-far."""
    if dim < 1:
        raise ParameterError("search dimension must be >= 1")
    if dim == 1:
        point = np.array([1.0])
        value = float(objective_fn(point))
        return SearchResult(
            weights=point,
            objective=value,
            evaluations=1,
            log=[TrialRecord(stage, 0, value, True)],
        )

    best = np.full(dim, 1.0 / dim)
    best_value = float(objective_fn(best))
    evaluations = 1
    log = [TrialRecord(stage, 0, best_value, True)]
    while evaluations < config.trials_per_search:
        if rng.random() < config.restart_probability:
            proposal = _random_simplex_point(rng, dim)
        else:
            proposal = _perturb(rng, best, config.perturbation_steps)
        value = float(objective_fn(proposal))
        evaluations += 1
        accepted = value > best_value
        if accepted:
            best = proposal
            best_value = value
        log.append(TrialRecord(stage, evaluations - 1, value, accepted))
    return SearchResult(weights=best, objective=best_value, evaluations=evaluations, log=log)


def _stage_rng(seed: int, stage_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, stage_index]))


def _group_objective(evaluator: _BatchedObjective, dim_total: int, columns: list[int]):
    """Objective over a feature subset, other columns zeroed."""

    def fn(weights: np.ndarray) -> float:
        theta = np.zeros(dim_total)
        theta[columns] = weights
        return evaluator(theta)

    return fn


def hierarchical_estimate(
    matrix: FeatureMatrix,
    table: ObjectiveTable,
    config: EstimationConfig,
    pseudo_method: str = "",
) -> tuple[CoefficientSet, list[TrialRecord]]:
    """Two-level weight estimation; returns coefficients and the trial log."""
    if not matrix.doc_ids:
        raise ParameterError("cannot estimate coefficients on an empty corpus")
    missing = [d for d in matrix.doc_ids if d not in table.values]
    if missing:
        raise ParameterError(f"objective table missing documents: {missing[:3]}")

    doc_ids = list(matrix.doc_ids)
    if len(doc_ids) > config.tuning_subset_size:
        rng = np.random.default_rng(np.random.SeedSequence([config.seed, 999]))
        picked = rng.choice(len(doc_ids), size=config.tuning_subset_size, replace=False)
        doc_ids = [doc_ids[i] for i in sorted(int(i) for i in picked)]

    spec = matrix.spec
    evaluator = _BatchedObjective(matrix, table, doc_ids)
    log: list[TrialRecord] = []

    # stage 1a and 1b: within-group weights, other features zeroed
    stage_results: dict[str, SearchResult] = {}
    for stage_index, group in enumerate(("overlap", "semantic")):
        columns = spec.columns(group)
        result = local_search(
            dim=len(columns),
            objective_fn=_group_objective(evaluator, spec.dim, columns),
            config=config,
            rng=_stage_rng(config.seed, stage_index),
            stage=group,
        )
        stage_results[group] = result
        log.extend(result.log)

    # stage 2: composites from stage 1 compete with the quality features
    overlap_cols = spec.columns("overlap")
    semantic_cols = spec.columns("semantic")
    diversity_col = spec.columns("diversity")[0]
    length_col = spec.columns("length")[0]
    w_overlap = stage_results["overlap"].weights
    w_semantic = stage_results["semantic"].weights

    def final_objective(group_weights: np.ndarray) -> float:
        theta = np.zeros(spec.dim)
        theta[overlap_cols] = group_weights[0] * w_overlap
        theta[semantic_cols] = group_weights[1] * w_semantic
        theta[diversity_col] = group_weights[2]
        theta[length_col] = group_weights[3]
        return evaluator(theta)

    final = local_search(
        dim=4,
        objective_fn=final_objective,
        config=config,
        rng=_stage_rng(config.seed, 2),
        stage="final",
    )
    log.extend(final.log)

    group_weights = dict(zip(GROUP_ORDER, (float(w) for w in final.weights)))
    within_group = {
        "overlap": [float(w) for w in w_overlap],
        "semantic": [float(w) for w in w_semantic],
        "diversity": [1.0],
        "length": [1.0],
    }
    provenance = {
        "pseudo_method": pseudo_method,
        "config": config.to_dict(),
        "tuning_docs": len(doc_ids),
        "objective": final.objective,
        "evaluations_per_stage": {
            "overlap": stage_results["overlap"].evaluations,
            "semantic": stage_results["semantic"].evaluations,
            "final": final.evaluations,
        },
    }
    coefficients = CoefficientSet.from_factorization(
        spec, group_weights, within_group, provenance
    )
    coefficients.validate(factor_tol=1e-9)
    return coefficients, log


def write_trial_log(log: list[TrialRecord], path: str | Path, header: str | None = None) -> None:
    """Audit log: one CSV row per objective evaluation."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if header:
            fh.write(header)
        writer = csv.writer(fh)
        writer.writerow(["stage", "trial", "objective", "accepted"])
        for record in log:
            writer.writerow(
                [record.stage, record.trial, repr(record.objective), int(record.accepted)]
            )
