"""
Reference-side evaluation
=========================

With references available, selection strategies can be compared: the oracle
upper bound, the minimum lower bound, trivial picks, and the re-ranker.
Recall@k asks how often an oracle candidate appears among the top-k by
score; overlap diagnostics count how often the re-ranker coincides with a
trivial rule.
"""

from summrank import (
    CoefficientSet,
    FeatureSpec,
    IdfTable,
    ScorerRegistry,
    baseline_select,
    compute_features,
    evaluate_strategies,
    overlap_diagnostics,
    recall_curve,
    rerank_corpus,
)
from summrank.evaluate import ReferenceScores, score_rankings
from summrank.synthetic import generate

corpus = generate(seed=3, n_docs=40, k=8, plant="lead-bias")
documents = corpus.documents

spec = FeatureSpec()
registry = ScorerRegistry(idf=IdfTable.from_documents([d.source for d in documents]))
matrix = compute_features(documents, spec, registry)
summ = rerank_corpus(matrix, CoefficientSet.uniform(spec))

results = evaluate_strategies(
    documents,
    ["first", "random", "longest", "minimum", "oracle", "summscore"],
    summscore_selection=summ,
    feature_matrix=matrix,
    seed=1,
)
print(f"{'strategy':<12} {'R-1':>7} {'R-2':>7} {'R-L':>7} {'mean':>7} {'gain%':>8}")
for r in results:
    gain = "" if r.gain_pct is None else f"{r.gain_pct:+8.2f}"
    print(
        f"{r.strategy:<12} {100 * r.rouge.r1:7.2f} {100 * r.rouge.r2:7.2f} "
        f"{100 * r.rouge.rl:7.2f} {100 * r.rouge.mean:7.2f} {gain}"
    )

scores = ReferenceScores(documents)
oracle_sets = {d.id: scores.oracle_set(d) for d in documents}
curve = recall_curve(score_rankings(summ), oracle_sets)
print("\nrecall@k:", dict(zip(curve.thresholds, (round(r, 3) for r in curve.recalls))))

trivial = [
    baseline_select("first", documents),
    baseline_select("longest", documents),
    baseline_select("max-feature:rouge1_src", documents, feature_matrix=matrix),
]
print("overlap with trivial selections (%):", overlap_diagnostics(summ, trivial))
