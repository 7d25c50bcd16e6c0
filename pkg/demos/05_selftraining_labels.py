"""
Exporting self-training labels
==============================

The selected candidate of each training document can serve as a pseudo-label
for fine-tuning the base generator on its own re-ranked output.  Heavily
copied selections are flagged for external paraphrasing first, so the
training signal keeps some abstractiveness: the flag lands on the
ceil(x * N) most extractive records.
"""

from pathlib import Path
from tempfile import TemporaryDirectory

from summrank import (
    CoefficientSet,
    FeatureSpec,
    IdfTable,
    ScorerRegistry,
    build_labels,
    compute_features,
    extractiveness,
    rerank_corpus,
    write_labels,
)
from summrank.synthetic import generate

print(f"verbatim copy      -> {extractiveness('a b c d', 'x a b c d y'):.3f}")
print(f"half substituted   -> {extractiveness('a b qq rr', 'a b c d'):.3f}")
print(f"fully novel        -> {extractiveness('p q r s', 'a b c d'):.3f}")

corpus = generate(seed=5, n_docs=16, k=4, plant="bleu-oracle")
documents = corpus.documents
spec = FeatureSpec()
registry = ScorerRegistry(idf=IdfTable.from_documents([d.source for d in documents]))
matrix = compute_features(documents, spec, registry)
selection = rerank_corpus(matrix, CoefficientSet.uniform(spec))

records, stats = build_labels(documents, selection, x=0.25)
print(f"\n{stats.count} records, {stats.flagged} flagged for paraphrasing "
      f"(x=0.25), mean extractiveness {stats.mean_extractiveness:.3f}")

with TemporaryDirectory() as tmp:
    path = Path(tmp) / "labels.jsonl"
    write_labels(records, path)
    print("\nfirst two label records:")
    for line in path.read_text().splitlines()[:2]:
        print(" ", line[:100])
