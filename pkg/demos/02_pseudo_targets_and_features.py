"""
Pseudo-summaries and the feature matrix
=======================================

Weight estimation needs a proxy target per document; all five construction
methods use only the source.  Features are then computed per candidate and
min-max normalized within each document so heterogeneous scales can share
simplex weights.
"""

import numpy as np

from summrank import (
    Document,
    FeatureSpec,
    IdfTable,
    ScorerRegistry,
    build_pseudo_target,
    compute_features,
    split_sentences,
)

document = Document(
    id="demo",
    source=(
        "The probe reached the outer moon after a six year cruise.\n"
        "Mission control confirmed the orbit insertion burn.\n"
        "Cameras returned the first close images within hours.\n"
        "Engineers reported all instruments healthy.\n"
        "A second flyby is planned for next spring."
    ),
    candidates=[
        "The probe reached the outer moon and cameras returned close images.",
        "probe probe probe reached reached the the the moon moon",
        "Engineers reported all instruments healthy after the burn.",
        "Totally unrelated text about cooking pasta for dinner.",
    ],
)

sentences = split_sentences(document.source)
for method in ("lead3", "random3", "salient-r1"):
    target = build_pseudo_target(method, sentences, doc_id=document.id, seed=42)
    print(f"{method:12s} -> sentences {target.sentence_indices}")
    print(f"             {target.text[:72]}...")

# the registry scores candidate-source similarity; the builtin scorer is an
# idf-weighted bag-of-words cosine, so the demo runs without any service
registry = ScorerRegistry(idf=IdfTable.from_documents([document.source]))
spec = FeatureSpec()
matrix = compute_features([document], spec, registry)

print("\nfeature ids:", spec.ids)
with np.printoptions(precision=3, suppress=True):
    print("raw block:\n", matrix.raw["demo"])
    print("normalized block (per-document min-max):\n", matrix.normalized["demo"])
