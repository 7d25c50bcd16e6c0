"""Corpus records and JSONL input handling.

One document per line: {"id": str, "source": str, "candidates": [str, ...],
"reference": str (optional), "candidate_origin": [str, ...] (optional)}.
References are only ever consumed by evaluation-side code; estimation never
sees them, which keeps the no-supervision contract structural.

Several candidate files may be pooled: documents sharing an id have their
candidate lists concatenated in file order, each candidate labeled with the
origin it came from.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError


@dataclass
class Document:
    """A source text with its candidate pool and optional reference."""

    id: str
    source: str
    candidates: list[str]
    reference: str | None = None
    candidate_origin: list[str] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.candidates)


def _parse_record(record: dict, origin: str, line_no: int) -> Document:
    if not isinstance(record, dict):
        raise ValidationError(f"line {line_no}: record is not an object")
    doc_id = record.get("id")
    if not isinstance(doc_id, str) or not doc_id:
        raise ValidationError(f"line {line_no}: missing or empty 'id'")
    source = record.get("source")
    if not isinstance(source, str):
        raise ValidationError(f"doc {doc_id} (line {line_no}): missing 'source'")
    candidates = record.get("candidates")
    if not isinstance(candidates, list) or not candidates:
        raise ValidationError(
            f"doc {doc_id} (line {line_no}): 'candidates' must be a non-empty list"
        )
    if not all(isinstance(c, str) for c in candidates):
        raise ValidationError(
            f"doc {doc_id} (line {line_no}): candidates must all be strings"
        )
    reference = record.get("reference")
    if reference is not None and not isinstance(reference, str):
        raise ValidationError(f"doc {doc_id} (line {line_no}): 'reference' must be a string")
    origins = record.get("candidate_origin")
    if origins is None:
        origins = [origin] * len(candidates)
    elif not isinstance(origins, list) or len(origins) != len(candidates):
        raise ValidationError(
            f"doc {doc_id} (line {line_no}): 'candidate_origin' must match candidates"
        )
    return Document(
        id=doc_id,
        source=source,
        candidates=list(candidates),
        reference=reference,
        candidate_origin=[str(o) for o in origins],
    )


def load_corpus(paths: list[str | Path] | str | Path) -> list[Document]:
    """Read one or more corpus files, pooling candidates per document id.

    Document order follows first appearance.  Duplicate candidate strings
    are kept; the generator's ranking semantics depend on position, not
    uniqueness.
    """
    if isinstance(paths, (str, Path)):
        paths = [paths]
    by_id: dict[str, Document] = {}
    order: list[str] = []
    for path in paths:
        path = Path(path)
        if not path.exists():
            raise ValidationError(f"corpus file not found: {path}")
        origin = path.stem
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as err:
                    raise ValidationError(
                        f"{path} line {line_no}: invalid JSON ({err})"
                    ) from err
                if isinstance(record, dict) and "_provenance" in record:
                    continue
                doc = _parse_record(record, origin, line_no)
                existing = by_id.get(doc.id)
                if existing is None:
                    by_id[doc.id] = doc
                    order.append(doc.id)
                else:
                    if existing.source != doc.source:
                        raise ValidationError(
                            f"doc {doc.id}: conflicting sources across pooled files"
                        )
                    existing.candidates.extend(doc.candidates)
                    existing.candidate_origin.extend(doc.candidate_origin)
                    if existing.reference is None:
                        existing.reference = doc.reference
    return [by_id[i] for i in order]


def save_corpus(documents: list[Document], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in documents:
            record = {"id": doc.id, "source": doc.source, "candidates": doc.candidates}
            if doc.reference is not None:
                record["reference"] = doc.reference
            if doc.candidate_origin and len(set(doc.candidate_origin)) > 1:
                record["candidate_origin"] = doc.candidate_origin
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
