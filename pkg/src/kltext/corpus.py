"""Corpus ingestion: tokenization, wordform counting, unit vectors, vocabulary.

Documents are bags of *wordforms* (surface tokens, no stemming).  Each
document is stored twice: as raw integer counts and as the Euclidean
unit-normalized vector that every downstream computation consumes.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CorpusIOError,
    DimensionMismatchError,
    EmptyClassError,
    EmptyDocumentError,
)

# A wordform is a maximal run of Unicode letters/digits, lowercased.
# Underscore, punctuation and whitespace are separators.
_WORDFORM_RE = re.compile(r"[^\W_]+")

UNIT_NORM_TOL = 1e-9


def tokenize(text: str) -> list[str]:
    """Lowercase `text` and split it into wordforms."""
    return _WORDFORM_RE.findall(text.lower())


class Vocabulary:
    """Bijective wordform <-> term-id mapping, built in first-encounter order.

    Single-writer while unfrozen; immutable (and freely shareable) once
    `freeze()` has been called.
    """

    __slots__ = ("_ids", "_forms", "_frozen")

    def __init__(self, forms: list[str] | None = None):
        self._forms: list[str] = list(forms) if forms else []
        self._ids: dict[str, int] = {f: i for i, f in enumerate(self._forms)}
        if len(self._ids) != len(self._forms):
            raise ValueError("duplicate wordforms in vocabulary")
        self._frozen = False

    def __len__(self) -> int:
        return len(self._forms)

    def __contains__(self, form: str) -> bool:
        return form in self._ids

    @property
    def frozen(self) -> bool:
        return self._frozen

    def freeze(self) -> "Vocabulary":
        self._frozen = True
        return self

    def add(self, form: str) -> int:
        """Return the id of `form`, assigning the next free id if unseen."""
        tid = self._ids.get(form)
        if tid is None:
            if self._frozen:
                raise RuntimeError("cannot add wordforms to a frozen vocabulary")
            tid = len(self._forms)
            self._ids[form] = tid
            self._forms.append(form)
        return tid

    def id_of(self, form: str) -> int | None:
        return self._ids.get(form)

    def form_of(self, tid: int) -> str:
        return self._forms[tid]

    def forms(self) -> list[str]:
        """All wordforms in id order (a copy)."""
        return list(self._forms)


class SparseVector:
    """Ordered (term-id, weight) pairs: strictly increasing ids, no stored zeros."""

    __slots__ = ("ids", "weights")

    def __init__(self, ids, weights):
        ids = np.asarray(ids, dtype=np.int64)
        weights = np.asarray(weights, dtype=np.float64)
        if ids.ndim != 1 or ids.shape != weights.shape:
            raise DimensionMismatchError("ids and weights must be 1-d and equal length")
        if ids.size:
            if ids[0] < 0:
                raise ValueError("term ids must be non-negative")
            if np.any(ids[1:] <= ids[:-1]):
                raise ValueError("term ids must be strictly increasing")
        if np.any(weights == 0.0):
            raise ValueError("zero weights must not be stored")
        self.ids = ids
        self.weights = weights

    @classmethod
    def empty(cls) -> "SparseVector":
        return cls(np.empty(0, np.int64), np.empty(0, np.float64))

    @classmethod
    def from_counts(cls, counts: dict[int, float]) -> "SparseVector":
        if not counts:
            return cls.empty()
        ids = np.array(sorted(counts), dtype=np.int64)
        weights = np.array([counts[int(i)] for i in ids], dtype=np.float64)
        return cls(ids, weights)

    def __len__(self) -> int:
        return int(self.ids.size)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseVector)
            and np.array_equal(self.ids, other.ids)
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self) -> str:
        pairs = ", ".join(f"{i}:{w:g}" for i, w in zip(self.ids, self.weights))
        return f"SparseVector({{{pairs}}})"

    def norm(self) -> float:
        return float(np.linalg.norm(self.weights))

    def pairs(self) -> list[tuple[int, float]]:
        return [(int(i), float(w)) for i, w in zip(self.ids, self.weights)]


@dataclass(frozen=True)
class Document:
    doc_id: str
    label: str | None
    raw_counts: SparseVector
    unit_vector: SparseVector


@dataclass
class LabeledDataset:
    vocabulary: Vocabulary
    documents: list[Document]
    classes: dict[str, list[str]]  # class id -> member doc ids
    _index: dict[str, Document] = field(init=False, repr=False)

    def __post_init__(self):
        self._index = {d.doc_id: d for d in self.documents}
        if len(self._index) != len(self.documents):
            raise ValueError("duplicate document ids")
        for cid, members in self.classes.items():
            if not members:
                raise EmptyClassError(f"class {cid!r} has no documents")
        for doc in self.documents:
            if doc.label is not None and doc.label not in self.classes:
                raise ValueError(f"document {doc.doc_id!r} references unknown class {doc.label!r}")

    def document(self, doc_id: str) -> Document:
        return self._index[doc_id]

    def class_documents(self, class_id: str) -> list[Document]:
        return [self._index[d] for d in self.classes[class_id]]


def count_wordforms(tokens, vocab: Vocabulary) -> SparseVector:
    """Count occurrences of each wordform as integer weights.

    With an unfrozen vocabulary new wordforms are assigned ids in
    first-encounter order; with a frozen one unknown wordforms are dropped.
    """
    counts: Counter[int] = Counter()
    if vocab.frozen:
        for tok in tokens:
            tid = vocab.id_of(tok)
            if tid is not None:
                counts[tid] += 1
    else:
        for tok in tokens:
            counts[vocab.add(tok)] += 1
    return SparseVector.from_counts(counts)


def normalize_counts(counts: SparseVector) -> SparseVector:
    """Divide every weight by the Euclidean norm of the whole vector."""
    if len(counts) == 0:
        raise EmptyDocumentError("cannot unit-normalize an empty vector")
    return SparseVector(counts.ids, counts.weights / counts.norm())


def to_dense(v: SparseVector, dim: int) -> np.ndarray:
    """Expand a sparse vector to a dense float array of length `dim`."""
    if v.ids.size and int(v.ids[-1]) >= dim:
        raise DimensionMismatchError(
            f"term id {int(v.ids[-1])} does not fit dimension {dim}"
        )
    out = np.zeros(dim, dtype=np.float64)
    out[v.ids] = v.weights
    return out


def make_document(doc_id: str, tokens, vocab: Vocabulary, label: str | None = None) -> Document:
    """Count and normalize `tokens` into a Document (raises on empty result)."""
    counts = count_wordforms(tokens, vocab)
    if len(counts) == 0:
        raise EmptyDocumentError(f"document {doc_id!r} has no countable wordforms")
    return Document(doc_id, label, counts, normalize_counts(counts))


def load_corpus(root, vocab: Vocabulary | None = None) -> LabeledDataset:
    """Load a `<root>/<class>/<doc>.txt` tree into a LabeledDataset.

    Classes and documents are enumerated in lexicographic path order so the
    resulting vocabulary and document order are bit-reproducible.  When a
    frozen `vocab` is supplied (inference against an existing model) unknown
    wordforms are dropped instead of added.
    """
    root = Path(root)
    if not root.is_dir():
        raise CorpusIOError(f"corpus root is not a directory: {root}")
    owns_vocab = vocab is None
    if owns_vocab:
        vocab = Vocabulary()
    class_dirs = sorted((p for p in root.iterdir() if p.is_dir()), key=lambda p: p.name)
    if not class_dirs:
        raise EmptyClassError(f"no class directories under {root}")

    documents: list[Document] = []
    classes: dict[str, list[str]] = {}
    for cdir in class_dirs:
        files = sorted((p for p in cdir.iterdir() if p.is_file()), key=lambda p: p.name)
        if not files:
            raise EmptyClassError(f"class directory has no documents: {cdir}")
        members: list[str] = []
        for path in files:
            try:
                text = path.read_text(encoding="utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                raise CorpusIOError(f"{path}: {exc}") from exc
            doc_id = f"{cdir.name}/{path.stem}"
            try:
                doc = make_document(doc_id, tokenize(text), vocab, label=cdir.name)
            except EmptyDocumentError as exc:
                raise EmptyDocumentError(f"{path}: {exc}") from exc
            documents.append(doc)
            members.append(doc_id)
        classes[cdir.name] = members
    if owns_vocab:
        vocab.freeze()
    return LabeledDataset(vocab, documents, classes)


def export_dataset(dataset: LabeledDataset) -> dict:
    """JSON-ready dict: vocabulary (index = term id), classes, raw count vectors."""
    return {
        "vocabulary": dataset.vocabulary.forms(),
        "classes": {c: list(m) for c, m in sorted(dataset.classes.items())},
        "documents": [
            {
                "doc_id": d.doc_id,
                "label": d.label,
                "raw_counts": [[int(i), float(w)] for i, w in zip(d.raw_counts.ids, d.raw_counts.weights)],
            }
            for d in dataset.documents
        ],
    }


def save_dataset(dataset: LabeledDataset, path) -> None:
    Path(path).write_text(json.dumps(export_dataset(dataset), indent=2, sort_keys=True) + "\n", encoding="utf-8")
