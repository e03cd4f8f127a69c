"""Class centroids and the dot-product separation test.

A centroid is the unit-normalized coordinate-wise sum of a class's unit
document vectors.  A document is *separated* when it is strictly closer (by
inner product) to its own class centroid than to every other class centroid;
ties are broken toward the lexicographically smallest class id so degenerate
symmetric data stays deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .corpus import Document, LabeledDataset, SparseVector
from .errors import EmptyClassError


@dataclass(frozen=True)
class Centroid:
    class_id: str
    vector: SparseVector  # unit-normalized
    support: int  # number of unique wordforms backing the centroid


def _sparse_sum(vectors: Iterable[SparseVector]) -> SparseVector:
    vectors = list(vectors)
    ids = np.concatenate([v.ids for v in vectors])
    weights = np.concatenate([v.weights for v in vectors])
    uniq, inverse = np.unique(ids, return_inverse=True)
    summed = np.bincount(inverse, weights=weights, minlength=uniq.size)
    keep = summed != 0.0
    return SparseVector(uniq[keep], summed[keep])


def _unit(v: SparseVector) -> SparseVector:
    return SparseVector(v.ids, v.weights / np.linalg.norm(v.weights))


def class_centroid(docs: Sequence[Document], class_id: str | None = None) -> Centroid:
    """Sum the unit vectors of `docs` and renormalize to unit length."""
    if not docs:
        raise EmptyClassError("cannot build a centroid from zero documents")
    if class_id is None:
        class_id = docs[0].label or ""
    vector = _unit(_sparse_sum(d.unit_vector for d in docs))
    return Centroid(class_id, vector, len(vector))


def superclass_central_vector(centroids: Sequence[Centroid], class_id: str = "*") -> Centroid:
    """Central vector of a set of classes: union support, coordinates summed,
    renormalized to unit length."""
    if not centroids:
        raise EmptyClassError("cannot build a central vector from zero centroids")
    vector = _unit(_sparse_sum(c.vector for c in centroids))
    return Centroid(class_id, vector, len(vector))


def dot(v: SparseVector, w: SparseVector) -> float:
    """Scalar product over the common term ids."""
    _, iv, iw = np.intersect1d(v.ids, w.ids, assume_unique=True, return_indices=True)
    return float(v.weights[iv] @ w.weights[iw])


def cosine_classify(doc: Document, centroids: Sequence[Centroid]) -> str:
    """Class whose centroid has the maximum dot product with the document.

    Ties go to the lexicographically smallest class id.
    """
    if not centroids:
        raise EmptyClassError("cosine_classify needs at least one centroid")
    best_id = None
    best_score = -np.inf
    for cent in sorted(centroids, key=lambda c: c.class_id):
        score = dot(doc.unit_vector, cent.vector)
        if score > best_score:
            best_id, best_score = cent.class_id, score
    return best_id


def cosine_scores(doc: Document, centroids: Sequence[Centroid]) -> dict[str, float]:
    """Dot product of the document against every centroid."""
    return {c.class_id: dot(doc.unit_vector, c.vector) for c in centroids}


def separation_holds(dataset: LabeledDataset, centroids: Sequence[Centroid]) -> dict[str, bool]:
    """Per document: is it strictly closer to its own centroid than to all others?"""
    by_class = {c.class_id: c for c in centroids}
    missing = set(dataset.classes) - set(by_class)
    if missing:
        raise EmptyClassError(f"centroids missing for classes: {sorted(missing)}")
    result: dict[str, bool] = {}
    for doc in dataset.documents:
        own = dot(doc.unit_vector, by_class[doc.label].vector)
        result[doc.doc_id] = all(
            own > dot(doc.unit_vector, cent.vector)
            for cid, cent in by_class.items()
            if cid != doc.label
        )
    return result
