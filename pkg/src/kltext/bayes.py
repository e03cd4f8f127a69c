"""Bayes baseline over per-class term counters, plus full-covariance tools.

The text likelihood is a smoothed multinomial over term occurrences,
evaluated in log space (raw products underflow for documents of realistic
length).  The Gaussian density and full-covariance Mahalanobis distance are
exposed for small dimensions only, where they double as numerical oracles
for the component-basis classifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import Document, LabeledDataset
from .errors import DimensionMismatchError, SingularCovarianceError


@dataclass
class BayesModel:
    """Per-class priors and additive-smoothed term statistics."""

    priors: dict[str, float]
    counts: dict[str, dict[int, int]]  # class -> term id -> occurrences
    doc_counts: dict[str, int]
    term_totals: dict[str, int]
    smoothing: float
    vocab_size: int

    def classes(self) -> list[str]:
        return sorted(self.priors)


def fit_bayes(dataset: LabeledDataset, smoothing: float = 1.0) -> BayesModel:
    """Aggregate raw term counts per class; priors are document-count fractions."""
    if not smoothing > 0:
        raise ValueError("smoothing must be positive")
    counts: dict[str, dict[int, int]] = {}
    doc_counts: dict[str, int] = {}
    term_totals: dict[str, int] = {}
    for cid in dataset.classes:
        per_term: dict[int, int] = {}
        total = 0
        docs = dataset.class_documents(cid)
        for doc in docs:
            for tid, w in zip(doc.raw_counts.ids, doc.raw_counts.weights):
                k = int(round(w))
                per_term[int(tid)] = per_term.get(int(tid), 0) + k
                total += k
        counts[cid] = per_term
        doc_counts[cid] = len(docs)
        term_totals[cid] = total
    n_docs = sum(doc_counts.values())
    priors = {cid: doc_counts[cid] / n_docs for cid in doc_counts}
    return BayesModel(priors, counts, doc_counts, term_totals, smoothing, len(dataset.vocabulary))


def log_scores(model: BayesModel, doc: Document) -> dict[str, float]:
    """log prior + log likelihood per class (unnormalized posterior)."""
    s = model.smoothing
    v = model.vocab_size
    scores: dict[str, float] = {}
    for cid in model.classes():
        per_term = model.counts[cid]
        denom = math.log(model.term_totals[cid] + s * v)
        total = math.log(model.priors[cid])
        for tid, w in zip(doc.raw_counts.ids, doc.raw_counts.weights):
            total += float(w) * (math.log(per_term.get(int(tid), 0) + s) - denom)
        scores[cid] = total
    return scores


def posterior(model: BayesModel, doc: Document) -> dict[str, float]:
    """Normalized class posterior; sums to 1 within float error."""
    scores = log_scores(model, doc)
    peak = max(scores.values())
    unnorm = {cid: math.exp(t - peak) for cid, t in scores.items()}
    z = sum(unnorm.values())
    return {cid: p / z for cid, p in unnorm.items()}


def bayes_classify(model: BayesModel, doc: Document) -> str:
    """Argmax of the posterior; ties go to the lexicographically smallest class."""
    post = posterior(model, doc)
    best_id = None
    best_p = -np.inf
    for cid in sorted(post):
        if post[cid] > best_p:
            best_id, best_p = cid, post[cid]
    return best_id


@dataclass
class CovarianceModel:
    """Mean vector and symmetric covariance matrix of one class."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.covariance = np.asarray(self.covariance, dtype=np.float64)
        n = self.mean.shape[0]
        if self.mean.ndim != 1 or self.covariance.shape != (n, n):
            raise DimensionMismatchError(
                f"covariance shape {self.covariance.shape} does not match mean length {n}"
            )
        if np.max(np.abs(self.covariance - self.covariance.T), initial=0.0) > 1e-9:
            raise ValueError("covariance must be symmetric within 1e-9")

    @property
    def dimension(self) -> int:
        return int(self.mean.shape[0])


def _checked_eigvals(model: CovarianceModel) -> np.ndarray:
    evals = np.linalg.eigvalsh(model.covariance)
    largest = float(evals[-1])
    if largest <= 0.0 or float(np.prod(evals)) < 1e-12 * largest:
        raise SingularCovarianceError(
            "covariance is singular or nearly so; its inverse is meaningless"
        )
    return evals


def _quadratic_form(x, model: CovarianceModel) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != model.mean.shape:
        raise DimensionMismatchError(f"x shape {x.shape} != mean shape {model.mean.shape}")
    diff = x - model.mean
    return float(diff @ np.linalg.solve(model.covariance, diff))


def gaussian_density(x, model: CovarianceModel) -> float:
    """Multivariate normal density of `x` under the model."""
    evals = _checked_eigvals(model)
    q = _quadratic_form(x, model)
    n = model.dimension
    return math.exp(-0.5 * q) / math.sqrt((2.0 * math.pi) ** n * float(np.prod(evals)))


def mahalanobis_full(x, model: CovarianceModel) -> float:
    """Covariance-weighted distance sqrt((x-mu) Sigma^-1 (x-mu)^T)."""
    _checked_eigvals(model)
    return math.sqrt(max(_quadratic_form(x, model), 0.0))
