"""Mahalanobis classification in each class's principal-component basis.

Per class we keep the decomposition of its documents, the per-component
coefficient sums, and the unit central vector.  A query is projected onto
the components; since the inverse covariance is diagonal there with entries
1/||Y^k||^2, the distance reduces to the squared difference between the
query's and the class's normalized projection coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Document, SparseVector
from .errors import (
    AllNullError,
    DimensionMismatchError,
    EmptyClassError,
    NullProjectionError,
    ZeroDataError,
)
from .kl import IterationConfig, PrincipalBasis, decompose

# Components this much weaker than the leading one carry no usable signal
# and would make the coefficient division unstable.
COMPONENT_FLOOR = 1e-12
# A projection this small relative to the query means the query lies outside
# the class subspace entirely.
NULL_PROJECTION_TOL = 1e-10

DEFAULT_MAX_COMPONENTS = 16


@dataclass
class ClassModel:
    """Everything needed to score a query against one class."""

    class_id: str
    basis: PrincipalBasis
    lam: np.ndarray  # per-component coefficient sums
    central_unit: np.ndarray  # unit vector of the summed reconstructions
    term_map: np.ndarray  # global term ids backing the class-local coordinates


@dataclass(frozen=True)
class DistanceReport:
    per_class: dict[str, float]
    winner: str


def restrict_to_terms(v: SparseVector, term_map: np.ndarray) -> np.ndarray:
    """Dense class-local view of `v`: coordinates outside `term_map` are dropped."""
    out = np.zeros(term_map.size, dtype=np.float64)
    if v.ids.size == 0 or term_map.size == 0:
        return out
    pos = np.searchsorted(term_map, v.ids)
    pos_clipped = np.minimum(pos, term_map.size - 1)
    hit = term_map[pos_clipped] == v.ids
    out[pos_clipped[hit]] = v.weights[hit]
    return out


def build_class_model(
    class_id: str,
    docs: Sequence[Document],
    m: int | None = None,
    cfg: IterationConfig | None = None,
) -> ClassModel:
    """Decompose a class's unit document vectors over its own term support."""
    if not docs:
        raise EmptyClassError(f"class {class_id!r} has no documents")
    if m is None:
        m = min(len(docs), DEFAULT_MAX_COMPONENTS)
    if not 1 <= m <= len(docs):
        raise ValueError(f"m must be in 1..{len(docs)}, got {m}")

    term_map = np.unique(np.concatenate([d.unit_vector.ids for d in docs]))
    data = np.stack([restrict_to_terms(d.unit_vector, term_map) for d in docs])
    basis = decompose(data, m, cfg)

    # Rank-deficiency guard: drop components too weak to divide by.
    keep = int(np.sum(basis.norms_sq >= COMPONENT_FLOOR * basis.norms_sq[0]))
    if keep < len(basis):
        basis = PrincipalBasis(
            components=basis.components[:keep],
            alpha=basis.alpha[:keep],
            norms_sq=basis.norms_sq[:keep],
            source_count=basis.source_count,
            dimension=basis.dimension,
            iterations=basis.iterations[:keep],
            rank_deficient=True,
        )

    lam = basis.alpha.sum(axis=1)
    xhat = lam @ basis.components
    norm = float(np.linalg.norm(xhat))
    if norm == 0.0:
        raise ZeroDataError(f"class {class_id!r} has a vanishing central vector")
    return ClassModel(class_id, basis, lam, xhat / norm, term_map)


def central_reconstruction(model: ClassModel) -> np.ndarray:
    """Sum of every row's reconstruction; the unnormalized central vector."""
    return model.lam @ model.basis.components


def project(z, basis: PrincipalBasis) -> np.ndarray:
    """Per-component projection coefficients <z, Y^k> / <Y^k, Y^k>."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (basis.dimension,):
        raise DimensionMismatchError(f"query shape {z.shape} != basis dimension {basis.dimension}")
    return (basis.components @ z) / basis.norms_sq


def pc_mahalanobis(z, model: ClassModel) -> float:
    """Distance between `z` and the class in the component basis.

    Both the query's and the class's coefficient vectors are normalized by
    the norm of their component expansions (diagonal covariance makes that
    sqrt(sum c_k^2 ||Y^k||^2)), so the result is scale-invariant in z.
    """
    z = np.asarray(z, dtype=np.float64)
    beta = project(z, model.basis)
    norms_sq = model.basis.norms_sq
    beta_energy = float((beta * beta) @ norms_sq)
    if beta_energy <= (NULL_PROJECTION_TOL * float(np.linalg.norm(z))) ** 2:
        raise NullProjectionError(
            f"query has no projection onto class {model.class_id!r}"
        )
    lam_energy = float((model.lam * model.lam) @ norms_sq)
    b = beta / np.sqrt(beta_energy)
    ell = model.lam / np.sqrt(lam_energy)
    diff = b - ell
    return float(diff @ diff)


def classify(z, models: Sequence[ClassModel]) -> DistanceReport:
    """Score `z` against every class model; winner is the argmin distance.

    `z` may be a SparseVector over the global vocabulary or a dense global
    vector; either way it is restricted to each class's own term map first.
    Classes the query cannot project onto get distance +inf; if that happens
    for every class, AllNullError is raised so callers can fall back to the
    cosine rule.
    """
    if not models:
        raise EmptyClassError("classify needs at least one class model")
    per_class: dict[str, float] = {}
    winner = None
    best = np.inf
    for model in sorted(models, key=lambda m: m.class_id):
        if isinstance(z, SparseVector):
            local = restrict_to_terms(z, model.term_map)
        else:
            local = np.asarray(z, dtype=np.float64)[model.term_map]
        try:
            dist = pc_mahalanobis(local, model)
        except NullProjectionError:
            dist = np.inf
        per_class[model.class_id] = dist
        if dist < best:
            winner, best = model.class_id, dist
    if winner is None:
        raise AllNullError("query projects onto no class basis")
    return DistanceReport(per_class, winner)
