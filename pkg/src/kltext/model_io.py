"""Versioned JSON model file.

One human-inspectable document holds the vocabulary, class centroids, Bayes
statistics, per-class component bases and (after reduction) the GA masks.
Dense component arrays are the accepted cost at desk scale.  Files are
written atomically (temp + rename) and serialize identically for identical
models, so reruns with the same seed produce byte-identical files.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bayes import BayesModel
from .centroid import Centroid
from .corpus import SparseVector, Vocabulary
from .kl import PrincipalBasis
from .pc import ClassModel

FORMAT_VERSION = 1


@dataclass
class ModelFile:
    vocabulary: Vocabulary
    centroids: dict[str, Centroid]
    bayes: BayesModel
    class_models: dict[str, ClassModel]
    ga_masks: dict[str, dict] = field(default_factory=dict)
    config: dict = field(default_factory=dict)


def genes_to_string(genes: np.ndarray) -> str:
    return "".join("1" if g else "0" for g in genes)


def string_to_genes(s: str) -> np.ndarray:
    return np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0")


def _sparse_to_pairs(v: SparseVector) -> list[list]:
    return [[int(i), float(w)] for i, w in zip(v.ids, v.weights)]


def _pairs_to_sparse(pairs) -> SparseVector:
    if not pairs:
        return SparseVector.empty()
    ids, weights = zip(*pairs)
    return SparseVector(np.array(ids, np.int64), np.array(weights, np.float64))


def model_to_dict(model: ModelFile) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "vocabulary": model.vocabulary.forms(),
        "centroids": {
            cid: {"terms": _sparse_to_pairs(c.vector), "support": c.support}
            for cid, c in sorted(model.centroids.items())
        },
        "bayes": {
            "priors": {c: float(p) for c, p in sorted(model.bayes.priors.items())},
            "counts": {
                c: [[int(t), int(n)] for t, n in sorted(terms.items())]
                for c, terms in sorted(model.bayes.counts.items())
            },
            "doc_counts": dict(sorted(model.bayes.doc_counts.items())),
            "term_totals": dict(sorted(model.bayes.term_totals.items())),
            "smoothing": float(model.bayes.smoothing),
            "vocab_size": int(model.bayes.vocab_size),
        },
        "class_models": {
            cid: {
                "term_map": [int(t) for t in cm.term_map],
                "components": cm.basis.components.tolist(),
                "coefficients": cm.basis.alpha.tolist(),
                "norms_sq": cm.basis.norms_sq.tolist(),
                "iterations": list(cm.basis.iterations),
                "rank_deficient": bool(cm.basis.rank_deficient),
                "lambda": cm.lam.tolist(),
                "central_unit": cm.central_unit.tolist(),
            }
            for cid, cm in sorted(model.class_models.items())
        },
        "ga_masks": {cid: m for cid, m in sorted(model.ga_masks.items())},
        "config": model.config,
    }


def model_from_dict(d: dict) -> ModelFile:
    version = d.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model format version: {version!r}")
    vocab = Vocabulary(d["vocabulary"])
    vocab.freeze()
    centroids = {
        cid: Centroid(cid, _pairs_to_sparse(c["terms"]), int(c["support"]))
        for cid, c in d["centroids"].items()
    }
    b = d["bayes"]
    bayes = BayesModel(
        priors={c: float(p) for c, p in b["priors"].items()},
        counts={c: {int(t): int(n) for t, n in pairs} for c, pairs in b["counts"].items()},
        doc_counts={c: int(n) for c, n in b["doc_counts"].items()},
        term_totals={c: int(n) for c, n in b["term_totals"].items()},
        smoothing=float(b["smoothing"]),
        vocab_size=int(b["vocab_size"]),
    )
    class_models = {}
    for cid, cm in d["class_models"].items():
        components = np.array(cm["components"], dtype=np.float64)
        alpha = np.array(cm["coefficients"], dtype=np.float64)
        basis = PrincipalBasis(
            components=components,
            alpha=alpha,
            norms_sq=np.array(cm["norms_sq"], dtype=np.float64),
            source_count=alpha.shape[1] if alpha.size else 0,
            dimension=components.shape[1] if components.size else 0,
            iterations=[int(i) for i in cm["iterations"]],
            rank_deficient=bool(cm["rank_deficient"]),
        )
        class_models[cid] = ClassModel(
            class_id=cid,
            basis=basis,
            lam=np.array(cm["lambda"], dtype=np.float64),
            central_unit=np.array(cm["central_unit"], dtype=np.float64),
            term_map=np.array(cm["term_map"], dtype=np.int64),
        )
    for cid, cm in class_models.items():
        if cm.term_map.size and int(cm.term_map[-1]) >= len(vocab):
            raise ValueError(f"class {cid!r} references term ids beyond the vocabulary")
    return ModelFile(
        vocabulary=vocab,
        centroids=centroids,
        bayes=bayes,
        class_models=class_models,
        ga_masks=dict(d.get("ga_masks", {})),
        config=dict(d.get("config", {})),
    )


def dumps_model(model: ModelFile) -> str:
    return json.dumps(model_to_dict(model), indent=2, sort_keys=True) + "\n"


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def save_model(model: ModelFile, path) -> None:
    atomic_write_text(path, dumps_model(model))


def load_model(path) -> ModelFile:
    with open(path, encoding="utf-8") as handle:
        return model_from_dict(json.load(handle))
