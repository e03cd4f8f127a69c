"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; plain `pytest` runs the same assertions.
"""

import json
import time
from types import SimpleNamespace

import numpy as np
import pytest

from kltext.bayes import CovarianceModel, mahalanobis_full, posterior
from kltext.cli import main
from kltext.corpus import load_corpus
from kltext.ga import ENERGY_TIEBREAK, GaConfig, is_allowed, run_ga
from kltext.kl import IterationConfig, decompose, reconstruct
from kltext.model_io import load_model
from kltext.pc import central_reconstruction, pc_mahalanobis, restrict_to_terms

KL_CFG = IterationConfig(max_iterations=5000, tolerance=1e-13)


# ----------------------------------------------------------------------
# criteria 1 + 2: iterative decomposition against a dense eigensolver
# ----------------------------------------------------------------------


@pytest.fixture(scope="module")
def kl_cases():
    """20 seeded random matrices with clearly distinct Gram eigenvalues,
    decomposed to full rank, plus the independent eigendecomposition."""
    t0 = time.perf_counter()
    cases = []
    seed = 0
    rng_count = 0
    while len(cases) < 20:
        rng = np.random.default_rng(10_000 + seed)
        seed += 1
        rng_count += 1
        n = int(rng.integers(3, 11))
        d = int(rng.integers(max(4, n), 17))
        x = rng.normal(size=(n, d))
        evals = np.sort(np.linalg.eigvalsh(x @ x.T))[::-1]
        gaps = -np.diff(evals) / evals[0]
        if evals[-1] < 1e-3 * evals[0] or gaps.min() < 5e-3:
            continue  # not "distinct" enough for a clean oracle comparison
        basis = decompose(x, n, KL_CFG)
        cases.append(SimpleNamespace(x=x, n=n, d=d, evals=evals, basis=basis))
    elapsed = time.perf_counter() - t0
    assert rng_count < 200, "eigengap filter rejected implausibly many draws"
    return SimpleNamespace(cases=cases, elapsed=elapsed)


def test_criterion_1_kl_matches_eigensolver_oracle(kl_cases):
    for case in kl_cases.cases:
        np.testing.assert_allclose(case.basis.norms_sq, case.evals, rtol=1e-5)
        for m in range(1, case.n):
            err = sum(
                float(np.sum((case.x[v] - reconstruct(case.basis, m, v)) ** 2))
                for v in range(case.n)
            )
            tail = float(case.evals[m:].sum())
            assert abs(err - tail) <= 1e-4 * tail
    assert kl_cases.elapsed < 5.0
    print(
        f"\n[criterion 1] PASS - 20 decompositions match the dense eigensolver "
        f"(eigenvalues 1e-5 rel, truncation errors 1e-4 rel) in {kl_cases.elapsed:.2f}s"
    )


def test_criterion_2_decomposition_property_suite(kl_cases):
    for case in kl_cases.cases:
        basis = case.basis
        total = float(np.sum(case.x * case.x))
        full = np.stack([reconstruct(basis, case.n, v) for v in range(case.n)])
        # Parseval: energy of the reconstructions equals energy of the components
        recon_energy = float(np.sum(full * full))
        assert abs(recon_energy - basis.norms_sq.sum()) <= 1e-6 * total
        # coefficient vectors form an orthonormal system
        gram = basis.alpha @ basis.alpha.T
        np.testing.assert_allclose(gram, np.eye(case.n), atol=1e-6)
        # full-rank residual vanishes
        residual = np.linalg.norm(case.x - full)
        assert residual <= 1e-6 * np.sqrt(total)
    print(
        "\n[criterion 2] PASS - Parseval 1e-6, coefficient orthonormality 1e-6, "
        "full-rank residual 1e-6 on all 20 decompositions"
    )


# ----------------------------------------------------------------------
# criterion 3: GA against exhaustive mask enumeration
# ----------------------------------------------------------------------


def _ga_instance(seed, theta=0.9):
    """Deterministic feasible instance: docs clustered on a positive centroid,
    rivals on sparse sub-unit directions (as truncated foreign centroids are)."""
    rng = np.random.default_rng(seed)
    while True:
        length = int(rng.integers(6, 13))
        n_docs = int(rng.integers(5, 11))
        base = rng.uniform(0.2, 1.0, length)
        docs = base * rng.uniform(0.7, 1.3, (n_docs, length)) + rng.uniform(0.0, 0.1, (n_docs, length))
        docs /= np.linalg.norm(docs, axis=1, keepdims=True)
        centroid = docs.sum(axis=0)
        centroid /= np.linalg.norm(centroid)
        n_rivals = int(rng.integers(1, 3))
        others = rng.uniform(0.0, 1.0, (n_rivals, length)) * (rng.random((n_rivals, length)) < 0.35) + 0.01
        others /= np.linalg.norm(others, axis=1, keepdims=True)
        others *= rng.uniform(0.3, 0.8, (n_rivals, 1))
        _, count = is_allowed(np.ones(length, dtype=np.uint8), docs, centroid, others)
        if count / n_docs >= theta:
            return docs, centroid, others


def _exhaustive_best_fitness(docs, centroid, others, cfg):
    """Enumerate every mask; evaluated in one vectorized sweep, independent of
    the per-mask code path the GA itself uses."""
    length = centroid.size
    n_masks = 2**length
    bits = ((np.arange(n_masks)[:, None] >> np.arange(length)) & 1).astype(np.float64)
    cent_norm = np.sqrt(bits @ (centroid**2))
    own_dot = bits @ (docs * centroid).T
    doc_energy = bits @ (docs**2).T
    with np.errstate(divide="ignore", invalid="ignore"):
        own = own_dot / cent_norm[:, None]
    rival = np.full((n_masks, docs.shape[0]), -np.inf)
    for o in others:
        rival = np.maximum(rival, bits @ (docs * o).T)
    ok = (cent_norm[:, None] > 0) & (doc_energy > 0)
    satisfied = (ok & (own > rival)).sum(axis=1)
    containment = satisfied / docs.shape[0]
    reduction = 1.0 - bits.sum(axis=1) / length
    retained = doc_energy.sum(axis=1) / float(np.sum(docs**2))
    feasible = cfg.theta + cfg.rho * reduction + (1 - cfg.rho) * retained * ENERGY_TIEBREAK
    return float(np.where(containment < cfg.theta, containment, feasible).max())


def test_criterion_3_ga_attains_exhaustive_optimum():
    t0 = time.perf_counter()
    hits = 0
    for trial in range(100):
        docs, centroid, others = _ga_instance(20_000 + trial)
        cfg = GaConfig(
            population_size=32,
            mutation_probability=0.3,
            max_generations=250,
            stagnation_limit=60,
            theta=0.9,
            rho=0.5,
            seed=777 + trial,
        )
        result = run_ga(docs, centroid, others, cfg)
        oracle = _exhaustive_best_fitness(docs, centroid, others, cfg)
        if abs(result.best_fitness - oracle) <= 1e-9:
            hits += 1
    elapsed = time.perf_counter() - t0
    assert hits >= 95
    assert elapsed < 60.0
    print(
        f"\n[criterion 3] PASS - GA reached the exhaustive optimum on {hits}/100 "
        f"instances (threshold 95) in {elapsed:.1f}s"
    )


# ----------------------------------------------------------------------
# criteria 4-7 share one synthetic corpus and trained/reduced models
# ----------------------------------------------------------------------


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("acceptance")
    corpus = root / "corpus"
    model = root / "model.json"
    reduced = root / "reduced.json"
    csv = root / "reduction.csv"
    t0 = time.perf_counter()
    assert main(["gen-synthetic", str(corpus), "--classes", "4", "--docs-per-class", "25",
                 "--signal-terms", "20", "--noise-terms", "40", "--seed", "42"]) == 0
    assert main(["train", str(corpus), str(model)]) == 0
    assert main(["reduce", str(model), str(corpus), str(reduced),
                 "--theta", "0.9", "--seed", "7", "--csv", str(csv)]) == 0
    elapsed = time.perf_counter() - t0
    return SimpleNamespace(
        root=root, corpus=corpus, model=model, reduced=reduced, csv=csv, elapsed=elapsed
    )


def _csv_rows(path):
    header, *rows = path.read_text().splitlines()
    keys = header.split(",")
    return [dict(zip(keys, row.split(","))) for row in rows]


def test_criterion_4_reduction_band_at_desk_scale(workspace):
    rows = _csv_rows(workspace.csv)
    assert len(rows) == 4
    reductions = [float(r["reduction_pct"]) for r in rows]
    for row in rows:
        assert float(row["containment"]) >= 0.9
        assert float(row["reduction_pct"]) >= 10.0
    assert max(reductions) >= 30.0
    assert workspace.elapsed < 120.0
    print(
        f"\n[criterion 4] PASS - every class containment >= 90% with reduction "
        f"{min(reductions):.1f}..{max(reductions):.1f}% (>=10% all, >=30% best) "
        f"in {workspace.elapsed:.1f}s"
    )


def test_criterion_5_classifier_sanity(workspace):
    accuracies = {}
    for method in ("cosine", "bayes", "pc"):
        report = workspace.root / f"report_{method}.json"
        assert main(["evaluate", str(workspace.model), str(workspace.corpus),
                     "--method", method, "--report", str(report)]) == 0
        accuracies[method] = json.loads(report.read_text())["overall_accuracy"]
        assert accuracies[method] >= 95.0

    model = load_model(workspace.model)
    dataset = load_corpus(workspace.corpus, vocab=model.vocabulary)
    worst_self = 0.0
    worst_scale = 0.0
    for cid, cm in model.class_models.items():
        xhat = central_reconstruction(cm)
        worst_self = max(worst_self, pc_mahalanobis(xhat, cm))
        probes = [xhat] + [
            restrict_to_terms(d.unit_vector, cm.term_map)
            for d in dataset.class_documents(cid)[:3]
        ]
        for z in probes:
            base = pc_mahalanobis(z, cm)
            for c in (0.5, 3.0):
                worst_scale = max(worst_scale, abs(pc_mahalanobis(c * z, cm) - base))
    assert worst_self <= 1e-9
    assert worst_scale <= 1e-9
    print(
        f"\n[criterion 5] PASS - accuracies {accuracies} (>=95% each); "
        f"self-distance <= {worst_self:.1e}; scale drift <= {worst_scale:.1e}"
    )


def test_criterion_6_bayes_correctness(workspace):
    model = load_model(workspace.model)
    dataset = load_corpus(workspace.corpus, vocab=model.vocabulary)
    worst = 0.0
    for doc in dataset.documents:
        worst = max(worst, abs(sum(posterior(model.bayes, doc).values()) - 1.0))
    assert worst <= 1e-9

    rng = np.random.default_rng(99)
    worst_m = 0.0
    for _ in range(100):
        dim = int(rng.integers(1, 9))
        mean = rng.normal(size=dim)
        x = rng.normal(size=dim)
        cov_model = CovarianceModel(mean, np.eye(dim))
        worst_m = max(
            worst_m, abs(mahalanobis_full(x, cov_model) - float(np.linalg.norm(x - mean)))
        )
    assert worst_m <= 1e-12
    print(
        f"\n[criterion 6] PASS - posterior sums off by <= {worst:.1e} over "
        f"{len(dataset.documents)} docs; identity-covariance distance off by <= {worst_m:.1e}"
    )


def test_criterion_7_byte_identical_reruns(workspace):
    model2 = workspace.root / "model2.json"
    assert main(["train", str(workspace.corpus), str(model2)]) == 0
    assert model2.read_bytes() == workspace.model.read_bytes()

    reduced2 = workspace.root / "reduced2.json"
    csv2 = workspace.root / "reduction2.csv"
    assert main(["reduce", str(workspace.model), str(workspace.corpus), str(reduced2),
                 "--theta", "0.9", "--seed", "7", "--csv", str(csv2)]) == 0
    assert reduced2.read_bytes() == workspace.reduced.read_bytes()
    assert csv2.read_bytes() == workspace.csv.read_bytes()

    reports = []
    for tag in ("a", "b"):
        path = workspace.root / f"determinism_{tag}.json"
        assert main(["evaluate", str(workspace.reduced), str(workspace.corpus),
                     "--split-fraction", "0.3", "--seed", "5", "--report", str(path)]) == 0
        reports.append(path.read_bytes())
    assert reports[0] == reports[1]
    print(
        "\n[criterion 7] PASS - train, reduce and evaluate reruns produced "
        "byte-identical model, CSV and report files"
    )
