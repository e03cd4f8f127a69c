"""Command-line front end: train, classify, reduce, evaluate, gen-synthetic.

Exit codes: 0 success, 1 usage error, 2 data error.  Every command with the
same flags and seeds writes byte-identical files; wall-clock timings go to
stderr so the streams and files that matter stay reproducible.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import bayes as bayes_mod
from . import centroid as centroid_mod
from . import ga as ga_mod
from . import pc as pc_mod
from .corpus import Document, count_wordforms, load_corpus, normalize_counts, tokenize
from .errors import AllNullError, KltextError, InfeasibleClassError, TooFewDocsError
from .kl import IterationConfig
from .model_io import (
    ModelFile,
    atomic_write_text,
    genes_to_string,
    load_model,
    save_model,
    string_to_genes,
)
from .synthetic import gen_synthetic

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

CSV_HEADER = "class,dim,zeros,reduction_pct,containment,generations"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; this tool reserves 2 for
    # data errors and uses 1 for usage.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kltext", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="build a model from a labeled corpus directory")
    p.add_argument("corpus", type=Path)
    p.add_argument("out_model", type=Path)
    p.add_argument("-m", "--components", type=int, default=None,
                   help="components per class (default: min(class size, 16))")
    p.add_argument("--kl-tolerance", type=float, default=1e-9)
    p.add_argument("--kl-max-iter", type=int, default=100)
    p.add_argument("--smoothing", type=float, default=1.0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="classify a file or directory of files")
    p.add_argument("model", type=Path)
    p.add_argument("input", type=Path)
    p.add_argument("--method", choices=("pc", "cosine", "bayes"), default="pc")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("reduce", help="search per-class masks that zero coordinates")
    p.add_argument("model", type=Path)
    p.add_argument("corpus", type=Path)
    p.add_argument("out_model", type=Path)
    p.add_argument("--theta", type=float, default=0.9)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--population", type=int, default=64)
    p.add_argument("--mutation", type=float, default=0.2)
    p.add_argument("--generations", type=int, default=200)
    p.add_argument("--stagnation", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", type=Path, default=None,
                   help="reduction report path (default: <out_model>.reduction.csv)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("evaluate", help="accuracy and containment report")
    p.add_argument("model", type=Path)
    p.add_argument("corpus", type=Path)
    p.add_argument("--split-fraction", type=float, default=0.0,
                   help="per-class fraction of docs held out for scoring (0 = score the whole corpus)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=("pc", "cosine", "bayes"), default="pc")
    p.add_argument("--report", type=Path, default=None, help="write the JSON report here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gen-synthetic", help="write a seeded synthetic corpus")
    p.add_argument("out_dir", type=Path)
    p.add_argument("--classes", type=int, default=4)
    p.add_argument("--docs-per-class", type=int, default=25)
    p.add_argument("--signal-terms", type=int, default=20)
    p.add_argument("--noise-terms", type=int, default=40)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_gen_synthetic)

    return parser


def cmd_train(args) -> int:
    dataset = load_corpus(args.corpus)
    cfg = IterationConfig(max_iterations=args.kl_max_iter, tolerance=args.kl_tolerance)
    centroids = {}
    class_models = {}
    for cid in sorted(dataset.classes):
        docs = dataset.class_documents(cid)
        centroids[cid] = centroid_mod.class_centroid(docs, cid)
        m = args.components if args.components is not None else None
        if m is not None:
            m = min(m, len(docs))
        class_models[cid] = pc_mod.build_class_model(cid, docs, m=m, cfg=cfg)
    model = ModelFile(
        vocabulary=dataset.vocabulary,
        centroids=centroids,
        bayes=bayes_mod.fit_bayes(dataset, smoothing=args.smoothing),
        class_models=class_models,
        config={
            "components": args.components,
            "kl_max_iter": args.kl_max_iter,
            "kl_tolerance": args.kl_tolerance,
            "smoothing": args.smoothing,
        },
    )
    save_model(model, args.out_model)
    for cid in sorted(class_models):
        cm = class_models[cid]
        print(
            f"{cid}: docs={len(dataset.classes[cid])} wordforms={cm.term_map.size} "
            f"components={len(cm.basis)} iterations={sum(cm.basis.iterations)}"
        )
    return EXIT_OK


def _collect_inputs(path: Path) -> list[tuple[str, Path]]:
    if path.is_file():
        return [(path.stem, path)]
    pairs = [
        (p.relative_to(path).with_suffix("").as_posix(), p)
        for p in path.rglob("*")
        if p.is_file()
    ]
    return sorted(pairs)


def _format_scores(scores: dict[str, float]) -> str:
    return " ".join(f"{cid}={scores[cid]:.6f}" for cid in sorted(scores))


def cmd_classify(args) -> int:
    model = load_model(args.model)
    inputs = _collect_inputs(args.input)
    if not inputs:
        print(f"error: no input files under {args.input}", file=sys.stderr)
        return EXIT_DATA
    centroids = list(model.centroids.values())
    class_models = list(model.class_models.values())
    class_ids = sorted(model.centroids)
    failures = 0
    for doc_id, path in inputs:
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError):
            print(f"{doc_id}\t-\t{_format_scores({c: float('nan') for c in class_ids})}\tIOERROR")
            failures += 1
            continue
        counts = count_wordforms(tokenize(text), model.vocabulary)
        if len(counts) == 0:
            print(f"{doc_id}\t-\t{_format_scores({c: float('nan') for c in class_ids})}\tEMPTY")
            failures += 1
            continue
        doc = Document(doc_id, None, counts, normalize_counts(counts))
        diag = "-"
        if args.method == "cosine":
            scores = centroid_mod.cosine_scores(doc, centroids)
            winner = centroid_mod.cosine_classify(doc, centroids)
        elif args.method == "bayes":
            scores = bayes_mod.posterior(model.bayes, doc)
            winner = bayes_mod.bayes_classify(model.bayes, doc)
        else:
            try:
                report = pc_mod.classify(doc.unit_vector, class_models)
                scores, winner = report.per_class, report.winner
            except AllNullError:
                scores = {c: float("inf") for c in class_ids}
                winner, diag = "-", "ALLNULL"
                failures += 1
        print(f"{doc_id}\t{winner}\t{_format_scores(scores)}\t{diag}")
    return EXIT_DATA if failures == len(inputs) else EXIT_OK


def _class_local_arrays(model: ModelFile, dataset, cid: str):
    """Restrict a class's docs, own centroid and rival centroids to the
    nonzero coordinates of the class centroid."""
    cent = model.centroids[cid]
    term_ids = cent.vector.ids
    docs = np.stack(
        [pc_mod.restrict_to_terms(d.unit_vector, term_ids) for d in dataset.class_documents(cid)]
    )
    others = [
        pc_mod.restrict_to_terms(model.centroids[other].vector, term_ids)
        for other in sorted(model.centroids)
        if other != cid
    ]
    others_arr = np.stack(others) if others else np.empty((0, term_ids.size))
    return docs, cent.vector.weights.copy(), others_arr, int(term_ids.size)


def cmd_reduce(args) -> int:
    model = load_model(args.model)
    dataset = load_corpus(args.corpus, vocab=model.vocabulary)
    missing = sorted(set(model.centroids) - set(dataset.classes))
    if missing:
        print(f"error: corpus lacks classes {missing}", file=sys.stderr)
        return EXIT_DATA
    csv_path = args.csv or args.out_model.with_name(args.out_model.name + ".reduction.csv")
    rows = [CSV_HEADER]
    for cid in sorted(model.centroids):
        docs, own, others, dim = _class_local_arrays(model, dataset, cid)
        cfg = ga_mod.GaConfig(
            population_size=args.population,
            mutation_probability=args.mutation,
            max_generations=args.generations,
            stagnation_limit=args.stagnation,
            theta=args.theta,
            rho=args.rho,
            seed=args.seed,
        )
        try:
            result = ga_mod.run_ga(docs, own, others, cfg)
        except InfeasibleClassError as exc:
            print(
                f"warning: class {cid} is inseparable at theta={args.theta} "
                f"(containment {exc.containment:.6f}); no mask stored",
                file=sys.stderr,
            )
            rows.append(f"{cid},{dim},0,{0.0:.6f},{exc.containment:.6f},0")
            continue
        zeros = dim - int(result.best.sum())
        rows.append(
            f"{cid},{dim},{zeros},{100.0 * zeros / dim:.6f},"
            f"{result.containment:.6f},{result.generations_run}"
        )
        model.ga_masks[cid] = {
            "genes": genes_to_string(result.best),
            "best_fitness": result.best_fitness,
            "containment": result.containment,
            "reduction": result.reduction,
            "generations": result.generations_run,
            "config": {
                "population_size": cfg.population_size,
                "mutation_probability": cfg.mutation_probability,
                "max_generations": cfg.max_generations,
                "stagnation_limit": cfg.stagnation_limit,
                "theta": cfg.theta,
                "rho": cfg.rho,
                "seed": cfg.seed,
            },
        }
        print(f"{cid}: dim={dim} zeros={zeros} containment={result.containment:.6f} "
              f"generations={result.generations_run}")
    save_model(model, args.out_model)
    atomic_write_text(csv_path, "\n".join(rows) + "\n")
    return EXIT_OK


def _split_eval_ids(dataset, fraction: float, seed: int) -> dict[str, list[str]]:
    if fraction == 0.0:
        return {cid: list(members) for cid, members in dataset.classes.items()}
    rng = np.random.default_rng(seed)
    chosen: dict[str, list[str]] = {}
    for cid in sorted(dataset.classes):
        members = dataset.classes[cid]
        if len(members) < 2:
            raise TooFewDocsError(f"class {cid!r} has {len(members)} doc(s); cannot split")
        k = min(max(1, int(round(fraction * len(members)))), len(members) - 1)
        picks = rng.permutation(len(members))[:k]
        chosen[cid] = [members[i] for i in sorted(picks)]
    return chosen


def cmd_evaluate(args) -> int:
    t0 = time.perf_counter()
    model = load_model(args.model)
    dataset = load_corpus(args.corpus, vocab=model.vocabulary)
    missing = sorted(set(dataset.classes) - set(model.centroids))
    if missing:
        print(f"error: model lacks classes {missing}", file=sys.stderr)
        return EXIT_DATA
    eval_ids = _split_eval_ids(dataset, args.split_fraction, args.seed)
    t_load = time.perf_counter() - t0

    centroids = list(model.centroids.values())
    class_models = list(model.class_models.values())

    def predict(doc):
        if args.method == "cosine":
            return centroid_mod.cosine_classify(doc, centroids)
        if args.method == "bayes":
            return bayes_mod.bayes_classify(model.bayes, doc)
        try:
            return pc_mod.classify(doc.unit_vector, class_models).winner
        except AllNullError:
            return None

    t0 = time.perf_counter()
    confusion: dict[str, dict[str, int]] = {}
    per_class: dict[str, dict] = {}
    correct_total = 0
    n_total = 0
    error_docs = 0
    for cid in sorted(eval_ids):
        ids = eval_ids[cid]
        correct = 0
        for doc_id in ids:
            doc = dataset.document(doc_id)
            pred = predict(doc)
            if pred is None:
                error_docs += 1
                pred_key = "!error"
            else:
                pred_key = pred
                if pred == cid:
                    correct += 1
            confusion.setdefault(cid, {}).setdefault(pred_key, 0)
            confusion[cid][pred_key] += 1
        # containment is measured over the evaluated docs of this class only
        docs_local, own, others, dim = _class_local_arrays(model, dataset, cid)
        index = {d: i for i, d in enumerate(dataset.classes[cid])}
        subset = docs_local[[index[d] for d in ids]]
        mask_entry = model.ga_masks.get(cid)
        if mask_entry is not None:
            genes = string_to_genes(mask_entry["genes"])
            zeros = dim - int(genes.sum())
        else:
            genes = np.ones(dim, dtype=np.uint8)
            zeros = 0
        _, satisfied = ga_mod.is_allowed(genes, subset, own, others)
        per_class[cid] = {
            "accuracy": 100.0 * correct / len(ids),
            "containment": satisfied / len(ids),
            "correct": correct,
            "eval_docs": len(ids),
            "dimension_before": dim,
            "dimension_after": dim - zeros,
            "reduction_percent": 100.0 * zeros / dim,
        }
        correct_total += correct
        n_total += len(ids)
    t_eval = time.perf_counter() - t0

    report = {
        "config": {
            "method": args.method,
            "split_fraction": args.split_fraction,
            "seed": args.seed,
        },
        "overall_accuracy": 100.0 * correct_total / n_total,
        "classes": per_class,
        "confusion": confusion,
        "error_docs": error_docs,
    }
    if args.report is not None:
        atomic_write_text(args.report, json.dumps(report, indent=2, sort_keys=True) + "\n")

    print("class      docs  accuracy    containment  dim_before  dim_after  reduction%")
    for cid in sorted(per_class):
        row = per_class[cid]
        print(
            f"{cid:<10} {row['eval_docs']:>4}  {row['accuracy']:>9.6f}  "
            f"{row['containment']:>11.6f}  {row['dimension_before']:>10}  "
            f"{row['dimension_after']:>9}  {row['reduction_percent']:>9.6f}"
        )
    print(f"overall accuracy: {report['overall_accuracy']:.6f}")
    print(f"timings: load={t_load:.3f}s evaluate={t_eval:.3f}s", file=sys.stderr)
    return EXIT_OK


def cmd_gen_synthetic(args) -> int:
    out = gen_synthetic(
        args.out_dir,
        classes=args.classes,
        docs_per_class=args.docs_per_class,
        signal_terms=args.signal_terms,
        noise_terms=args.noise_terms,
        seed=args.seed,
    )
    print(f"wrote {args.classes} classes x {args.docs_per_class} docs under {out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (KltextError, OSError, ValueError) as exc:
        # ValueError covers malformed model files (bad JSON, wrong version)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
