"""Seeded synthetic corpus generator.

Each class owns a disjoint block of signal wordforms; all classes share one
pool of noise wordforms.  Documents are multinomial draws with signal
outweighing noise 4:1 in expectation, which keeps the corpus separable by
the dot-product rule while leaving plenty of noise coordinates for the
mask-reduction search to zero out.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

# Tokens per document are drawn uniformly from this range.
DOC_LENGTH = (150, 251)
# Expected fraction of a document's tokens that are signal (vs shared noise).
SIGNAL_SHARE = 0.8
_WRAP = 10  # words per line in the generated files


def gen_synthetic(
    out_dir,
    classes: int = 4,
    docs_per_class: int = 25,
    signal_terms: int = 20,
    noise_terms: int = 40,
    seed: int = 42,
) -> Path:
    """Write a `<out>/<class>/<doc>.txt` corpus; identical bytes per seed."""
    if classes < 1 or docs_per_class < 1 or signal_terms < 1 or noise_terms < 0:
        raise ValueError("classes, docs_per_class, signal_terms must be >= 1; noise_terms >= 0")
    out = Path(out_dir)
    rng = np.random.default_rng(seed)
    noise_words = [f"noise{i:03d}" for i in range(noise_terms)]

    for c in range(classes):
        signal_words = [f"sig{c:02d}w{i:02d}" for i in range(signal_terms)]
        words = signal_words + noise_words
        probs = np.empty(len(words))
        if noise_terms:
            probs[:signal_terms] = SIGNAL_SHARE / signal_terms
            probs[signal_terms:] = (1.0 - SIGNAL_SHARE) / noise_terms
        else:
            probs[:] = 1.0 / signal_terms
        cdir = out / f"c{c:02d}"
        cdir.mkdir(parents=True, exist_ok=True)
        for d in range(docs_per_class):
            length = int(rng.integers(*DOC_LENGTH))
            counts = rng.multinomial(length, probs)
            tokens: list[str] = []
            for word, k in zip(words, counts):
                tokens.extend([word] * int(k))
            lines = [
                " ".join(tokens[i : i + _WRAP]) for i in range(0, len(tokens), _WRAP)
            ]
            (cdir / f"d{d:03d}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return out
