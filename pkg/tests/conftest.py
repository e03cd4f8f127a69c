import pytest

from kltext.corpus import LabeledDataset, Vocabulary, make_document


def build_dataset(class_tokens: dict[str, list[list[str]]]) -> LabeledDataset:
    """In-memory LabeledDataset from {class id: [token lists]}."""
    vocab = Vocabulary()
    documents = []
    classes = {}
    for cid in sorted(class_tokens):
        members = []
        for i, tokens in enumerate(class_tokens[cid]):
            doc_id = f"{cid}/d{i}"
            documents.append(make_document(doc_id, tokens, vocab, label=cid))
            members.append(doc_id)
        classes[cid] = members
    vocab.freeze()
    return LabeledDataset(vocab, documents, classes)


@pytest.fixture
def separable_dataset() -> LabeledDataset:
    """Three classes with pairwise disjoint wordform supports."""
    return build_dataset(
        {
            "a": [["alpha", "alpha", "apple"], ["alpha", "apple", "apple"], ["apple", "alpha"]],
            "b": [["bravo", "bravo", "berry"], ["bravo", "berry"]],
            "c": [["cedar", "cherry"], ["cherry", "cherry", "cedar"], ["cedar", "cedar"]],
        }
    )


@pytest.fixture
def overlapping_dataset() -> LabeledDataset:
    """Two classes that share noise wordforms but differ on signal ones."""
    return build_dataset(
        {
            "x": [
                ["left", "left", "left", "shared", "common"],
                ["left", "left", "shared", "shared"],
                ["left", "left", "left", "common"],
            ],
            "y": [
                ["right", "right", "right", "shared", "common"],
                ["right", "right", "common", "common"],
                ["right", "right", "right", "shared"],
            ],
        }
    )


def write_corpus(root, class_texts: dict[str, list[str]]) -> None:
    """Write {class: [document texts]} as a <root>/<class>/<doc>.txt tree."""
    for cid, texts in class_texts.items():
        cdir = root / cid
        cdir.mkdir(parents=True, exist_ok=True)
        for i, text in enumerate(texts):
            (cdir / f"d{i}.txt").write_text(text, encoding="utf-8")
