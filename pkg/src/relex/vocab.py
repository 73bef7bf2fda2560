"""Vocabularies built from a training corpus and word-vector loading."""

from __future__ import annotations

import json
from collections import Counter

import numpy as np

from .bilou import TagAlphabet
from .relation import RelationLabels

UNK = "<unk>"
PAD = "<pad>"
ROOT = "<root>"


class Alphabet:
    """String <-> id map with reserved entries at the front (id 0 is UNK)."""

    def __init__(self, items=(), reserved=(UNK,)):
        self.items = list(reserved)
        self.index = {s: i for i, s in enumerate(self.items)}
        for s in items:
            self.add(s)

    def add(self, s: str) -> int:
        i = self.index.get(s)
        if i is None:
            i = len(self.items)
            self.items.append(s)
            self.index[s] = i
        return i

    def get(self, s: str) -> int:
        return self.index.get(s, 0)

    def __len__(self):
        return len(self.items)

    def __contains__(self, s):
        return s in self.index


class Vocabulary:
    def __init__(self, words, pos, deps, entity_types, relation_types):
        self.words = Alphabet(words, reserved=(UNK, PAD))
        self.pos = Alphabet(pos)
        self.deps = Alphabet(deps, reserved=(UNK, ROOT))
        self.tags = TagAlphabet(entity_types)
        self.relations = RelationLabels(relation_types)

    def word_id(self, form: str) -> int:
        return self.words.get(form)

    def pos_id(self, pos: str) -> int:
        return self.pos.get(pos)

    def dep_id(self, token) -> int:
        """Id of the token's dependency to its parent; the root gets ROOT."""
        return self.deps.index[ROOT] if token.head == 0 else self.deps.get(token.deprel)

    def to_json(self) -> dict:
        return {
            "words": self.words.items[2:],
            "pos": self.pos.items[1:],
            "deps": self.deps.items[2:],
            "entity_types": list(self.tags.entity_types),
            "relation_types": list(self.relations.types),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Vocabulary":
        return cls(data["words"], data["pos"], data["deps"], data["entity_types"],
                   data["relation_types"])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False, indent=1)


def build_vocab(corpus, min_word_freq: int = 1, negative_type: str | None = None) -> Vocabulary:
    """Alphabets closed over ``corpus``; rarer words than ``min_word_freq`` become UNK.

    Relations of ``negative_type`` are explicit non-relations and get no label.
    """
    counts = Counter(t.form for s in corpus for t in s.tokens)
    words = [w for w in sorted(counts) if counts[w] >= min_word_freq]
    pos = sorted({t.pos for s in corpus for t in s.tokens})
    deps = sorted({t.deprel for s in corpus for t in s.tokens if t.head != 0})
    etypes = sorted({e.type for s in corpus for e in s.entities})
    rtypes = sorted({r.type for s in corpus for r in s.relations if r.type != negative_type})
    return Vocabulary(words, pos, deps, etypes, rtypes)


class VectorFormatError(ValueError):
    pass


def load_word_vectors(stream, vocab: Vocabulary, table: np.ndarray) -> int:
    """Copy pretrained vectors into rows of ``table`` (in place).

    Accepts an optional ``count dim`` header. A vocabulary word takes the
    vector of its exact form, or failing that, of the first file entry
    whose lowercased form equals the word lowercased. Returns the number of
    rows filled.
    """
    dim = table.shape[1]
    exact = {}
    lowered = {}
    for lineno, line in enumerate(stream, start=1):
        parts = line.rstrip().split(" ")
        if not parts or parts == [""]:
            continue
        if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
            if int(parts[1]) != dim:
                raise VectorFormatError(f"vectors have dimension {parts[1]}, model expects {dim}")
            continue
        if len(parts) - 1 != dim:
            raise VectorFormatError(
                f"line {lineno}: {len(parts) - 1} values, model expects {dim}")
        word = parts[0]
        vec = np.array(parts[1:], dtype=np.float64)
        exact.setdefault(word, vec)
        lowered.setdefault(word.lower(), vec)
    covered = 0
    for word, i in vocab.words.index.items():
        if word in (UNK, PAD):
            continue
        vec = exact.get(word)
        if vec is None:
            vec = lowered.get(word.lower())
        if vec is not None:
            table[i] = vec
            covered += 1
    return covered
