"""Template-based synthetic corpora with gold parses, entities and relations.

Each template is a list of items ``(text_or_slot, pos, head_item, deprel)``;
``head_item`` is the index of the governing item or ``None`` for the root.
An entity slot expands to one or more tokens whose last token is the
phrase head, earlier tokens attaching to it as ``compound``. Relations are
given between slot items as ``(arg1_item, arg2_item, type)``.
"""

from __future__ import annotations

import io

import numpy as np

from .bilou import EntitySpan
from .corpus import RelationInstance, Token, make_sentence, write_corpus

FIRST = ["Sidney", "Maria", "John", "Aiko", "Pedro", "Lena", "Omar", "Grace", "Ivan", "Nora",
         "Tariq", "Elena", "Hugo", "Mei", "Samuel", "Ruth"]
LAST = ["Yates", "Lopez", "Smith", "Tanaka", "Silva", "Berg", "Haddad", "Hopper", "Petrov",
        "Quinn", "Khan", "Rossi", "Weber", "Chen", "Okafor", "Adler"]
CITIES = [["Chicago"], ["Paris"], ["Lagos"], ["Osaka"], ["Lima"], ["New", "York"], ["Cape", "Town"],
          ["Oslo"], ["Quito"], ["San", "Diego"], ["Hanoi"], ["Dublin"]]
ORGS = [["Acme"], ["Globex", "Corp"], ["Initech"], ["Umbrella", "Labs"], ["Stark", "Industries"],
        ["Hooli"], ["Wayne", "Enterprises"], ["Vandelay"], ["Cyberdyne", "Systems"], ["Tyrell"]]

PER, LOC, ORG = "PER", "LOC", "ORG"
PHYS, AFF = "PHYS", "ORG-AFF"

# (items, relations)
TEMPLATES = [
    ([(PER, "NNP", 2, "nsubjpass"), ("was", "VBD", 2, "auxpass"), ("born", "VBN", None, "root"),
      ("in", "IN", 2, "prep"), (LOC, "NNP", 3, "pobj"), (".", ".", 2, "punct")],
     [(0, 4, PHYS)]),
    ([(PER, "NNP", 1, "nsubj"), ("works", "VBZ", None, "root"), ("for", "IN", 1, "prep"),
      (ORG, "NNP", 2, "pobj"), (".", ".", 1, "punct")],
     [(0, 3, AFF)]),
    ([(ORG, "NNP", 1, "nsubj"), ("hired", "VBD", None, "root"), (PER, "NNP", 1, "dobj"),
      (".", ".", 1, "punct")],
     [(2, 0, AFF)]),
    ([(ORG, "NNP", 2, "nsubjpass"), ("is", "VBZ", 2, "auxpass"), ("based", "VBN", None, "root"),
      ("in", "IN", 2, "prep"), (LOC, "NNP", 3, "pobj"), (".", ".", 2, "punct")],
     [(0, 4, PHYS)]),
    ([(PER, "NNP", 7, "nsubj"), (",", ",", 0, "punct"), ("who", "WP", 3, "nsubj"),
      ("works", "VBZ", 0, "rcmod"), ("for", "IN", 3, "prep"), (ORG, "NNP", 4, "pobj"),
      (",", ",", 0, "punct"), ("lives", "VBZ", None, "root"), ("in", "IN", 7, "prep"),
      (LOC, "NNP", 8, "pobj"), (".", ".", 7, "punct")],
     [(0, 5, AFF), (0, 9, PHYS)]),
]

DISTRACTORS = [
    ([(PER, "NNP", 1, "nsubj"), ("met", "VBD", None, "root"), (PER, "NNP", 1, "dobj"),
      ("yesterday", "NN", 1, "tmod"), (".", ".", 1, "punct")], []),
    ([("The", "DT", 1, "det"), ("weather", "NN", 3, "nsubj"), ("was", "VBD", 3, "cop"),
      ("nice", "JJ", None, "root"), (".", ".", 3, "punct")], []),
    ([(PER, "NNP", 1, "nsubj"), ("visited", "VBD", None, "root"), ("the", "DT", 3, "det"),
      ("museum", "NN", 1, "dobj"), (".", ".", 1, "punct")], []),
    ([(ORG, "NNP", 3, "nsubj"), ("and", "CC", 0, "cc"), (ORG, "NNP", 0, "conj"),
      ("announced", "VBD", None, "root"), ("a", "DT", 5, "det"), ("merger", "NN", 3, "dobj"),
      (".", ".", 3, "punct")], []),
]

NOUNS = ["storm", "flood", "engine", "wheel", "virus", "fever", "author", "book", "leaf", "tree",
         "spark", "fire", "keyboard", "laptop", "quake", "damage", "roof", "house", "smoke",
         "alarm"]
CAUSE, WHOLE, OTHER = "Cause-Effect", "Component-Whole", "Other"

NOMINAL_TEMPLATES = [
    ([("The", "DT", 1, "det"), ("NOM", "NN", 2, "nsubj"), ("caused", "VBD", None, "root"),
      ("the", "DT", 4, "det"), ("NOM", "NN", 2, "dobj"), (".", ".", 2, "punct")],
     [(1, 4, CAUSE)]),
    ([("The", "DT", 1, "det"), ("NOM", "NN", 3, "nsubjpass"), ("was", "VBD", 3, "auxpass"),
      ("caused", "VBN", None, "root"), ("by", "IN", 3, "prep"), ("the", "DT", 6, "det"),
      ("NOM", "NN", 4, "pobj"), (".", ".", 3, "punct")],
     [(6, 1, CAUSE)]),
    ([("The", "DT", 1, "det"), ("NOM", "NN", 3, "nsubj"), ("is", "VBZ", 3, "cop"),
      ("part", "NN", None, "root"), ("of", "IN", 3, "prep"), ("the", "DT", 6, "det"),
      ("NOM", "NN", 4, "pobj"), (".", ".", 3, "punct")],
     [(1, 6, WHOLE)]),
    ([("The", "DT", 1, "det"), ("NOM", "NN", 2, "nsubj"), ("has", "VBZ", None, "root"),
      ("a", "DT", 4, "det"), ("NOM", "NN", 2, "dobj"), (".", ".", 2, "punct")],
     [(4, 1, WHOLE)]),
    ([("The", "DT", 1, "det"), ("NOM", "NN", 2, "nsubj"), ("was", "VBD", None, "root"),
      ("near", "IN", 2, "prep"), ("the", "DT", 5, "det"), ("NOM", "NN", 3, "pobj"),
      (".", ".", 2, "punct")],
     [(1, 5, OTHER)]),
]


def _entity_words(etype, rng):
    if etype == PER:
        return [FIRST[rng.integers(len(FIRST))], LAST[rng.integers(len(LAST))]] \
            if rng.random() < 0.7 else [LAST[rng.integers(len(LAST))]]
    if etype == LOC:
        return list(CITIES[rng.integers(len(CITIES))])
    if etype == ORG:
        return list(ORGS[rng.integers(len(ORGS))])
    return [NOUNS[rng.integers(len(NOUNS))]]


def _realize(template, rng, slot_types):
    items, rels = template
    spans = []  # token indices of each item
    words = []
    pos = 1
    for form, _, _, _ in items:
        w = _entity_words(form, rng) if form in slot_types else [form]
        spans.append(list(range(pos, pos + len(w))))
        words.append(w)
        pos += len(w)
    item_head = [idx[-1] for idx in spans]
    tokens = []
    entities = []
    for k, (form, tag, head_item, deprel) in enumerate(items):
        idx = spans[k]
        head = 0 if head_item is None else item_head[head_item]
        for i, w in zip(idx[:-1], words[k]):
            tokens.append(Token(i, w, tag, idx[-1], "compound"))
        tokens.append(Token(idx[-1], words[k][-1], tag, head, deprel))
        if form in slot_types:
            entities.append(EntitySpan(idx[0], idx[-1], slot_types[form]))
    relations = [RelationInstance(item_head[a], item_head[b], t) for a, b, t in rels]
    return make_sentence(tokens, entities, relations)


def generate(n: int, seed: int, nominal: bool = False, distractor_rate: float = 0.25):
    """``n`` validated sentences, deterministic in ``seed``.

    With ``nominal`` every sentence holds one marked noun pair (entity type
    ``NOM``) and exactly one relation line, possibly ``Other``.
    """
    if n < 1:
        raise ValueError("need at least one sentence")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        if nominal:
            template = NOMINAL_TEMPLATES[rng.integers(len(NOMINAL_TEMPLATES))]
            out.append(_realize(template, rng, {"NOM": "NOM"}))
            continue
        pool = DISTRACTORS if rng.random() < distractor_rate else TEMPLATES
        template = pool[rng.integers(len(pool))]
        out.append(_realize(template, rng, {PER: PER, LOC: LOC, ORG: ORG}))
    return out


def gen_synthetic(n: int, seed: int, nominal: bool = False) -> str:
    """The generated corpus as file text."""
    buf = io.StringIO()
    write_corpus(buf, generate(n, seed, nominal))
    return buf.getvalue()
