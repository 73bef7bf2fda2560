"""Greedy left-to-right BILOU tagging on top of the sequence layer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import Graph, Node, Parameter, ParamStore
from .bilou import TagAlphabet


class EntityHead:
    """tanh hidden layer over ``[s_t; v_label(prev)]`` followed by tag logits."""

    def __init__(self, store: ParamStore, prefix: str, input_dim: int, hidden_dim: int,
                 n_tags: int):
        self.W_h = store.weight(f"{prefix}W_h", hidden_dim, input_dim)
        self.b_h = store.bias(f"{prefix}b_h", hidden_dim)
        self.W_y = store.weight(f"{prefix}W_y", n_tags, hidden_dim)
        self.b_y = store.bias(f"{prefix}b_y", n_tags)

    def parameters(self):
        return [self.W_h, self.b_h, self.W_y, self.b_y]


def entity_scores(g: Graph, head: EntityHead, s_t: Node, prev_label: Node,
                  dropout: float = 0.0, training: bool = False, rng=None) -> tuple[Node, Node]:
    h = g.tanh(g.affine(head.W_h, g.concat([s_t, prev_label]), head.b_h))
    h = g.dropout(h, dropout, training, rng)
    return h, g.affine(head.W_y, h, head.b_y)


@dataclass
class TagDecision:
    predicted: int  # argmax of the model at this step
    fed: int  # label passed to the next step and to relation candidates
    loss: Node | None = None


def greedy_argmax(scores: np.ndarray, allowed=None) -> int:
    """Index of the max score, lowest index on ties, restricted to ``allowed``."""
    if allowed is None:
        return int(np.argmax(scores))
    best = None
    for i in sorted(allowed):
        if best is None or scores[i] > scores[best]:
            best = i
    return best


def decode_entities(g: Graph, head: EntityHead, labels: Parameter, s, alphabet: TagAlphabet,
                    gold=None, epsilon: float = 0.0, constrained: bool = True,
                    dropout: float = 0.0, training: bool = False, rng=None) -> list[TagDecision]:
    """Tag a sentence greedily, feeding each step's label to the next.

    Without ``gold`` this is plain prediction. With ``gold`` every step also
    gets a loss against the gold tag, and the gold tag is fed forward
    instead of the prediction with probability ``epsilon`` whenever it is a
    legal successor of the previously fed tag.
    """
    n = len(s)
    decisions = []
    prev = None
    for t in range(n):
        prev_vec = g.lookup(labels, alphabet.outside if prev is None else prev)
        _, logits = entity_scores(g, head, s[t], prev_vec, dropout, training, rng)
        allowed = alphabet.legal_next(prev, last=(t == n - 1)) if constrained else None
        pred = greedy_argmax(logits.value, allowed)
        fed = pred
        loss = None
        if gold is not None:
            loss = g.pick_neg_log_softmax(logits, gold[t])
            if epsilon > 0 and gold[t] in alphabet.legal_next(prev) and rng.random() < epsilon:
                fed = gold[t]
        decisions.append(TagDecision(pred, fed, loss))
        prev = fed
    return decisions
