"""Typed-children tree LSTMs over dependency substructures, relation
candidates, the relation classifier and direction resolution."""

from __future__ import annotations

from dataclasses import dataclass

from .autodiff import Graph, Node, Parameter, ParamStore, softmax
from .bilou import EntitySpan
from .depstruct import OFF_PATH, ON_PATH, PathStructure
from .encoder import GATES

NODE_TYPES = (ON_PATH, OFF_PATH)
_TYPE_NAMES = {ON_PATH: "on", OFF_PATH: "off"}

BOTH = "both"
L2R_ONLY = "l2r_only"
NEG_SAMPLE = "neg_sample"
CANDIDATE_MODES = (BOTH, L2R_ONLY, NEG_SAMPLE)


class RelationLabels:
    """Label 0 is the undirected negative class; every relation type then
    gets a forward ``T(e1,e2)`` and a reverse ``T(e2,e1)`` label."""

    NEGATIVE = 0

    def __init__(self, relation_types):
        self.types = tuple(sorted(set(relation_types)))
        self.labels = ["NEG"]
        self.directed = [None]
        for t in self.types:
            self.labels += [f"{t}(e1,e2)", f"{t}(e2,e1)"]
            self.directed += [(t, True), (t, False)]
        self.index = {d: i for i, d in enumerate(self.directed) if d is not None}

    def __len__(self):
        return len(self.labels)

    def id(self, rtype: str, forward: bool) -> int:
        return self.index[(rtype, forward)]

    def type_of(self, label: int) -> str | None:
        d = self.directed[label]
        return None if d is None else d[0]

    def is_forward(self, label: int) -> bool:
        return self.directed[label][1]


class TreeLSTM:
    """One direction of the typed tree LSTM.

    Input, output and update gates use one recurrent matrix per child type;
    the per-child forget gate uses one matrix per (receiving child type,
    contributing child type) pair.
    """

    def __init__(self, store: ParamStore, prefix: str, input_dim: int, hidden_dim: int,
                 forget_bias: float = 0.0):
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.W = {k: store.weight(f"{prefix}W_{k}", hidden_dim, input_dim) for k in GATES}
        self.U = {(k, m): store.weight(f"{prefix}U_{k}_{_TYPE_NAMES[m]}", hidden_dim, hidden_dim)
                  for k in ("i", "o", "u") for m in NODE_TYPES}
        self.U_f = {(a, b): store.weight(
                        f"{prefix}U_f_{_TYPE_NAMES[a]}_{_TYPE_NAMES[b]}", hidden_dim, hidden_dim)
                    for a in NODE_TYPES for b in NODE_TYPES}
        self.b = {k: store.bias(f"{prefix}b_{k}", hidden_dim, forget_bias if k == "f" else 0.0)
                  for k in GATES}

    def parameters(self):
        return [*self.W.values(), *self.U.values(), *self.U_f.values(), *self.b.values()]

    def cell(self, g: Graph, x: Node, children) -> tuple[Node, Node]:
        """One unit. ``children`` lists ``(type, h, c)`` in canonical order."""
        by_type = {}
        for m, h, _ in children:
            by_type.setdefault(m, []).append(h)
        # same-type children share weights, so sum their states first
        sums = {m: (hs[0] if len(hs) == 1 else g.add(*hs)) for m, hs in by_type.items()}
        types = sorted(sums)

        def gate(k):
            return g.affine_sum([(self.W[k], x)] + [(self.U[k, m], sums[m]) for m in types],
                                self.b[k])

        i = g.sigmoid(gate("i"))
        o = g.sigmoid(gate("o"))
        u = g.tanh(gate("u"))
        c = g.hadamard(i, u)
        if children:
            wx = g.affine(self.W["f"], x, self.b["f"])
            forget = {}
            for mk in sorted({m for m, _, _ in children}):
                forget[mk] = g.sigmoid(g.affine_sum(
                    [(self.U_f[mk, ml], sums[ml]) for ml in types], wx))
            c = g.add(c, *[g.hadamard(forget[m], c_l) for m, _, c_l in children])
        h = g.hadamard(o, g.tanh(c))
        return h, c


def tree_bottom_up(g: Graph, lstm: TreeLSTM, structure: PathStructure, inputs) -> dict:
    """Hidden/cell states for every node, leaves first. Returns ``{node: (h, c)}``."""
    states = {}
    for node in structure.bottom_up_order():
        kids = [(structure.node_type[k], *states[k]) for k in structure.children[node]]
        states[node] = lstm.cell(g, inputs[node], kids)
    return states


def tree_top_down(g: Graph, lstm: TreeLSTM, structure: PathStructure, inputs) -> dict:
    """States propagated from the structure's top toward its leaves; each
    node's only predecessor is its parent."""
    states = {}
    for node in structure.top_down_order():
        parent = structure.parent[node]
        preds = [] if parent == 0 else [(structure.node_type[parent], *states[parent])]
        states[node] = lstm.cell(g, inputs[node], preds)
    return states


def dependency_input(g: Graph, s_t: Node, dep_table: Parameter, dep_id: int,
                     label_table: Parameter | None = None, label_id: int | None = None) -> Node:
    parts = [s_t, g.lookup(dep_table, dep_id)]
    if label_table is not None:
        parts.append(g.lookup(label_table, label_id))
    return g.concat(parts)


@dataclass(frozen=True)
class RelationCandidate:
    first: int
    second: int
    first_span: EntitySpan
    second_span: EntitySpan
    label: int = RelationLabels.NEGATIVE


def build_candidates(spans, mode: str = BOTH, gold=None, labels: RelationLabels | None = None):
    """Ordered pairs over the last tokens of ``spans``.

    ``gold`` maps ``(arg1_span, arg2_span) -> relation type`` and, with
    ``labels``, sets each candidate's training label; anything not matching
    a gold relation on exactly the detected spans is negative.
    """
    if mode not in CANDIDATE_MODES:
        raise ValueError(f"candidate mode must be one of {CANDIDATE_MODES}, got {mode!r}")
    spans = sorted(spans, key=lambda s: s.end)
    out = []
    for a in range(len(spans)):
        for b in range(a + 1, len(spans)):
            left, right = spans[a], spans[b]
            pairs = [(left, right)] if mode == L2R_ONLY else [(left, right), (right, left)]
            for first, second in pairs:
                label = RelationLabels.NEGATIVE
                if gold is not None:
                    if (first, second) in gold:
                        label = labels.id(gold[first, second], True)
                    elif (second, first) in gold and mode != NEG_SAMPLE:
                        label = labels.id(gold[second, first], False)
                out.append(RelationCandidate(first.end, second.end, first, second, label))
    return out


class RelationHead:
    def __init__(self, store: ParamStore, prefix: str, input_dim: int, hidden_dim: int,
                 n_labels: int):
        self.input_dim = input_dim
        self.W_h = store.weight(f"{prefix}W_h", hidden_dim, input_dim)
        self.b_h = store.bias(f"{prefix}b_h", hidden_dim)
        self.W_y = store.weight(f"{prefix}W_y", n_labels, hidden_dim)
        self.b_y = store.bias(f"{prefix}b_y", n_labels)

    def parameters(self):
        return [self.W_h, self.b_h, self.W_y, self.b_y]


def relation_vector(g: Graph, candidate: RelationCandidate, structure: PathStructure,
                    up: dict, down: dict, s=None, pair: bool = True) -> Node:
    """``[up h_top; down h_first; down h_second]``, plus the mean sequence
    state of each argument entity when ``pair`` is on. ``s`` is 0-based."""
    parts = [up[structure.anchor][0], down[candidate.first][0], down[candidate.second][0]]
    if pair:
        for span in (candidate.first_span, candidate.second_span):
            parts.append(g.mean([s[i - 1] for i in span.tokens()]))
    return g.concat(parts)


def classify_relation(g: Graph, head: RelationHead, d: Node, dropout: float = 0.0,
                      training: bool = False, rng=None) -> Node:
    """Logits over relation labels (softmax is applied by the caller/loss)."""
    h = g.tanh(g.affine(head.W_h, d, head.b_h))
    h = g.dropout(h, dropout, training, rng)
    return g.affine(head.W_y, h, head.b_y)


def label_distribution(logits: Node):
    return softmax(logits.value)


@dataclass(frozen=True)
class Prediction:
    label: int
    confidence: float


def resolve_directions(pred_ij: Prediction, pred_ji: Prediction | None, labels: RelationLabels):
    """Combine the two orderings of one pair into ``(type, forward_in_ij)``
    or ``None``.

    A positive label beats a negative one; between two positives the more
    confident wins, ties going to the sentence-order candidate. The returned
    flag says whether the relation's first argument is the ``i`` token.
    """
    cands = []
    if pred_ij.label != RelationLabels.NEGATIVE:
        cands.append((pred_ij.confidence, 1, pred_ij.label, True))
    if pred_ji is not None and pred_ji.label != RelationLabels.NEGATIVE:
        cands.append((pred_ji.confidence, 0, pred_ji.label, False))
    if not cands:
        return None
    _, _, label, ij_order = max(cands)
    forward = labels.is_forward(label)
    return labels.type_of(label), (forward if ij_order else not forward)
