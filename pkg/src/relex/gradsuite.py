"""Finite-difference checks for every differentiable component.

Each check builds a small float64 instance of a component, reduces its
outputs to a scalar through fixed random projections, and compares the
analytic parameter gradients with central differences.
"""

from __future__ import annotations

import numpy as np

from .autodiff import Graph, ParamStore
from .autodiff.gradcheck import CheckResult, check_parameters
from .bilou import EntitySpan
from .depstruct import FULLTREE, OFF_PATH, ON_PATH, SPTREE, extract_structure, validate_tree
from .encoder import EmbedTables, LSTMCell, embed_token, lstm_step, sequence_layer
from .entity import EntityHead, entity_scores
from .relation import (
    RelationCandidate,
    RelationHead,
    TreeLSTM,
    classify_relation,
    relation_vector,
    tree_bottom_up,
    tree_top_down,
)

TOLERANCE = 1e-4
DIMS = {
    "small": dict(inp=7, hidden=5, words=6, pos=4, wdim=4, pdim=3, labels=5, ldim=3,
                  ehidden=4, tree=4, rhidden=4, nrel=5),
    "tiny": dict(inp=3, hidden=2, words=3, pos=2, wdim=2, pdim=1, labels=3, ldim=2,
                 ehidden=2, tree=2, rhidden=2, nrel=3),
}


class _Tok:
    def __init__(self, head):
        self.head = head
        self.deprel = "dep"


def random_tree(rng, n):
    """Uniform random recursive tree over tokens 1..n with a random root."""
    perm = rng.permutation(n) + 1
    heads = [0] * (n + 1)
    for k in range(1, n):
        heads[perm[k]] = int(perm[rng.integers(k)])
    return validate_tree([_Tok(heads[i]) for i in range(1, n + 1)])


def mixed_structure(rng, n=7):
    """A FullTree structure over a random n-node tree in which some node has
    both on-path and off-path children, so every typed matrix is used."""
    while True:
        tree = random_tree(rng, n)
        a, b = (int(x) for x in rng.choice(np.arange(1, n + 1), 2, replace=False))
        st = extract_structure(tree, a, b, FULLTREE)
        for node in st.nodes:
            if {st.node_type[c] for c in st.children[node]} == {ON_PATH, OFF_PATH}:
                return st


def check_lstm_step(rng, d):
    store = ParamStore(rng, np.float64)
    cell = LSTMCell(store, "cell.", d["inp"], d["hidden"])
    x, h0, c0 = (rng.standard_normal(k) for k in (d["inp"], d["hidden"], d["hidden"]))
    wh, wc = rng.standard_normal(d["hidden"]), rng.standard_normal(d["hidden"])

    def loss(backward):
        g = Graph()
        h, c = lstm_step(g, cell, g.constant(x), g.constant(h0), g.constant(c0))
        out = g.add(g.dot(h, wh), g.dot(c, wc))
        if backward:
            g.backward(out)
        return float(out.value)
    return check_parameters(loss, store)


def check_sequence_layer(rng, d, n=4):
    store = ParamStore(rng, np.float64)
    tables = EmbedTables(store, "emb.", d["words"], d["pos"], 0, 0, d["wdim"], d["pdim"], 0, 0)
    fw = LSTMCell(store, "fw.", tables.token_dim, d["hidden"])
    bw = LSTMCell(store, "bw.", tables.token_dim, d["hidden"])
    words = rng.integers(d["words"], size=n)
    pos = rng.integers(d["pos"], size=n)
    proj = rng.standard_normal((n, 2 * d["hidden"]))

    def loss(backward):
        g = Graph()
        xs = [embed_token(g, tables, int(w), int(p)) for w, p in zip(words, pos)]
        s = sequence_layer(g, xs, fw, bw)
        out = g.sum_scalars([g.dot(st, w) for st, w in zip(s, proj)])
        if backward:
            g.backward(out)
        return float(out.value)
    return check_parameters(loss, store)


def check_entity_head(rng, d):
    store = ParamStore(rng, np.float64)
    labels = store.embedding("label", d["labels"], d["ldim"])
    head = EntityHead(store, "ent.", 2 * d["hidden"] + d["ldim"], d["ehidden"], d["labels"])
    s_t = rng.standard_normal(2 * d["hidden"])
    prev = int(rng.integers(d["labels"]))
    gold = int(rng.integers(d["labels"]))
    wh = rng.standard_normal(d["ehidden"])

    def loss(backward):
        g = Graph()
        h, logits = entity_scores(g, head, g.constant(s_t), g.lookup(labels, prev))
        out = g.add(g.pick_neg_log_softmax(logits, gold), g.dot(h, wh))
        if backward:
            g.backward(out)
        return float(out.value)
    return check_parameters(loss, store)


def _tree_check(rng, d, direction):
    store = ParamStore(rng, np.float64)
    st = mixed_structure(rng)
    lstm = TreeLSTM(store, "tree.", d["inp"], d["tree"])
    xs = {t: rng.standard_normal(d["inp"]) for t in st.nodes}
    proj = {t: rng.standard_normal(d["tree"]) for t in st.nodes}
    run = tree_bottom_up if direction == "up" else tree_top_down

    def loss(backward):
        g = Graph()
        states = run(g, lstm, st, {t: g.constant(v) for t, v in xs.items()})
        out = g.sum_scalars([g.dot(states[t][0], proj[t]) for t in st.nodes])
        if backward:
            g.backward(out)
        return float(out.value)
    return check_parameters(loss, store)


def check_tree_bottom_up(rng, d):
    return _tree_check(rng, d, "up")


def check_tree_top_down(rng, d):
    return _tree_check(rng, d, "down")


def check_relation_head(rng, d, n=6):
    """Relation classifier with the Pair feature, differentiating through
    both tree directions and the entity averages back into the sequence
    states (held in a parameter table)."""
    store = ParamStore(rng, np.float64)
    s_dim = 2 * d["hidden"]
    s_table = store.embedding("s", n, s_dim)
    up = TreeLSTM(store, "up.", s_dim, d["tree"])
    down = TreeLSTM(store, "down.", s_dim, d["tree"])
    head = RelationHead(store, "rel.", 3 * d["tree"] + 2 * s_dim, d["rhidden"], d["nrel"])
    tree = random_tree(rng, n)
    first_span, second_span = EntitySpan(1, 2, "A"), EntitySpan(4, 5, "B")
    cand = RelationCandidate(2, 5, first_span, second_span, 1)
    st = extract_structure(tree, 2, 5, SPTREE)
    gold = int(rng.integers(d["nrel"]))

    def loss(backward):
        g = Graph()
        s = [g.lookup(s_table, i) for i in range(n)]
        xs = {t: s[t - 1] for t in st.nodes}
        u = tree_bottom_up(g, up, st, xs)
        dn = tree_top_down(g, down, st, xs)
        vec = relation_vector(g, cand, st, u, dn, s, pair=True)
        out = g.pick_neg_log_softmax(classify_relation(g, head, vec), gold)
        if backward:
            g.backward(out)
        return float(out.value)
    return check_parameters(loss, store)


SUITE = {
    "lstm_step": check_lstm_step,
    "sequence_layer": check_sequence_layer,
    "entity_head": check_entity_head,
    "tree_bottom_up": check_tree_bottom_up,
    "tree_top_down": check_tree_top_down,
    "relation_head_pair": check_relation_head,
}


def run_suite(seed: int = 7, dims: str = "small") -> dict[str, list[CheckResult]]:
    d = DIMS[dims]
    out = {}
    for name, check in SUITE.items():
        rng = np.random.default_rng([seed, len(out)])
        out[name] = check(rng, d)
    return out


def worst(results: list[CheckResult]) -> float:
    return max(r.max_rel_err for r in results)
