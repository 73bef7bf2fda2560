import itertools

import numpy as np
import pytest

from relex.autodiff import Graph, ParamStore
from relex.autodiff.gradcheck import check_parameters
from relex.bilou import EntitySpan
from relex.depstruct import FULLTREE, OFF_PATH, ON_PATH, SPTREE, extract_structure
from relex.encoder import LSTMCell, lstm_step
from relex.gradsuite import mixed_structure, random_tree
from relex.relation import (
    BOTH,
    L2R_ONLY,
    NEG_SAMPLE,
    Prediction,
    RelationCandidate,
    RelationHead,
    RelationLabels,
    TreeLSTM,
    build_candidates,
    classify_relation,
    dependency_input,
    label_distribution,
    relation_vector,
    resolve_directions,
    tree_bottom_up,
    tree_top_down,
)
from test_depstruct import tree_of

LABELS = RelationLabels(["PHYS", "PART-WHOLE"])
YATES, CHICAGO = EntitySpan(4, 5, "PER"), EntitySpan(9, 9, "LOC")


def _store(seed=0):
    return ParamStore(np.random.default_rng(seed), np.float64)


def _tied(seed, dim_in, dim_h):
    """A tree LSTM and a sequential cell sharing W, b and the ON_PATH U's."""
    store = _store(seed)
    tree = TreeLSTM(store, "t.", dim_in, dim_h)
    cell = LSTMCell(store, "c.", dim_in, dim_h)
    for k in "ifou":
        cell.W[k].value[...] = tree.W[k].value
        cell.b[k].value[...] = tree.b[k].value
    for k in "iou":
        cell.U[k].value[...] = tree.U[k, ON_PATH].value
    cell.U["f"].value[...] = tree.U_f[ON_PATH, ON_PATH].value
    return tree, cell


def test_labels():
    assert len(LABELS) == 5 and LABELS.labels[0] == "NEG"
    assert LABELS.type_of(LABELS.id("PHYS", False)) == "PHYS"
    assert not LABELS.is_forward(LABELS.id("PHYS", False))
    assert LABELS.type_of(0) is None


def test_leaf_equals_sequential_cell(rng):
    tree, cell = _tied(1, 6, 4)
    for _ in range(20):
        x = rng.standard_normal(6)
        g = Graph()
        h1, c1 = tree.cell(g, g.constant(x), [])
        h2, c2 = lstm_step(g, cell, g.constant(x))
        assert np.max(np.abs(h1.value - h2.value)) <= 1e-12
        assert np.max(np.abs(c1.value - c2.value)) <= 1e-12


def test_chain_equivalence_both_directions(rng):
    # 1 <- 2 <- 3 <- 4 (root 4): SPTree between 1 and 4 is a single-child chain
    st = extract_structure(tree_of([2, 3, 4, 0]), 1, 4, SPTREE)
    tree, cell = _tied(2, 5, 3)
    xs = {t: rng.standard_normal(5) for t in st.nodes}
    g = Graph()
    up = tree_bottom_up(g, tree, st, {t: g.constant(v) for t, v in xs.items()})
    down = tree_top_down(g, tree, st, {t: g.constant(v) for t, v in xs.items()})
    h = c = None
    for t in (1, 2, 3, 4):
        h, c = lstm_step(g, cell, g.constant(xs[t]), h, c)
        assert np.allclose(up[t][0].value, h.value, atol=1e-14)
    h = c = None
    for t in (4, 3, 2, 1):
        h, c = lstm_step(g, cell, g.constant(xs[t]), h, c)
        assert np.allclose(down[t][0].value, h.value, atol=1e-14)


def test_top_down_anchor_has_zero_predecessor(rng):
    st = extract_structure(tree_of([2, 3, 0]), 1, 3, SPTREE)
    tree, cell = _tied(3, 4, 3)
    xs = {t: rng.standard_normal(4) for t in st.nodes}
    g = Graph()
    down = tree_top_down(g, tree, st, {t: g.constant(v) for t, v in xs.items()})
    h, _ = lstm_step(g, cell, g.constant(xs[st.anchor]))
    assert np.max(np.abs(down[st.anchor][0].value - h.value)) <= 1e-12


def test_same_type_children_order_invariant(rng):
    tree, _ = _tied(4, 4, 3)
    x = rng.standard_normal(4)
    kids = [(m, rng.standard_normal(3), rng.standard_normal(3))
            for m in (ON_PATH, OFF_PATH, OFF_PATH, ON_PATH)]

    def run(order):
        g = Graph()
        nodes = [(kids[k][0], g.constant(kids[k][1]), g.constant(kids[k][2])) for k in order]
        return tree.cell(g, g.constant(x), nodes)[0].value

    canonical = run(range(4))
    for perm in itertools.permutations(range(4)):
        assert np.allclose(run(perm), canonical, atol=1e-14, rtol=0)
        # sorting each listing back to token order restores bit-identical output
        assert np.array_equal(run(sorted(perm)), canonical)


def test_sptree_leaves_off_path_matrices_untouched(rng):
    store = _store(5)
    tree = TreeLSTM(store, "t.", 4, 3)
    t = random_tree(rng, 9)
    st = extract_structure(t, 2, 7, SPTREE)
    g = Graph()
    xs = {n: g.constant(rng.standard_normal(4)) for n in st.nodes}
    up = tree_bottom_up(g, tree, st, xs)
    down = tree_top_down(g, tree, st, xs)
    g.backward(g.sum_scalars([g.sum(up[n][0]) for n in st.nodes] +
                             [g.sum(down[n][0]) for n in st.nodes]))
    for p in store:
        if "off" in p.name:
            assert not p.grad.any(), p.name


@pytest.mark.parametrize("direction", ["up", "down"])
def test_tree_gradcheck_with_two_types(rng, direction):
    store = _store(6)
    st = mixed_structure(rng)
    tree = TreeLSTM(store, "t.", 4, 3)
    xs = {t: rng.standard_normal(4) for t in st.nodes}
    w = rng.standard_normal(3)
    run = tree_bottom_up if direction == "up" else tree_top_down

    def loss(backward):
        g = Graph()
        states = run(g, tree, st, {t: g.constant(v) for t, v in xs.items()})
        out = g.sum_scalars([g.dot(states[t][0], w) for t in st.nodes])
        if backward:
            g.backward(out)
        return float(out.value)
    assert max(r.max_rel_err for r in check_parameters(loss, store)) <= 1e-4


def test_mixed_structure_uses_all_forget_blocks(rng):
    store = _store(7)
    st = mixed_structure(rng)
    tree = TreeLSTM(store, "t.", 4, 3)
    g = Graph()
    xs = {t: g.constant(rng.standard_normal(4)) for t in st.nodes}
    up = tree_bottom_up(g, tree, st, xs)
    g.backward(g.sum(up[st.anchor][0]))
    for a, b in itertools.product(("on", "off"), repeat=2):
        assert store[f"t.U_f_{a}_{b}"].grad.any(), (a, b)


def test_dependency_input(rng):
    store = _store(8)
    dep = store.embedding("dep", 5, 25)
    lab = store.embedding("lab", 9, 25)
    g = Graph()
    s = g.constant(rng.standard_normal(200))
    x = dependency_input(g, s, dep, 3, lab, 4)
    assert x.value.shape == (250,)
    assert np.array_equal(dependency_input(g, s, dep, 3, lab, 4).value, x.value)
    w = rng.standard_normal(250)
    g.backward(g.dot(x, w))
    assert np.allclose(lab.grad[4], w[225:]) and not lab.grad[[0, 1, 2, 3]].any()


def test_candidates_yates_chicago():
    cands = build_candidates([CHICAGO, YATES], BOTH)
    assert [(c.first, c.second) for c in cands] == [(5, 9), (9, 5)]
    assert build_candidates([YATES], BOTH) == [] and build_candidates([], BOTH) == []


@pytest.mark.parametrize("k", range(6))
def test_candidate_count(k):
    spans = [EntitySpan(2 * i + 1, 2 * i + 1, "PER") for i in range(k)]
    assert len(build_candidates(spans, BOTH)) == k * (k - 1)
    assert len(build_candidates(spans, L2R_ONLY)) == k * (k - 1) // 2
    assert all(c.first < c.second for c in build_candidates(spans, L2R_ONLY))


def test_candidate_gold_labels():
    gold = {(YATES, CHICAGO): "PHYS"}
    both = {(c.first, c.second): c.label for c in build_candidates([YATES, CHICAGO], BOTH, gold,
                                                                   LABELS)}
    assert both == {(5, 9): LABELS.id("PHYS", True), (9, 5): LABELS.id("PHYS", False)}
    neg = {(c.first, c.second): c.label for c in build_candidates([YATES, CHICAGO], NEG_SAMPLE,
                                                                  gold, LABELS)}
    assert neg == {(5, 9): LABELS.id("PHYS", True), (9, 5): 0}
    # a detected span that differs from the gold argument makes the pair negative
    wrong = EntitySpan(5, 5, "PER")
    assert all(c.label == 0 for c in build_candidates([wrong, CHICAGO], BOTH, gold, LABELS))
    with pytest.raises(ValueError):
        build_candidates([], "all")


def _relation_setup(rng, pair):
    store = _store(9)
    n, s_dim, h = 6, 4, 3
    up, down = TreeLSTM(store, "u.", s_dim, h), TreeLSTM(store, "d.", s_dim, h)
    head = RelationHead(store, "r.", 3 * h + (2 * s_dim if pair else 0), 5, len(LABELS))
    tree = random_tree(rng, n)
    st = extract_structure(tree, 2, 5, FULLTREE)
    cand = RelationCandidate(2, 5, EntitySpan(1, 2, "A"), EntitySpan(5, 5, "B"), 1)
    return store, head, up, down, st, cand, [rng.standard_normal(s_dim) for _ in range(n)]


def test_relation_vector_layout(rng):
    store, head, up, down, st, cand, svals = _relation_setup(rng, True)
    g = Graph()
    s = [g.constant(v) for v in svals]
    xs = {t: s[t - 1] for t in st.nodes}
    u, d = tree_bottom_up(g, up, st, xs), tree_top_down(g, down, st, xs)
    vec = relation_vector(g, cand, st, u, d, s, pair=True).value
    assert vec.shape == (3 * 3 + 2 * 4,)
    assert np.array_equal(vec[:3], u[st.anchor][0].value)
    assert np.array_equal(vec[3:6], d[2][0].value)
    assert np.allclose(vec[9:13], (svals[0] + svals[1]) / 2)
    assert np.array_equal(vec[13:], svals[4])
    assert relation_vector(g, cand, st, u, d, s, pair=False).value.shape == (9,)


def test_relation_dims_default_sizes():
    store = _store()
    head = RelationHead(store, "r.", 3 * 100 + 2 * 200, 100, 13)
    assert head.W_h.shape == (100, 700)


def test_classifier_uniform_and_normalized(rng):
    store, head, *_ = _relation_setup(rng, False)
    g = Graph()
    d = g.constant(rng.standard_normal(9))
    p = label_distribution(classify_relation(g, head, d))
    assert abs(p.sum() - 1) <= 1e-9
    for q in head.parameters():
        q.value[...] = 0
    assert np.allclose(label_distribution(classify_relation(g, head, d)), 1 / len(LABELS))


def test_relation_head_gradcheck_through_pair(rng):
    store, head, up, down, st, cand, svals = _relation_setup(rng, True)
    s_table = store.embedding("s", len(svals), 4)
    s_table.value[...] = np.array(svals)

    def loss(backward):
        g = Graph()
        s = [g.lookup(s_table, i) for i in range(len(svals))]
        xs = {t: s[t - 1] for t in st.nodes}
        vec = relation_vector(g, cand, st, tree_bottom_up(g, up, st, xs),
                              tree_top_down(g, down, st, xs), s, pair=True)
        out = g.pick_neg_log_softmax(classify_relation(g, head, vec), 3)
        if backward:
            g.backward(out)
        return float(out.value)
    assert max(r.max_rel_err for r in check_parameters(loss, store)) <= 1e-4


PHYS_F, PHYS_R = LABELS.id("PHYS", True), LABELS.id("PHYS", False)
PW_F = LABELS.id("PART-WHOLE", True)


def test_resolve_directions():
    assert resolve_directions(Prediction(0, 0.9), Prediction(0, 0.8), LABELS) is None
    assert resolve_directions(Prediction(PHYS_F, 0.6), Prediction(0, 0.99), LABELS) == \
        ("PHYS", True)
    assert resolve_directions(Prediction(PHYS_F, 0.6), Prediction(PW_F, 0.7), LABELS) == \
        ("PART-WHOLE", False)
    # tie goes to the sentence-order candidate
    assert resolve_directions(Prediction(PHYS_F, 0.5), Prediction(PW_F, 0.5), LABELS) == \
        ("PHYS", True)
    # a reverse label on the (j,i) candidate means the relation runs i -> j
    assert resolve_directions(Prediction(0, 0.9), Prediction(PHYS_R, 0.6), LABELS) == \
        ("PHYS", True)
    assert resolve_directions(Prediction(PHYS_R, 0.6), None, LABELS) == ("PHYS", False)


def test_resolve_never_returns_negative(rng):
    for _ in range(500):
        a = Prediction(int(rng.integers(len(LABELS))), float(rng.random()))
        b = Prediction(int(rng.integers(len(LABELS))), float(rng.random()))
        out = resolve_directions(a, b, LABELS)
        assert (out is None) == (a.label == 0 and b.label == 0)
        if out is not None:
            assert out[0] in LABELS.types
