import numpy as np
import pytest

from conftest import fd_params
from relex.autodiff import DimensionError, Graph, ParamStore
from relex.autodiff.gradcheck import check_parameters
from relex.encoder import EmbedTables, LSTMCell, embed_token, lstm_step, sequence_layer


def _store(seed=0):
    return ParamStore(np.random.default_rng(seed), np.float64)


def _zero(cell):
    for p in cell.parameters():
        p.value[...] = 0


def test_embed_dims_default_sizes():
    tables = EmbedTables(_store(), "e.", 10, 5, 4, 3, 200, 25, 25, 25)
    g = Graph()
    x = embed_token(g, tables, 0, 0)
    assert x.value.shape == (225,)
    assert np.array_equal(x.value[:200], tables.word.value[0])
    with pytest.raises(IndexError):
        embed_token(g, tables, 10, 0)


def test_embed_gradient_touches_two_rows(rng):
    tables = EmbedTables(_store(), "e.", 6, 4, 0, 0, 3, 2, 0, 0)
    w = rng.standard_normal(5)
    g = Graph()
    g.backward(g.dot(embed_token(g, tables, 2, 3), w))
    assert np.array_equal(np.flatnonzero(np.abs(tables.word.grad).sum(1)), [2])
    assert np.array_equal(np.flatnonzero(np.abs(tables.pos.grad).sum(1)), [3])

    def loss(backward):
        g = Graph()
        out = g.dot(embed_token(g, tables, 2, 3), w)
        if backward:
            g.backward(out)
        return float(out.value)
    tables.word.zero_grad()
    tables.pos.zero_grad()
    assert max(r.max_rel_err for r in check_parameters(loss, [tables.word, tables.pos])) <= 1e-6


def test_lstm_zero_weights_zero_state():
    cell = LSTMCell(_store(), "c.", 3, 4)
    _zero(cell)
    g = Graph()
    h, c = lstm_step(g, cell, g.constant(np.zeros(3)))
    assert not h.value.any() and not c.value.any()


def test_lstm_hand_evaluation_with_unit_cell():
    cell = LSTMCell(_store(), "c.", 3, 4)
    _zero(cell)
    g = Graph()
    h, c = lstm_step(g, cell, g.constant(np.zeros(3)), g.constant(np.zeros(4)),
                     g.constant(np.ones(4)))
    assert np.allclose(c.value, 0.5, atol=1e-15)
    assert np.allclose(h.value, 0.5 * np.tanh(0.5), atol=1e-15)


def test_lstm_step_gradcheck_all_twelve_tensors(rng):
    store = _store(1)
    cell = LSTMCell(store, "c.", 7, 5)
    assert len(cell.parameters()) == 12
    x, h0, c0, w = (rng.standard_normal(k) for k in (7, 5, 5, 5))

    def loss(backward):
        g = Graph()
        h, c = lstm_step(g, cell, g.constant(x), g.constant(h0), g.constant(c0))
        out = g.add(g.dot(h, w), g.dot(c, w))
        if backward:
            g.backward(out)
        return float(out.value)
    results = check_parameters(loss, cell.parameters())
    assert len(results) == 12 and max(r.max_rel_err for r in results) <= 1e-4


def test_lstm_dimension_mismatch():
    cell = LSTMCell(_store(), "c.", 3, 4)
    g = Graph()
    with pytest.raises(DimensionError):
        lstm_step(g, cell, g.constant(np.zeros(2)))


def test_lstm_hidden_is_bounded(rng):
    cell = LSTMCell(_store(2), "c.", 3, 4)
    for p in cell.parameters():
        p.value[...] = rng.standard_normal(p.shape) * 10
    g = Graph()
    h, c = None, None
    for _ in range(20):
        h, c = lstm_step(g, cell, g.constant(rng.standard_normal(3) * 10), h, c)
        assert np.all(np.abs(h.value) < 1)


def test_sequence_layer_single_token():
    store = _store()
    fw, bw = LSTMCell(store, "f.", 3, 2), LSTMCell(store, "b.", 3, 2)
    g = Graph()
    x = g.constant(np.array([0.1, -0.2, 0.3]))
    s = sequence_layer(g, [x], fw, bw)
    assert len(s) == 1
    assert np.array_equal(s[0].value[:2], lstm_step(g, fw, x)[0].value)
    assert np.array_equal(s[0].value[2:], lstm_step(g, bw, x)[0].value)
    with pytest.raises(DimensionError):
        sequence_layer(g, [], fw, bw)


def test_sequence_layer_default_width():
    store = _store()
    fw, bw = LSTMCell(store, "f.", 225, 100), LSTMCell(store, "b.", 225, 100)
    g = Graph()
    s = sequence_layer(g, [g.constant(np.zeros(225))] * 3, fw, bw)
    assert all(v.value.shape == (200,) for v in s)


def test_reversal_symmetry_with_tied_directions(rng):
    store = _store(3)
    fw, bw = LSTMCell(store, "f.", 4, 3), LSTMCell(store, "b.", 4, 3)
    for a, b in zip(fw.parameters(), bw.parameters()):
        b.value[...] = a.value
    xs = [rng.standard_normal(4) for _ in range(5)]
    g = Graph()
    s = sequence_layer(g, [g.constant(x) for x in xs], fw, bw)
    r = sequence_layer(g, [g.constant(x) for x in xs[::-1]], fw, bw)
    for t in range(5):
        mirrored = r[4 - t].value
        assert np.allclose(s[t].value, np.concatenate([mirrored[3:], mirrored[:3]]), atol=1e-14)


def test_every_state_depends_on_every_token(rng):
    store = _store(4)
    fw, bw = LSTMCell(store, "f.", 4, 3), LSTMCell(store, "b.", 4, 3)
    xs = [rng.standard_normal(4) for _ in range(5)]
    for t in range(5):
        g = Graph()
        nodes = [g.constant(x) for x in xs]
        s = sequence_layer(g, nodes, fw, bw)
        g.backward(g.sum(s[t]))
        assert all(np.abs(n.grad).sum() > 0 for n in nodes)


def test_sequence_layer_gradcheck(rng):
    xs = [rng.standard_normal(3) for _ in range(4)]
    store = _store(5)
    fw, bw = LSTMCell(store, "f.", 3, 2), LSTMCell(store, "b.", 3, 2)
    w = rng.standard_normal((4, 4))
    err = fd_params(lambda g, n, p: g.sum_scalars(
        [g.dot(v, wt) for v, wt in zip(sequence_layer(g, n, fw, bw), w)]), xs)
    assert err <= 1e-6
