"""Embedding tables and the bidirectional sequential LSTM layer."""

from __future__ import annotations

from .autodiff import DimensionError, Graph, Node, ParamStore

GATES = ("i", "f", "o", "u")


class EmbedTables:
    """Lookup tables for words, POS tags, dependency types and entity labels.

    ``n_labels`` may be 0 (no label embeddings, as in nominal-pair mode).
    """

    def __init__(self, store: ParamStore, prefix: str, n_words, n_pos, n_deps, n_labels,
                 word_dim, pos_dim, dep_dim, label_dim):
        self.word = store.embedding(f"{prefix}word", n_words, word_dim)
        self.pos = store.embedding(f"{prefix}pos", n_pos, pos_dim)
        self.dep = store.embedding(f"{prefix}dep", n_deps, dep_dim) if n_deps else None
        self.label = store.embedding(f"{prefix}label", n_labels, label_dim) if n_labels else None

    @property
    def token_dim(self) -> int:
        return self.word.shape[1] + self.pos.shape[1]


def embed_token(g: Graph, tables: EmbedTables, word_id: int, pos_id: int,
                dropout: float = 0.0, training: bool = False, rng=None) -> Node:
    """``[v_word; v_pos]`` with dropout on the concatenation."""
    x = g.concat([g.lookup(tables.word, word_id), g.lookup(tables.pos, pos_id)])
    return g.dropout(x, dropout, training, rng)


class LSTMCell:
    """Parameters of one LSTM direction: W, U and b for each of the four gates."""

    def __init__(self, store: ParamStore, prefix: str, input_dim: int, hidden_dim: int,
                 forget_bias: float = 0.0):
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.W = {k: store.weight(f"{prefix}W_{k}", hidden_dim, input_dim) for k in GATES}
        self.U = {k: store.weight(f"{prefix}U_{k}", hidden_dim, hidden_dim) for k in GATES}
        self.b = {k: store.bias(f"{prefix}b_{k}", hidden_dim, forget_bias if k == "f" else 0.0)
                  for k in GATES}

    def parameters(self):
        return [*self.W.values(), *self.U.values(), *self.b.values()]


def lstm_step(g: Graph, cell: LSTMCell, x: Node, h_prev: Node | None = None,
              c_prev: Node | None = None) -> tuple[Node, Node]:
    """One LSTM transition. ``None`` states stand for zero vectors."""
    if x.value.shape != (cell.input_dim,):
        raise DimensionError(f"lstm input has shape {x.value.shape}, expected ({cell.input_dim},)")

    def pre(k):
        terms = [(cell.W[k], x)]
        if h_prev is not None:
            terms.append((cell.U[k], h_prev))
        return g.affine_sum(terms, cell.b[k])

    i = g.sigmoid(pre("i"))
    o = g.sigmoid(pre("o"))
    u = g.tanh(pre("u"))
    c = g.hadamard(i, u)
    if c_prev is not None:
        f = g.sigmoid(pre("f"))
        c = g.add(c, g.hadamard(f, c_prev))
    h = g.hadamard(o, g.tanh(c))
    return h, c


def run_lstm(g: Graph, cell: LSTMCell, xs) -> list[Node]:
    h = c = None
    out = []
    for x in xs:
        h, c = lstm_step(g, cell, x, h, c)
        out.append(h)
    return out


def sequence_layer(g: Graph, xs, forward: LSTMCell, backward: LSTMCell) -> list[Node]:
    """``s_t = [forward h_t; backward h_t]`` for every position."""
    xs = list(xs)
    if not xs:
        raise DimensionError("sequence layer needs at least one token")
    fw = run_lstm(g, forward, xs)
    bw = run_lstm(g, backward, xs[::-1])[::-1]
    return [g.concat([a, b]) for a, b in zip(fw, bw)]
