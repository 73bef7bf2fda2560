"""Dynamic computation graphs with reverse-mode differentiation.

A :class:`Graph` is built fresh for every training example. Each operation
appends a :class:`Node` holding its forward value and a closure that pushes
the output gradient back to its inputs. Because nodes can only reference
nodes that already exist, construction order is a topological order and
``backward`` simply walks the list in reverse.

Vectors are 1-d numpy arrays, matrices 2-d. Parameters live outside the
graph in :class:`Parameter` objects which own their gradient buffers.
"""

from __future__ import annotations

import numpy as np


class DimensionError(ValueError):
    pass


class GraphError(RuntimeError):
    pass


WEIGHT = "weight"
BIAS = "bias"
EMBEDDING = "embedding"


class Parameter:
    """A named trainable tensor plus its gradient buffer.

    ``kind`` decides optimizer treatment: only ``"weight"`` parameters
    receive L2 regularization.
    """

    __slots__ = ("name", "value", "grad", "kind")

    def __init__(self, name: str, value: np.ndarray, kind: str = WEIGHT):
        if kind not in (WEIGHT, BIAS, EMBEDDING):
            raise ValueError(f"unknown parameter kind {kind!r}")
        self.name = name
        self.value = value
        self.grad = np.zeros_like(value)
        self.kind = kind

    @property
    def shape(self):
        return self.value.shape

    def zero_grad(self):
        self.grad.fill(0)

    def __repr__(self):
        return f"Parameter({self.name!r}, shape={self.value.shape}, kind={self.kind})"


class Node:
    __slots__ = ("value", "grad", "backward_fn", "index")

    def __init__(self, value, backward_fn=None, index=-1):
        self.value = value
        self.grad = None
        self.backward_fn = backward_fn
        self.index = index

    @property
    def shape(self):
        return self.value.shape

    def __len__(self):
        return len(self.value)

    def __repr__(self):
        return f"Node(#{self.index}, shape={self.value.shape})"


def _accumulate(node: Node, g):
    if node.grad is None:
        node.grad = np.array(g, dtype=node.value.dtype, copy=True)
    else:
        node.grad += g


def _sigmoid(x):
    # split by sign so exp never overflows
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


class Graph:
    """Append-only tape of operations for one example.

    ``backward`` may be called once; a second call raises :class:`GraphError`.
    Gradients are accumulated into ``Parameter.grad`` (callers zero them).
    """

    def __init__(self):
        self.nodes: list[Node] = []
        self._param_nodes: dict[int, Node] = {}
        # (param, output-grad, input-value) triples for W·x products, flushed
        # as one matrix product per parameter at the end of backward
        self._pending_outer: dict[int, tuple[Parameter, list, list]] = {}
        self._done = False

    def _add(self, value, backward_fn=None) -> Node:
        if self._done:
            raise GraphError("graph already differentiated; build a new one")
        node = Node(value, backward_fn, len(self.nodes))
        self.nodes.append(node)
        return node

    # leaves

    def constant(self, value) -> Node:
        return self._add(np.asarray(value))

    def param(self, p: Parameter) -> Node:
        """The node for ``p`` in this graph; created once and reused."""
        node = self._param_nodes.get(id(p))
        if node is None:
            def back(g, p=p):
                p.grad += g
            node = self._add(p.value, back)
            self._param_nodes[id(p)] = node
        return node

    def lookup(self, table: Parameter, row: int) -> Node:
        if not 0 <= row < table.value.shape[0]:
            raise IndexError(f"{table.name}: row {row} out of range "
                             f"[0, {table.value.shape[0]})")

        def back(g):
            table.grad[row] += g
        return self._add(table.value[row].copy(), back)

    # arithmetic

    def affine(self, W: Parameter | Node, x: Node, b: Parameter | Node | None = None) -> Node:
        """``W @ x + b``. ``W`` may be a Parameter (fast path) or a Node."""
        return self.affine_sum([(W, x)], b)

    def affine_sum(self, terms, b=None) -> Node:
        """``sum(W_k @ x_k) + b`` over ``terms = [(W_k, x_k), ...]``."""
        if not terms and b is None:
            raise DimensionError("affine_sum needs at least one term or a bias")
        out = None
        rows = None
        for W, x in terms:
            Wv = W.value
            if Wv.ndim != 2 or x.value.ndim != 1 or Wv.shape[1] != x.value.shape[0]:
                raise DimensionError(
                    f"{_name(W)}: cannot multiply {Wv.shape} by {x.value.shape}")
            if rows is None:
                rows = Wv.shape[0]
            elif Wv.shape[0] != rows:
                raise DimensionError(f"{_name(W)}: {Wv.shape[0]} rows, expected {rows}")
            y = Wv @ x.value
            out = y if out is None else out + y
        bnode = None
        if b is not None:
            bnode = b if isinstance(b, Node) else self.param(b)
            if bnode.value.ndim != 1 or (rows is not None and bnode.value.shape[0] != rows):
                raise DimensionError(
                    f"{_name(b)}: bias shape {bnode.value.shape}, expected ({rows},)")
            out = bnode.value.copy() if out is None else out + bnode.value
        terms = list(terms)

        def back(g):
            for W, x in terms:
                if isinstance(W, Parameter):
                    entry = self._pending_outer.get(id(W))
                    if entry is None:
                        entry = (W, [], [])
                        self._pending_outer[id(W)] = entry
                    entry[1].append(g)
                    entry[2].append(x.value)
                else:
                    _accumulate(W, np.outer(g, x.value))
                _accumulate(x, W.value.T @ g)
            if bnode is not None:
                _accumulate(bnode, g)
        return self._add(out, back)

    def add(self, *xs: Node) -> Node:
        if not xs:
            raise DimensionError("add of nothing")
        shape = xs[0].value.shape
        for x in xs[1:]:
            if x.value.shape != shape:
                raise DimensionError(f"add: shapes {shape} and {x.value.shape}")
        out = xs[0].value.copy()
        for x in xs[1:]:
            out += x.value

        def back(g):
            for x in xs:
                _accumulate(x, g)
        return self._add(out, back)

    def hadamard(self, a: Node, b: Node) -> Node:
        if a.value.shape != b.value.shape:
            raise DimensionError(f"hadamard: shapes {a.value.shape} and {b.value.shape}")

        def back(g):
            _accumulate(a, g * b.value)
            _accumulate(b, g * a.value)
        return self._add(a.value * b.value, back)

    def scale(self, x: Node, c: float) -> Node:
        def back(g):
            _accumulate(x, g * c)
        return self._add(x.value * c, back)

    def sigmoid(self, x: Node) -> Node:
        y = _sigmoid(x.value)

        def back(g):
            _accumulate(x, g * y * (1 - y))
        return self._add(y, back)

    def tanh(self, x: Node) -> Node:
        y = np.tanh(x.value)

        def back(g):
            _accumulate(x, g * (1 - y * y))
        return self._add(y, back)

    def elementwise(self, kind: str, x: Node) -> Node:
        if kind == "sigmoid":
            return self.sigmoid(x)
        if kind == "tanh":
            return self.tanh(x)
        raise ValueError(f"unknown elementwise function {kind!r}")

    def concat(self, xs) -> Node:
        xs = list(xs)
        if not xs:
            raise DimensionError("concat of an empty list")
        for x in xs:
            if x.value.ndim != 1:
                raise DimensionError(f"concat expects vectors, got shape {x.value.shape}")
        if len(xs) == 1:
            return xs[0]
        out = np.concatenate([x.value for x in xs])
        offsets = np.cumsum([0] + [len(x.value) for x in xs])

        def back(g):
            for x, lo, hi in zip(xs, offsets[:-1], offsets[1:]):
                _accumulate(x, g[lo:hi])
        return self._add(out, back)

    def mean(self, xs) -> Node:
        """Element-wise average of equally shaped vectors."""
        xs = list(xs)
        if len(xs) == 1:
            return xs[0]
        return self.scale(self.add(*xs), 1.0 / len(xs))

    def sum(self, x: Node) -> Node:
        """Sum of all elements, as a 0-d node."""
        def back(g):
            _accumulate(x, np.full_like(x.value, g))
        return self._add(np.asarray(x.value.sum()), back)

    def dot(self, x: Node, w) -> Node:
        """Scalar ``w · x`` for a constant array ``w``."""
        w = np.asarray(w, dtype=x.value.dtype)
        if w.shape != x.value.shape:
            raise DimensionError(f"dot: shapes {x.value.shape} and {w.shape}")

        def back(g):
            _accumulate(x, g * w)
        return self._add(np.asarray((x.value * w).sum()), back)

    def sum_scalars(self, xs) -> Node:
        xs = list(xs)
        if not xs:
            return self.constant(np.zeros((), dtype=np.float64))
        out = np.asarray(sum(x.value for x in xs))

        def back(g):
            for x in xs:
                _accumulate(x, g)
        return self._add(out, back)

    def pick_neg_log_softmax(self, logits: Node, gold: int) -> Node:
        """``-log softmax(logits)[gold]`` with max-subtraction."""
        z = logits.value
        if z.ndim != 1:
            raise DimensionError(f"logits must be a vector, got {z.shape}")
        if not 0 <= gold < len(z):
            raise IndexError(f"gold class {gold} out of range [0, {len(z)})")
        shifted = z - z.max()
        e = np.exp(shifted)
        total = e.sum()
        loss = np.log(total) - shifted[gold]

        def back(g):
            d = e / total
            d[gold] -= 1
            _accumulate(logits, g * d)
        return self._add(np.asarray(loss), back)

    def dropout(self, x: Node, p: float, training: bool, rng=None) -> Node:
        """Inverted dropout; identity when not training or ``p == 0``."""
        if not 0 <= p < 1:
            raise ValueError(f"dropout probability must be in [0, 1), got {p}")
        if not training or p == 0:
            return x
        keep = (rng.random(x.value.shape) >= p).astype(x.value.dtype) / (1 - p)

        def back(g):
            _accumulate(x, g * keep)
        return self._add(x.value * keep, back)

    # differentiation

    def backward(self, loss: Node):
        """Propagate d(loss)/d(.) to every node and parameter reachable.

        Nodes are visited in strict reverse construction order.
        """
        if self._done:
            raise GraphError("backward already called on this graph")
        if loss.value.size != 1:
            raise DimensionError(f"loss must be scalar, got shape {loss.value.shape}")
        self._done = True
        loss.grad = np.ones_like(loss.value)
        for node in reversed(self.nodes[: loss.index + 1]):
            if node.grad is not None and node.backward_fn is not None:
                node.backward_fn(node.grad)
        for W, gs, xs in self._pending_outer.values():
            W.grad += np.stack(gs, axis=1) @ np.stack(xs, axis=0)
        self._pending_outer.clear()


def _name(x):
    return x.name if isinstance(x, Parameter) else repr(x)


def softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()
