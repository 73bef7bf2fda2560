from __future__ import annotations

import numpy as np

from .graph import BIAS, EMBEDDING, WEIGHT, Parameter


class ParamStore:
    """Ordered collection of named parameters with seeded initialization.

    Weight matrices get Glorot-uniform values, biases zeros (or a constant),
    embeddings uniform(-0.1, 0.1).
    """

    def __init__(self, rng: np.random.Generator, dtype=np.float32):
        self.rng = rng
        self.dtype = np.dtype(dtype)
        self.params: dict[str, Parameter] = {}

    def _add(self, name, value, kind):
        if name in self.params:
            raise KeyError(f"duplicate parameter name {name}")
        p = Parameter(name, value.astype(self.dtype), kind)
        self.params[name] = p
        return p

    def weight(self, name, rows, cols) -> Parameter:
        limit = np.sqrt(6.0 / (rows + cols))
        return self._add(name, self.rng.uniform(-limit, limit, (rows, cols)), WEIGHT)

    def bias(self, name, n, value=0.0) -> Parameter:
        return self._add(name, np.full(n, value), BIAS)

    def embedding(self, name, rows, cols) -> Parameter:
        return self._add(name, self.rng.uniform(-0.1, 0.1, (rows, cols)), EMBEDDING)

    def __getitem__(self, name) -> Parameter:
        return self.params[name]

    def __iter__(self):
        return iter(self.params.values())

    def __len__(self):
        return len(self.params)

    def select(self, prefixes) -> list[Parameter]:
        return [p for p in self.params.values() if p.name.startswith(tuple(prefixes))]

    def shapes(self) -> dict[str, tuple]:
        return {n: p.value.shape for n, p in self.params.items()}

    def values(self) -> dict[str, np.ndarray]:
        return {n: p.value for n, p in self.params.items()}

    def copy_values(self) -> dict[str, np.ndarray]:
        return {n: p.value.copy() for n, p in self.params.items()}

    def assign(self, values: dict[str, np.ndarray]):
        for name, value in values.items():
            p = self.params[name]
            p.value[...] = value

    def zero_grad(self):
        for p in self.params.values():
            p.zero_grad()
