"""Adam with L2 on weights, global-norm clipping, and parameter averaging."""

from __future__ import annotations

import numpy as np

from .graph import WEIGHT, DimensionError, Parameter


def global_norm(grads) -> float:
    return float(np.sqrt(sum(float(np.vdot(g, g)) for g in grads)))


def clip_gradients(params, threshold: float) -> float:
    """Scale all gradients in place so their joint L2 norm is <= threshold.

    Returns the norm before clipping.
    """
    if threshold <= 0:
        raise ValueError(f"clip threshold must be positive, got {threshold}")
    params = list(params)
    norm = global_norm(p.grad for p in params)
    if norm > threshold:
        scale = threshold / norm
        for p in params:
            p.grad *= scale
    return norm


class AdamState:
    """Moment estimates and step count for a fixed list of parameters."""

    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8, l2=0.0):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.l2 = l2
        self.t = 0
        self.m = {p.name: np.zeros_like(p.value) for p in self.params}
        self.v = {p.name: np.zeros_like(p.value) for p in self.params}

    def step(self):
        """One bias-corrected Adam update from the current ``grad`` buffers.

        ``l2 * W`` is added to the gradient of weight matrices only; biases
        and embeddings are not regularized.
        """
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        c1 = 1 - b1 ** self.t
        c2 = 1 - b2 ** self.t
        for p in self.params:
            g = p.grad
            if g.shape != p.value.shape:
                raise DimensionError(f"{p.name}: gradient {g.shape} vs value {p.value.shape}")
            if self.l2 and p.kind == WEIGHT:
                g = g + self.l2 * p.value
            m = self.m[p.name]
            v = self.v[p.name]
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * (g * g)
            if self.lr == 0:
                continue
            p.value -= (self.lr / c1) * m / (np.sqrt(v / c2) + self.eps)


def adam_step(params, state: AdamState):
    """Functional-style wrapper: update ``params`` (which must be the
    parameters ``state`` was built for) and return them."""
    names = [p.name for p in params]
    if names != [p.name for p in state.params]:
        raise DimensionError("parameter list does not match Adam state")
    state.step()
    return params


class AveragedParams:
    """Running arithmetic mean of parameter snapshots."""

    def __init__(self, params):
        self.params = list(params)
        self.count = 0
        self.average = {p.name: np.zeros_like(p.value, dtype=np.float64) for p in self.params}

    def update(self):
        self.count += 1
        n = self.count
        for p in self.params:
            avg = self.average[p.name]
            avg += (p.value - avg) / n

    def snapshot(self) -> dict[str, np.ndarray]:
        """Averaged values cast back to each parameter's dtype.

        Before any update, the current parameter values are returned.
        """
        if self.count == 0:
            return {p.name: p.value.copy() for p in self.params}
        return {p.name: self.average[p.name].astype(p.value.dtype) for p in self.params}


def update_average(avg: AveragedParams, params=None) -> AveragedParams:
    avg.update()
    return avg
