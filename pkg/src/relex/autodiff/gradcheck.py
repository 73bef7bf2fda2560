"""Central finite differences, the reference for analytic gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class CheckResult:
    name: str
    max_rel_err: float
    n_elements: int

    def ok(self, tol: float) -> bool:
        return self.max_rel_err <= tol


def relative_error(analytic, numeric, floor: float = 1e-6):
    """|a - n| / max(|a|, |n|, floor), element-wise.

    The floor keeps elements whose true gradient is ~0 from turning
    round-off into large ratios.
    """
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return np.abs(analytic - numeric) / denom


def numeric_gradient(f, array: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """d f() / d array by central differences, perturbing ``array`` in place."""
    grad = np.zeros(array.shape, dtype=np.float64)
    flat = array.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + h
        up = f()
        flat[i] = old - h
        down = f()
        flat[i] = old
        gflat[i] = (up - down) / (2 * h)
    return grad


def check_parameters(loss_fn, params, h: float = 1e-5, floor: float = 1e-6) -> list[CheckResult]:
    """Compare analytic and numeric gradients for every element of ``params``.

    ``loss_fn(backward: bool) -> float`` must rebuild its graph on each call;
    with ``backward=True`` it also fills each ``p.grad`` (zeroed here first).
    ``floor`` is the smallest denominator of the relative error; round-off
    in the difference quotient is about ``1e-16 * |loss| / h``, so losses
    much larger than 1 need a larger floor.
    """
    params = list(params)
    for p in params:
        p.zero_grad()
    loss_fn(True)
    analytic = {p.name: p.grad.copy() for p in params}
    results = []
    for p in params:
        numeric = numeric_gradient(lambda: loss_fn(False), p.value, h)
        err = relative_error(analytic[p.name], numeric, floor)
        results.append(CheckResult(p.name, float(err.max()) if err.size else 0.0, err.size))
    return results
