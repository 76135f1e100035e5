"""Grünwald-Letnikov coefficients and discrete fractional differentiation.

The GL approximation of a derivative of real order q on a uniform grid is

    D^q f(t_k)  ~  h^(-q) * sum_{j=0..N} b_j f(t_{k-j}),

where the weights b_j = (-1)^j C(q, j) satisfy the recurrence
b_0 = 1, b_j = (1 - (1+q)/j) b_{j-1}.  Negative q gives the fractional
integral with the same formula.  Signals are assumed at rest (zero)
before t = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["GlTable", "SampledSignal", "gl_coefficients", "gl_apply", "gl_series"]


@dataclass(frozen=True)
class GlTable:
    """GL weight sequence b_0..b_N for one derivative order."""

    order: float
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))
        self.coeffs.setflags(write=False)

    def __len__(self):
        return len(self.coeffs)


@dataclass(frozen=True)
class SampledSignal:
    """Uniformly sampled signal: values[k] is the sample at t = k*step."""

    step: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not (self.step > 0):
            raise ValueError(f"step must be positive, got {self.step}")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 1 or len(self.values) == 0:
            raise ValueError("values must be a non-empty 1-D sequence")

    def __len__(self):
        return len(self.values)

    @property
    def duration(self):
        return (len(self.values) - 1) * self.step


def gl_coefficients(order: float, count: int) -> GlTable:
    """Generate GL weights b_0..b_count for the given derivative order.

    Uses the one-term recurrence; for a non-negative integer order m the
    weights vanish identically for j > m, reproducing the classical
    finite-difference stencil.
    """
    if not math.isfinite(order):
        raise ValueError(f"order must be finite, got {order}")
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    coeffs = np.empty(count + 1)
    coeffs[0] = 1.0
    if count > 0:
        j = np.arange(1, count + 1, dtype=float)
        coeffs[1:] = np.cumprod(1.0 - (1.0 + order) / j)
    return GlTable(order=order, coeffs=coeffs)


def _truncation(k: int, step: float, memory_len) -> int:
    """Number of history samples (beyond the current one) entering the sum."""
    if memory_len is None:
        return k
    if memory_len <= 0:
        raise ValueError(f"memory_len must be positive, got {memory_len}")
    return min(k, int(math.floor(memory_len / step)))


def gl_apply(history: SampledSignal, order: float, memory_len: float | None = None) -> float:
    """GL derivative of the given order at the last sample of `history`.

    `memory_len` truncates the sum to the trailing window of that many
    seconds (short-memory principle); by default the full history is used.
    """
    k = len(history) - 1
    n = _truncation(k, history.step, memory_len)
    table = gl_coefficients(order, n)
    window = history.values[k - n : k + 1][::-1]
    return history.step ** (-order) * float(np.dot(table.coeffs, window))


def gl_series(signal: SampledSignal, order: float, memory_len: float | None = None) -> SampledSignal:
    """Apply the GL derivative at every sample; same grid as the input."""
    k_max = len(signal) - 1
    n_max = _truncation(k_max, signal.step, memory_len)
    table = gl_coefficients(order, n_max)
    scale = signal.step ** (-order)
    values = signal.values
    out = np.empty_like(values)
    for k in range(len(values)):
        n = min(k, n_max)
        out[k] = scale * np.dot(table.coeffs[: n + 1], values[k - n : k + 1][::-1])
    return SampledSignal(step=signal.step, values=out)
