"""Time-domain solvers for the closed-loop fractional systems.

Two independent discretizations are provided on purpose:

* `simulate_state_space` integrates a StateModel with the explicit Euler
  scheme, every fractional right-hand-side term expanded as a GL sum.
* `simulate_direct` discretizes the scalar closed-loop differential
  equation itself, isolating the newest sample from the j=0 terms of the
  GL sums.  It shares no model-building code with the state-space path
  and serves as its oracle.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergedError, ResourceLimitError, SingularStepError
from .glcalc import gl_coefficients
from .model import INPUT, PdController, PiController, Plant, StateModel

__all__ = [
    "StepInput",
    "SimConfig",
    "Trajectory",
    "simulate_state_space",
    "simulate_direct",
    "steady_state_estimate",
]

#: Any state or output beyond this magnitude aborts the run as diverged.
DIVERGENCE_LIMIT = 1e12

_DEFAULT_MAX_STEPS = 10 ** 6


def _max_steps() -> int:
    return int(os.environ.get("FRACREG_MAX_STEPS", _DEFAULT_MAX_STEPS))


@dataclass(frozen=True)
class StepInput:
    """Step reference applied at t = 0 (zero before)."""

    amplitude: float = 1.0


@dataclass(frozen=True)
class SimConfig:
    step: float
    t_end: float
    memory_len: float | None = None
    input: object = field(default_factory=StepInput)

    def __post_init__(self):
        if not (0 < self.step <= 0.1):
            raise ValueError(f"step must be in (0, 0.1], got {self.step}")
        if self.t_end < 10 * self.step:
            raise ValueError("t_end must cover at least 10 steps")
        if self.memory_len is not None and self.memory_len <= 0:
            raise ValueError("memory_len must be positive")

    @property
    def n_steps(self) -> int:
        n = int(round(self.t_end / self.step))
        if n > _max_steps():
            raise ResourceLimitError(
                f"{n} steps exceed the cap of {_max_steps()} "
                "(override with FRACREG_MAX_STEPS)"
            )
        return n


@dataclass(frozen=True)
class Trajectory:
    """Sampled run: states (one array per state, may be empty), output, input."""

    step: float
    states: tuple
    output: np.ndarray
    input: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return self.step * np.arange(len(self.output))

    @property
    def duration(self) -> float:
        return (len(self.output) - 1) * self.step


def _input_samples(cfg: SimConfig, n: int) -> np.ndarray:
    if isinstance(cfg.input, StepInput):
        return np.full(n + 1, cfg.input.amplitude)
    w = np.asarray(cfg.input, dtype=float)
    if len(w) < n + 1:
        raise ValueError(f"explicit input has {len(w)} samples, need {n + 1}")
    return w[: n + 1]


def _gl_sum(coeffs, series, k, n_mem):
    n = min(k, n_mem)
    return np.dot(coeffs[: n + 1], series[k - n : k + 1][::-1])


def simulate_state_space(model: StateModel, cfg: SimConfig) -> Trajectory:
    """Explicit Euler integration of a StateModel from zero initial state."""
    h = cfg.step
    n = cfg.n_steps
    w = _input_samples(cfg, n)
    n_mem = n if cfg.memory_len is None else min(n, int(math.floor(cfg.memory_len / h)))

    tables = {}
    for eq in list(model.state_terms) + [model.output_terms]:
        for term in eq:
            if term.order != 0 and term.order not in tables:
                tables[term.order] = gl_coefficients(term.order, n_mem).coeffs

    x = np.zeros((model.dim, n + 1))
    y = np.zeros(n + 1)

    def series(target):
        return w if target == INPUT else x[target]

    # (series, coeffs or None for order 0, gain * h^-order)
    eqs = [
        [(series(t.target), tables.get(t.order), t.gain * h ** (-t.order)) for t in eq]
        for eq in model.state_terms
    ]
    out_terms = [
        (series(t.target), tables.get(t.order), t.gain * h ** (-t.order))
        for t in model.output_terms
    ]

    def output_at(k):
        total = 0.0
        for ser, coeffs, scale in out_terms:
            total += scale * (ser[k] if coeffs is None else _gl_sum(coeffs, ser, k, n_mem))
        return total

    def partial(upto):
        return Trajectory(step=h, states=tuple(x[i, :upto].copy() for i in range(model.dim)),
                          output=y[:upto].copy(), input=w[:upto].copy())

    for k in range(n):
        y[k] = output_at(k)
        for i in range(model.dim):
            rhs = 0.0
            for ser, coeffs, scale in eqs[i]:
                rhs += scale * (ser[k] if coeffs is None else _gl_sum(coeffs, ser, k, n_mem))
            x[i, k + 1] = x[i, k] + h * rhs
        bad = np.max(np.abs(x[:, k + 1]))
        if not np.isfinite(bad) or bad > DIVERGENCE_LIMIT:
            raise DivergedError(
                f"state magnitude {bad:.3g} at step {k + 1} (t={h * (k + 1):.6g})",
                index=k + 1,
                trajectory=partial(k + 1),
            )
    y[n] = output_at(n)
    return Trajectory(step=h, states=tuple(x[i] for i in range(model.dim)), output=y, input=w)


def _direct_terms(plant: Plant, ctrl):
    """(output-side, input-side) lists of (coeff, derivative order)."""
    if isinstance(ctrl, PdController):
        y_terms = [
            (plant.a2, plant.alpha),
            (plant.a1, plant.beta),
            (ctrl.Td, ctrl.delta),
            (plant.a0 + ctrl.K, 0.0),
        ]
        w_terms = [(ctrl.K, 0.0), (ctrl.Td, ctrl.delta)]
    elif isinstance(ctrl, PiController):
        y_terms = [
            (plant.a2, plant.alpha + ctrl.lam),
            (plant.a1, plant.beta + ctrl.lam),
            (plant.a0 + ctrl.K, ctrl.lam),
            (ctrl.Ti, 0.0),
        ]
        w_terms = [(ctrl.K, ctrl.lam), (ctrl.Ti, 0.0)]
    else:
        raise TypeError(f"unsupported controller type {type(ctrl).__name__}")
    return y_terms, w_terms


def simulate_direct(plant: Plant, ctrl, cfg: SimConfig) -> Trajectory:
    """GL discretization of the scalar closed-loop equation itself.

    Solves for the newest output sample at every step; produces no state
    trajectories, only y.
    """
    h = cfg.step
    n = cfg.n_steps
    w = _input_samples(cfg, n)
    n_mem = n if cfg.memory_len is None else min(n, int(math.floor(cfg.memory_len / h)))

    y_terms, w_terms = _direct_terms(plant, ctrl)
    y_parts = [(c * h ** (-q), gl_coefficients(q, n_mem).coeffs) for c, q in y_terms]
    w_parts = [(c * h ** (-q), gl_coefficients(q, n_mem).coeffs) for c, q in w_terms]

    pivot = sum(scale for scale, _ in y_parts)  # j=0 weights are all 1
    denom_scale = max(abs(scale) for scale, _ in y_parts)
    if abs(pivot) <= 1e-14 * denom_scale:
        raise SingularStepError(f"leading GL weights sum to {pivot:.3g}")

    y = np.zeros(n + 1)
    for k in range(n + 1):
        rhs = 0.0
        for scale, coeffs in w_parts:
            rhs += scale * _gl_sum(coeffs, w, k, n_mem)
        if k > 0:
            m = min(k, n_mem)
            hist = y[k - m : k][::-1]
            for scale, coeffs in y_parts:
                rhs -= scale * np.dot(coeffs[1 : m + 1], hist)
        y[k] = rhs / pivot
        if not np.isfinite(y[k]) or abs(y[k]) > DIVERGENCE_LIMIT:
            raise DivergedError(
                f"output magnitude {abs(y[k]):.3g} at step {k} (t={h * k:.6g})",
                index=k,
                trajectory=Trajectory(step=h, states=(), output=y[:k].copy(),
                                      input=w[:k].copy()),
            )
    return Trajectory(step=h, states=(), output=y, input=w)


def steady_state_estimate(traj: Trajectory, window: float):
    """(mean, max-min) of the output over the trailing window in seconds."""
    if window > traj.duration:
        raise ValueError(f"window {window}s exceeds trajectory duration {traj.duration}s")
    n_w = max(1, int(round(window / traj.step)))
    tail = traj.output[-(n_w + 1):]
    return float(np.mean(tail)), float(np.max(tail) - np.min(tail))
