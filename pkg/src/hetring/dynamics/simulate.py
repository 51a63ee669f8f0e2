"""Iteration of the inhibitory coupled logistic map.

``x_k <- r x_k (1 - x_k) exp(-gamma * sum of x over the inhibitors of k)``

Runs can be carried out in linear coordinates (the map as written) or in
logarithmic coordinates ``y = log x``,

``y_k <- y_k + log r + log1p(-exp(y_k)) - gamma * sum exp(y)``,

which is the same map but does not underflow when a trajectory approaches a
stable cycle and its small components fall below 1e-308.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, SimulationError, ValidationError
from ..graph import CouplingGraph
from ..network import FixedPoint, active_value
from . import backend

_NO_FLOOR = float("nan")


@dataclass(frozen=True)
class SimParams:
    """Everything needed to reproduce a run.

    ``initial`` is a linear state unless ``initial_is_log`` is set, in which case
    it holds logarithms (use this for states too small to represent linearly).
    ``floor`` clamps each component at ``max(x, floor)`` after every step.
    """

    graph: CouplingGraph
    r: float
    gamma: float
    steps: int
    initial: np.ndarray
    floor: float | None = None
    record_every: int = 1
    log_space: bool = False
    initial_is_log: bool = False

    def __post_init__(self):
        if not (0.0 < self.r <= 4.0):
            raise ValidationError(f"r must lie in (0, 4], got {self.r}")
        if self.gamma < 0:
            raise ValidationError(f"gamma must be >= 0, got {self.gamma}")
        if self.steps < 0:
            raise ValidationError(f"steps must be >= 0, got {self.steps}")
        if self.record_every < 1:
            raise ValidationError(f"record_every must be >= 1, got {self.record_every}")
        if self.floor is not None and not (0.0 < self.floor < 1.0):
            raise ValidationError(f"floor must lie in (0, 1), got {self.floor}")
        x = np.array(self.initial, dtype=float)
        if x.shape != (self.graph.n,):
            raise ValidationError(f"initial state has shape {x.shape}, expected ({self.graph.n},)")
        if self.initial_is_log:
            if np.isnan(x).any() or (x > 0).any():
                raise ValidationError("log initial state must be <= 0 and not NaN")
        elif not np.all((x >= 0) & (x <= 1)):
            raise ValidationError("initial state must lie in [0, 1]^n")
        x.setflags(write=False)
        object.__setattr__(self, "initial", x)

    def linear_initial(self) -> np.ndarray:
        return np.exp(self.initial) if self.initial_is_log else self.initial.copy()

    def log_initial(self) -> np.ndarray:
        if self.initial_is_log:
            return self.initial.copy()
        with np.errstate(divide="ignore"):
            return np.log(self.initial)

    def to_dict(self) -> dict:
        return {
            "n": self.graph.n,
            "edges": self.graph.edges(),
            "r": self.r,
            "gamma": self.gamma,
            "steps": self.steps,
            "initial": [float(v) for v in self.initial],
            "initial_is_log": self.initial_is_log,
            "floor": self.floor,
            "record_every": self.record_every,
            "log_space": self.log_space,
        }


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    params: SimParams
    logs: np.ndarray | None = None
    underflow_at: int | None = None
    backend: str = field(default="compiled", compare=False)

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValidationError("times and states differ in length")
        if np.isnan(self.states).any():
            raise ValidationError("trajectory contains NaN")

    def __len__(self):
        return len(self.times)

    def log_states(self) -> np.ndarray:
        if self.logs is not None:
            return self.logs
        with np.errstate(divide="ignore"):
            return np.log(self.states)

    def to_csv(self, path, log_columns: bool = False):
        n = self.states.shape[1]
        header = ["i"] + [f"x{k}" for k in range(1, n + 1)]
        if log_columns:
            header += [f"logx{k}" for k in range(1, n + 1)]
        logs = self.log_states() if log_columns else None
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row, t in enumerate(self.times):
                vals = [int(t)] + [repr(float(v)) for v in self.states[row]]
                if logs is not None:
                    vals += [repr(float(v)) for v in logs[row]]
                w.writerow(vals)


def step(g: CouplingGraph, r: float, gamma: float, state, kernels=None) -> np.ndarray:
    """One application of the map to a linear state."""
    k = kernels or backend.get()
    x = np.ascontiguousarray(state, dtype=float)
    out = np.empty_like(x)
    ptr, idx = g.inhibitor_csr()
    k.step_linear(x, out, float(r), float(gamma), ptr, idx)
    return out


def step_log(g: CouplingGraph, r: float, gamma: float, logstate, kernels=None) -> np.ndarray:
    """One application of the map in logarithmic coordinates."""
    k = kernels or backend.get()
    y = np.ascontiguousarray(logstate, dtype=float)
    out = np.empty_like(y)
    ptr, idx = g.inhibitor_csr()
    k.step_log(y, out, math.log(r), float(gamma), ptr, idx)
    return out


def simulate(params: SimParams, kernels=None) -> Trajectory:
    """Iterate ``params.steps`` times, recording every ``record_every`` steps and the last.

    Raises :class:`SimulationError` at the first NaN.  A component dropping from a
    positive value to exactly zero (or ``-inf`` in log space) triggers a
    ``RuntimeWarning``: it has landed on an invariant subspace it cannot leave.
    """
    k = kernels or backend.get()
    ptr, idx = params.graph.inhibitor_csr()
    if params.log_space:
        start = params.log_initial()
        floor = math.log(params.floor) if params.floor is not None else _NO_FLOOR
    else:
        start = params.linear_initial()
        floor = params.floor if params.floor is not None else _NO_FLOOR
    times, states, underflow, bad = k.run(
        np.ascontiguousarray(start), int(params.steps), float(params.r), math.log(params.r),
        float(params.gamma), ptr, idx, bool(params.log_space), float(floor), int(params.record_every),
    )
    if bad >= 0:
        raise SimulationError(f"non-finite state at iteration {bad}", iteration=int(bad))
    under = int(underflow) if underflow >= 0 else None
    if under is not None:
        warnings.warn(
            f"a component underflowed to exactly zero at iteration {under}; "
            "use log_space=True or set a floor for long runs near stable cycles",
            RuntimeWarning,
            stacklevel=2,
        )
    if params.log_space:
        return Trajectory(times, np.exp(states), params, logs=states, underflow_at=under,
                          backend=backend.name_of(k))
    return Trajectory(times, states, params, underflow_at=under, backend=backend.name_of(k))


def make_rng(seed: int, stream: int | None = None) -> np.random.Generator:
    """PCG64 generator; ``stream`` derives an independent child stream from ``seed``."""
    if stream is None:
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream])))


def perturbed_ic(fp: FixedPoint, epsilon: float, seed: int, bias: int | None = None,
                 bias_ratio: float = 1e-3) -> np.ndarray:
    """Fixed point plus uniform noise in ``(0, epsilon]`` on its zero coordinates.

    With ``bias`` set, every zero coordinate except node ``bias`` has its noise
    scaled by ``bias_ratio``, so that node leads the escape from ``fp``.
    """
    xhat = fp.xhat
    if not (0.0 <= epsilon < xhat / 10):
        raise DomainError(f"epsilon must lie in [0, xhat/10) = [0, {xhat / 10}), got {epsilon}")
    state = fp.state()
    if epsilon == 0:
        return state
    rng = make_rng(seed)
    zeros = [k for k in range(fp.n) if k + 1 not in fp.active]
    noise = epsilon * (1.0 - rng.random(len(zeros)))
    if bias is not None:
        if bias in fp.active or not (1 <= bias <= fp.n):
            raise DomainError(f"bias node {bias} must be an inactive node of {fp.label}")
        noise = np.where(np.asarray(zeros) + 1 == bias, noise, noise * bias_ratio)
    state[zeros] = noise
    return state


def eigenvector_ic(cycle, matrix, which: int, scale: float, log: bool = False) -> np.ndarray:
    """State near the cycle's base fixed point with log coordinates ``scale * v``.

    ``v`` is eigenvector ``which`` of the transition matrix (0 = dominant), scaled
    so its largest entry is +1.  Active nodes and the node displaced on entry to
    the base fixed point sit at ``xhat``.  With ``log=True`` the logarithms are
    returned, which keeps coordinates far below the double-precision range.
    """
    from ..stability import dominant_eigenpair

    if scale >= 0:
        raise DomainError("scale must be negative: log coordinates near the cycle are negative")
    if matrix.coords is None or matrix.base is None:
        raise DomainError("transition matrix carries no coordinate labelling; build it from the cycle")
    vals, vecs = dominant_eigenpair(matrix.entries)
    if not (0 <= which < len(vals)):
        raise DomainError(f"eigenvalue index {which} out of range")
    lam = vals[which]
    if abs(lam.imag) > 1e-9 * max(1.0, abs(lam)):
        raise DomainError(f"eigenvalue {lam} is complex")
    v = np.real(vecs[:, which])
    v = v / v[np.argmax(np.abs(v))]
    if not np.all(v > 1e-9):
        raise DomainError(f"eigenvector {v} has mixed signs or zero entries")
    base = matrix.base
    xhat = active_value(base.r)
    y = np.full(base.n, -np.inf)
    for node in base.active:
        y[node - 1] = math.log(xhat)
    if matrix.incoming is not None:
        y[matrix.incoming - 1] = math.log(xhat)
    for node, vk in zip(matrix.coords, v):
        y[node - 1] = scale * vk
    return y if log else np.exp(y)
