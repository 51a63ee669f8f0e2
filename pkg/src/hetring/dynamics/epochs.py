"""Epoch segmentation of trajectories that wander along a heteroclinic network.

An epoch is the stretch spent near one fixed point.  It ends when a component
that was below the threshold ``theta`` crosses it upward.  For each epoch we keep

* its duration ``T_k`` (iterations between successive crossings),
* its valley ``X_k``: the log-minimum, over the epoch, of the component that
  crosses at the end,
* the settled set: components above ``theta`` for more than half of the epoch's
  iterations, snapped to a fixed point when independent and non-empty, otherwise
  marked off-network.

A majority vote is used rather than a snapshot: right after a crossing the
displaced node is still above threshold, and with strong coupling the active
node can drop below it just before the next crossing.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, InsufficientDataError, SimulationError, ValidationError
from ..graph import ActiveSet, CouplingGraph, is_independent
from ..network import CycleDescriptor, active_value
from . import backend
from .simulate import SimParams, Trajectory

MASK_LIMIT = 62


@dataclass
class EpochSeries:
    """``boundaries`` has one more entry than the per-epoch arrays."""

    boundaries: np.ndarray
    valley_logs: np.ndarray
    crossers: np.ndarray
    active_sequence: list[ActiveSet | None]
    theta: float
    final_state: np.ndarray | None = None
    steps_run: int | None = None
    underflow_at: int | None = None

    def __post_init__(self):
        b = np.asarray(self.boundaries)
        if len(b) and np.any(np.diff(b) <= 0):
            raise ValidationError("epoch boundaries must be strictly increasing")
        if len(self.valley_logs) != max(len(b) - 1, 0):
            raise ValidationError("need one valley per epoch")

    def __len__(self):
        return len(self.valley_logs)

    @property
    def durations(self) -> np.ndarray:
        return np.diff(self.boundaries)

    @property
    def off_network(self) -> list[int]:
        return [k for k, z in enumerate(self.active_sequence) if z is None]

    def labels(self) -> list[str]:
        return ["off-network" if z is None else f"xi_{{{z.label}}}" for z in self.active_sequence]

    def tail(self, start: int) -> "EpochSeries":
        """Epochs from index ``start`` on."""
        return EpochSeries(self.boundaries[start:], self.valley_logs[start:], self.crossers[start:],
                           self.active_sequence[start:], self.theta, self.final_state, self.steps_run,
                           self.underflow_at)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "boundary_i", "T_k", "X_k", "shadowed_fixed_point", "crosser"])
            for k, label in enumerate(self.labels()):
                w.writerow([k, int(self.boundaries[k]), int(self.durations[k]), repr(float(self.valley_logs[k])),
                            label, int(self.crossers[k])])

    @classmethod
    def from_csv(cls, path) -> "EpochSeries":
        bounds, valleys, seq, crossers = [], [], [], []
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        for row in rows:
            bounds.append(int(row["boundary_i"]))
            valleys.append(float(row["X_k"]))
            crossers.append(int(row.get("crosser") or 0))
            label = row["shadowed_fixed_point"]
            if label == "off-network":
                seq.append(None)
            else:
                inner = label[label.index("{") + 1:label.rindex("}")]
                seq.append(ActiveSet(tuple(int(v) for v in inner.split(",") if v)))
        if rows:
            bounds.append(bounds[-1] + int(rows[-1]["T_k"]))
        return cls(np.asarray(bounds, dtype=np.int64), np.asarray(valleys, dtype=float),
                   np.asarray(crossers, dtype=np.int64), seq, float("nan"))


def _snap(g: CouplingGraph, nodes) -> ActiveSet | None:
    nodes = tuple(int(k) + 1 for k in nodes)
    if not nodes or not is_independent(g, nodes):
        return None
    return ActiveSet(nodes)


def _check_theta(theta: float | None, r: float) -> float:
    xhat = active_value(r)
    if theta is None:
        return xhat / 2
    if not (0.0 < theta < xhat):
        raise DomainError(f"theta must lie in (0, xhat) = (0, {xhat}), got {theta}")
    return float(theta)


def extract_epochs(traj: Trajectory, theta: float | None = None) -> EpochSeries:
    """Segment a recorded trajectory.  Times are recorded iteration indices."""
    params = traj.params
    theta = _check_theta(theta, params.r)
    logs = traj.log_states()
    above = logs > math.log(theta)
    rising = ~above[:-1] & above[1:]
    rows = np.flatnonzero(rising.any(axis=1)) + 1
    if len(rows) < 2:
        raise InsufficientDataError(f"found {len(rows)} epoch boundaries, need at least 2")
    valleys, crossers, seq = [], [], []
    for a, b in zip(rows[:-1], rows[1:]):
        k = int(np.flatnonzero(rising[b - 1])[0])
        crossers.append(k + 1)
        valleys.append(float(logs[a:b, k].min()))
        seq.append(_snap(params.graph, np.flatnonzero(2 * above[a:b].sum(axis=0) > b - a)))
    return EpochSeries(traj.times[rows].astype(np.int64), np.asarray(valleys), np.asarray(crossers, dtype=np.int64),
                       seq, theta, traj.states[-1].copy(), int(traj.times[-1]), traj.underflow_at)


def run_epochs(params: SimParams, theta: float | None = None, max_epochs: int = 64, kernels=None) -> EpochSeries:
    """Iterate in log coordinates with epoch detection on the fly, nothing else stored.

    Stops after ``max_epochs`` complete epochs or ``params.steps`` iterations.  This
    is the way to follow a stable cycle for many epochs: durations grow
    geometrically, so a 20-epoch run easily needs 1e7 iterations.
    """
    g = params.graph
    if g.n > MASK_LIMIT:
        raise DomainError(f"on-the-fly epoch detection supports n <= {MASK_LIMIT}")
    theta = _check_theta(theta, params.r)
    k = kernels or backend.get()
    ptr, idx = g.inhibitor_csr()
    floor = math.log(params.floor) if params.floor is not None else float("nan")
    bounds, cross, valley, masks, final, steps_run, underflow, bad = k.run_epochs(
        np.ascontiguousarray(params.log_initial()), int(params.steps), math.log(params.r), float(params.gamma),
        ptr, idx, math.log(theta), int(max_epochs) + 1, floor,
    )
    if bad >= 0:
        raise SimulationError(f"non-finite state at iteration {bad}", iteration=int(bad))
    if len(bounds) < 2:
        raise InsufficientDataError(f"found {len(bounds)} epoch boundaries in {steps_run} iterations, need 2")
    seq = [_snap(g, [i for i in range(g.n) if (int(m) >> i) & 1]) for m in masks[1:]]
    return EpochSeries(np.asarray(bounds), np.asarray(valley[1:]), np.asarray(cross[1:]) + 1, seq, theta,
                       np.exp(final), int(steps_run), int(underflow) if underflow >= 0 else None)


@dataclass(frozen=True)
class ShadowRun:
    start: int
    length: int


def shadow_run(epochs: EpochSeries, cycle: CycleDescriptor, require_decay: bool = True) -> ShadowRun:
    """Longest stretch of consecutive epochs following ``cycle``'s connections.

    Successive epochs must sit at successive fixed points of the cycle; with
    ``require_decay`` each valley must also lie strictly below the previous one,
    which is what approaching the cycle looks like.
    """
    order = [c.source.active for c in cycle.path]
    succ = {order[i]: order[(i + 1) % len(order)] for i in range(len(order))}
    best = ShadowRun(0, 0)
    start = None
    seq = epochs.active_sequence
    for k, z in enumerate(seq):
        if z not in succ:
            start = None
            continue
        if start is None:
            start = k
        elif succ[seq[k - 1]] != z or (require_decay and epochs.valley_logs[k] >= epochs.valley_logs[k - 1]):
            start = k
        if k - start + 1 > best.length:
            best = ShadowRun(start, k - start + 1)
    return best


def cycle_valleys(epochs: EpochSeries, cycle: CycleDescriptor, run: ShadowRun | None = None,
                  require_decay: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Indices and valleys of the shadowing epochs that exit along the cycle.

    A valley is the log of the component that crosses at the epoch's end, so it
    is a cycle coordinate only when that component is the cycle's entering node.
    The last epoch before a trajectory leaves the cycle fails this test and is
    dropped.
    """
    run = run or shadow_run(epochs, cycle, require_decay)
    entering = {c.source.active: c.entering for c in cycle.path}
    keep = [k for k in range(run.start, run.start + run.length)
            if entering.get(epochs.active_sequence[k]) == int(epochs.crossers[k])]
    return np.asarray(keep, dtype=np.int64), np.asarray(epochs.valley_logs[keep], dtype=float)


def shadow_length(epochs: EpochSeries, cycle: CycleDescriptor, require_decay: bool = True) -> int:
    return shadow_run(epochs, cycle, require_decay).length


@dataclass(frozen=True)
class GrowthRate:
    """Geometric-mean ratio of successive epoch durations over the last half of a series."""

    rate: float
    log_spread: float
    settled: bool
    ratios: tuple[float, ...]

    def __float__(self):
        return self.rate


def epoch_growth_rate(epochs: EpochSeries, min_epochs: int = 4, spread_tol: float = 0.05) -> GrowthRate:
    """``settled`` is False when the log-ratios scatter by more than ``spread_tol``."""
    durations = epochs.durations.astype(float)
    if len(durations) < min_epochs:
        raise InsufficientDataError(f"need at least {min_epochs} epochs, got {len(durations)}")
    ratios = durations[1:] / durations[:-1]
    tail = np.log(ratios[len(ratios) // 2:])
    spread = float(tail.std()) if len(tail) > 1 else 0.0
    return GrowthRate(float(np.exp(tail.mean())), spread, spread <= spread_tol, tuple(float(v) for v in ratios))
