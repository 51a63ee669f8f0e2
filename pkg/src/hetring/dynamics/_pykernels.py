"""Pure-Python twin of the compiled kernels; same loop order, same libm calls."""
from __future__ import annotations

import math

import numpy as np


def _lists(ptr, idx):
    ptr = [int(p) for p in ptr]
    idx = [int(i) for i in idx]
    return [idx[ptr[k]:ptr[k + 1]] for k in range(len(ptr) - 1)]


def _lin(x, r, gamma, srcs):
    out = []
    for k, xk in enumerate(x):
        s = 0.0
        for a in srcs[k]:
            s = s + x[a]
        out.append(r * xk * (1.0 - xk) * math.exp(-gamma * s))
    return out


def _log1m(e):
    # libm's log1p(-1) is -inf; Python's raises instead
    return -math.inf if e == 1.0 else math.log1p(-e)


def _log(y, logr, gamma, srcs):
    ex = [math.exp(v) for v in y]
    out = []
    for k, yk in enumerate(y):
        s = 0.0
        for a in srcs[k]:
            s = s + ex[a]
        out.append(yk + logr + _log1m(ex[k]) - gamma * s)
    return out


def step_linear(x, out, r, gamma, ptr, idx):
    out[:] = _lin([float(v) for v in x], r, gamma, _lists(ptr, idx))


def step_log(y, out, logr, gamma, ptr, idx):
    out[:] = _log([float(v) for v in y], logr, gamma, _lists(ptr, idx))


def run(x0, steps, r, logr, gamma, ptr, idx, log_space, floor, record_every):
    srcs = _lists(ptr, idx)
    n = len(x0)
    use_floor = floor == floor
    lost = -math.inf if log_space else 0.0
    a = [float(v) for v in x0]
    times = [0]
    states = [list(a)]
    underflow = bad = -1
    i = 0
    for i in range(1, steps + 1):
        b = _log(a, logr, gamma, srcs) if log_space else _lin(a, r, gamma, srcs)
        for k in range(n):
            if b[k] != b[k]:
                bad = i
            if use_floor and b[k] < floor:
                b[k] = floor
            if underflow < 0 and b[k] == lost and a[k] != lost:
                underflow = i
        a = b
        if bad >= 0:
            break
        if i % record_every == 0 or i == steps:
            times.append(i)
            states.append(list(a))
    if bad >= 0:
        times.append(bad)
        states.append(list(a))
    return (np.asarray(times, dtype=np.int64), np.asarray(states, dtype=np.float64).reshape(len(times), n),
            underflow, bad)


def run_epochs(y0, steps, logr, gamma, ptr, idx, log_theta, max_boundaries, floor):
    srcs = _lists(ptr, idx)
    n = len(y0)
    use_floor = floor == floor
    a = [float(v) for v in y0]
    lo = list(a)
    bounds, cross, valley, masks = [], [], [], []
    prev_mask = sum(1 << k for k in range(n) if a[k] > log_theta)
    up = [(prev_mask >> k) & 1 for k in range(n)]
    underflow = bad = -1
    i = last = 0
    while i < steps and len(bounds) < max_boundaries:
        i += 1
        b = _log(a, logr, gamma, srcs)
        mask = 0
        hit = -1
        for k in range(n):
            if b[k] != b[k]:
                bad = i
            if use_floor and b[k] < floor:
                b[k] = floor
            if underflow < 0 and b[k] == -math.inf and a[k] != -math.inf:
                underflow = i
            if b[k] > log_theta:
                mask |= 1 << k
                if hit < 0 and not (prev_mask >> k) & 1:
                    hit = k
        a = b
        if bad >= 0:
            break
        if hit >= 0:
            bounds.append(i)
            cross.append(hit)
            valley.append(lo[hit])
            masks.append(sum(1 << k for k in range(n) if 2 * up[k] > i - last))
            lo = list(a)
            up = [(mask >> k) & 1 for k in range(n)]
            last = i
        else:
            lo = [min(u, v) for u, v in zip(lo, a)]
            up = [u + ((mask >> k) & 1) for k, u in enumerate(up)]
        prev_mask = mask
    return (np.asarray(bounds, dtype=np.int64), np.asarray(cross, dtype=np.int64),
            np.asarray(valley, dtype=np.float64), np.asarray(masks, dtype=np.int64),
            np.asarray(a, dtype=np.float64), i, underflow, bad)
