# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for the coupled logistic map.

Inhibitor sums are accumulated in CSR order (``ptr``/``idx``) so that the pure
Python twin in ``_pykernels`` reproduces these results bit for bit.
"""
import numpy as np

from libc.math cimport exp, log1p, isnan, INFINITY

cdef double UNDERFLOW_LOG = -746.0


cdef inline void _lin(const double* x, double* out, double r, double gamma,
                      const Py_ssize_t* ptr, const Py_ssize_t* idx,
                      Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t k, p
    cdef double s, xk
    for k in range(n):
        s = 0.0
        for p in range(ptr[k], ptr[k + 1]):
            s = s + x[idx[p]]
        xk = x[k]
        out[k] = r * xk * (1.0 - xk) * exp(-gamma * s)


cdef inline void _log(const double* y, double* out, double* ex, double logr, double gamma,
                      const Py_ssize_t* ptr, const Py_ssize_t* idx,
                      Py_ssize_t n) noexcept nogil:
    # ex holds exp(y) so each exponential is taken once per step.  Below
    # UNDERFLOW_LOG, exp and log1p(-exp) are exactly 0.0 and -0.0 anyway.
    cdef Py_ssize_t k, p
    cdef double s
    for k in range(n):
        ex[k] = exp(y[k]) if y[k] > UNDERFLOW_LOG else 0.0
    for k in range(n):
        s = 0.0
        for p in range(ptr[k], ptr[k + 1]):
            s = s + ex[idx[p]]
        if ex[k] != 0.0:
            out[k] = y[k] + logr + log1p(-ex[k]) - gamma * s
        else:
            out[k] = y[k] + logr + -0.0 - gamma * s


def step_linear(const double[::1] x, double[::1] out, double r, double gamma,
                const Py_ssize_t[::1] ptr, const Py_ssize_t[::1] idx):
    _lin(&x[0], &out[0], r, gamma, &ptr[0], &idx[0] if idx.shape[0] else NULL, x.shape[0])


def step_log(const double[::1] y, double[::1] out, double logr, double gamma,
             const Py_ssize_t[::1] ptr, const Py_ssize_t[::1] idx):
    cdef double[::1] ex = np.empty(y.shape[0])
    _log(&y[0], &out[0], &ex[0], logr, gamma, &ptr[0], &idx[0] if idx.shape[0] else NULL, y.shape[0])


def run(double[::1] x0, Py_ssize_t steps, double r, double logr, double gamma,
        const Py_ssize_t[::1] ptr, const Py_ssize_t[::1] idx,
        bint log_space, double floor, Py_ssize_t record_every):
    """Iterate and record every ``record_every`` steps (plus the last one).

    Returns ``(times, states, first_underflow, bad_iter)``; ``bad_iter`` is the
    iteration producing a NaN (or -1), at which point the run stops.
    """
    cdef Py_ssize_t n = x0.shape[0]
    cdef Py_ssize_t nrec = steps // record_every + 1
    if steps % record_every:
        nrec += 1
    times_np = np.empty(nrec, dtype=np.int64)
    states_np = np.empty((nrec, n), dtype=np.float64)
    cdef long long[::1] times = times_np
    cdef double[:, ::1] states = states_np
    cdef double[::1] a = np.array(x0, dtype=np.float64)
    cdef double[::1] b = np.empty(n, dtype=np.float64)
    cdef double[::1] ex = np.empty(n, dtype=np.float64)
    cdef double* pa = &a[0]
    cdef double* pb = &b[0]
    cdef double* tmp
    cdef const Py_ssize_t* pp = &ptr[0]
    cdef const Py_ssize_t* pi = &idx[0] if idx.shape[0] else NULL
    cdef Py_ssize_t i, k, rec = 0
    cdef Py_ssize_t underflow = -1, bad = -1
    cdef bint use_floor = floor == floor  # NaN means no floor
    cdef double lost = -INFINITY if log_space else 0.0

    times[0] = 0
    states[0, :] = a
    rec = 1
    with nogil:
        for i in range(1, steps + 1):
            if log_space:
                _log(pa, pb, &ex[0], logr, gamma, pp, pi, n)
            else:
                _lin(pa, pb, r, gamma, pp, pi, n)
            for k in range(n):
                if isnan(pb[k]):
                    bad = i
                if use_floor and pb[k] < floor:
                    pb[k] = floor
                if underflow < 0 and pb[k] == lost and pa[k] != lost:
                    underflow = i
            tmp = pa
            pa = pb
            pb = tmp
            if bad >= 0:
                break
            if i % record_every == 0 or i == steps:
                times[rec] = i
                for k in range(n):
                    states[rec, k] = pa[k]
                rec += 1
    if bad >= 0:
        times[rec] = bad
        for k in range(n):
            states[rec, k] = pa[k]
        rec += 1
    return times_np[:rec], states_np[:rec], underflow, bad


def run_epochs(double[::1] y0, Py_ssize_t steps, double logr, double gamma,
               const Py_ssize_t[::1] ptr, const Py_ssize_t[::1] idx,
               double log_theta, Py_ssize_t max_boundaries, double floor):
    """Log-space iteration with on-the-fly epoch detection.

    A boundary is an upward crossing of ``log_theta``.  For each boundary we keep
    the crossing component, its minimum since the previous boundary, and the
    bitmask of components above threshold for more than half of the iterations
    since the previous boundary.
    """
    cdef Py_ssize_t n = y0.shape[0]
    bounds_np = np.empty(max_boundaries, dtype=np.int64)
    cross_np = np.empty(max_boundaries, dtype=np.int64)
    valley_np = np.empty(max_boundaries, dtype=np.float64)
    mask_np = np.empty(max_boundaries, dtype=np.int64)
    cdef long long[::1] bounds = bounds_np
    cdef long long[::1] cross = cross_np
    cdef double[::1] valley = valley_np
    cdef long long[::1] masks = mask_np
    cdef double[::1] a = np.array(y0, dtype=np.float64)
    cdef double[::1] b = np.empty(n, dtype=np.float64)
    cdef double[::1] lo = np.array(y0, dtype=np.float64)
    cdef double[::1] ex = np.empty(n, dtype=np.float64)
    cdef long long[::1] up = np.zeros(n, dtype=np.int64)
    cdef double* pa = &a[0]
    cdef double* pb = &b[0]
    cdef double* tmp
    cdef const Py_ssize_t* pp = &ptr[0]
    cdef const Py_ssize_t* pi = &idx[0] if idx.shape[0] else NULL
    cdef Py_ssize_t i, k, nb = 0, hit, last = 0
    cdef Py_ssize_t underflow = -1, bad = -1
    cdef long long prev_mask = 0, mask
    cdef bint use_floor = floor == floor

    for k in range(n):
        if a[k] > log_theta:
            prev_mask |= (<long long>1) << k
            up[k] = 1
    with nogil:
        i = 0
        while i < steps and nb < max_boundaries:
            i += 1
            _log(pa, pb, &ex[0], logr, gamma, pp, pi, n)
            mask = 0
            hit = -1
            for k in range(n):
                if isnan(pb[k]):
                    bad = i
                if use_floor and pb[k] < floor:
                    pb[k] = floor
                if underflow < 0 and pb[k] == -INFINITY and pa[k] != -INFINITY:
                    underflow = i
                if pb[k] > log_theta:
                    mask |= (<long long>1) << k
                    if hit < 0 and not (prev_mask >> k) & 1:
                        hit = k
            tmp = pa
            pa = pb
            pb = tmp
            if bad >= 0:
                break
            if hit >= 0:
                bounds[nb] = i
                cross[nb] = hit
                valley[nb] = lo[hit]
                masks[nb] = 0
                for k in range(n):
                    if 2 * up[k] > i - last:
                        masks[nb] |= (<long long>1) << k
                    lo[k] = pa[k]
                    up[k] = (mask >> k) & 1
                nb += 1
                last = i
            else:
                for k in range(n):
                    if pa[k] < lo[k]:
                        lo[k] = pa[k]
                    up[k] += (mask >> k) & 1
            prev_mask = mask
    final = np.array([pa[k] for k in range(n)], dtype=np.float64)
    return bounds_np[:nb], cross_np[:nb], valley_np[:nb], mask_np[:nb], final, i, underflow, bad
