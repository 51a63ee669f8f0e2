"""Polynomial roots via companion-matrix eigenvalues plus a Newton polish."""
from __future__ import annotations

import cmath

import numpy as np

from .errors import DomainError, NumericError

RESIDUAL_TOL = 1e-10
TIE_TOL = 1e-9


def polyval(coeffs, z):
    """Horner evaluation, highest degree first; returns (P(z), P'(z))."""
    p = 0j
    dp = 0j
    for a in coeffs:
        dp = dp * z + p
        p = p * z + a
    return p, dp


def companion(coeffs) -> np.ndarray:
    """Frobenius companion matrix of a monic polynomial (highest degree first)."""
    c = np.asarray(coeffs, dtype=float)
    deg = len(c) - 1
    mat = np.zeros((deg, deg))
    mat[0, :] = -c[1:]
    if deg > 1:
        mat[1:, :-1] = np.eye(deg - 1)
    return mat


def sort_roots(values, tie_tol: float = TIE_TOL) -> list[complex]:
    """Descending magnitude; magnitudes equal within ``tie_tol`` (relative) ordered by argument."""
    vals = sorted((complex(v) for v in values), key=lambda z: -abs(z))
    out: list[complex] = []
    i = 0
    while i < len(vals):
        ref = abs(vals[i])
        k = i + 1
        while k < len(vals) and ref - abs(vals[k]) <= tie_tol * max(ref, 1.0):
            k += 1
        out.extend(sorted(vals[i:k], key=lambda z: cmath.phase(z if z.imag != 0 else complex(z.real, 0.0))))
        i = k
    return out


def residual_ok(coeffs, z, tol: float = RESIDUAL_TOL) -> bool:
    q = len(coeffs) - 1
    return abs(polyval(coeffs, z)[0]) < tol * max(1.0, abs(z) ** q)


def roots(coeffs, polish_steps: int = 1, tol: float = RESIDUAL_TOL) -> list[complex]:
    """All roots of a monic real polynomial, sorted by :func:`sort_roots`.

    Raises :class:`NumericError` (carrying the best roots) when a residual
    ``|P(z)| < tol * max(1, |z|**q)`` cannot be met.
    """
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or len(c) < 2:
        raise DomainError("need a polynomial of degree >= 1")
    if c[0] != 1.0:
        raise DomainError(f"polynomial must be monic, leading coefficient is {c[0]}")
    raw = np.linalg.eigvals(companion(c))
    polished = []
    for z in raw:
        z = complex(z)
        if abs(z.imag) <= 1e-14 * max(1.0, abs(z)):
            z = complex(z.real, 0.0)
        for _ in range(polish_steps):
            p, dp = polyval(c, z)
            if dp == 0:
                break
            cand = z - p / dp
            if abs(polyval(c, cand)[0]) <= abs(p):
                z = cand
        polished.append(z)
    polished = sort_roots(polished)
    bad = [z for z in polished if not residual_ok(c, z, tol)]
    if bad:
        raise NumericError(f"root residual above tolerance at {bad}", best=polished)
    return polished
