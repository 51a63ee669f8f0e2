"""Least-squares fit of valley logs to a two-eigenvalue decay model.

``X_j = c1 * lam2**j + c2 * |lam1|**j * cos(j * arg(lam1) + c3)``

Expanding the cosine makes the model linear in ``(c1, c2 cos c3, c2 sin c3)``;
the system is solved by orthogonal factorisation (``numpy.linalg.lstsq``).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateFitError, DomainError, InsufficientDataError
from .epochs import EpochSeries

MIN_POINTS = 6


@dataclass(frozen=True)
class FitResult:
    c1: float
    c2: float
    c3: float
    lambda1: complex
    lambda2: float
    rms_residual: float
    n_points: int
    c3_identifiable: bool = True

    def model(self, j) -> np.ndarray:
        j = np.asarray(j, dtype=float)
        rho, phase = abs(self.lambda1), cmath.phase(self.lambda1)
        return self.c1 * self.lambda2 ** j + self.c2 * rho ** j * np.cos(j * phase + self.c3)

    def to_dict(self) -> dict:
        return {
            "c1": self.c1,
            "c2": self.c2,
            "c3": self.c3,
            "lambda1": {"re": self.lambda1.real, "im": self.lambda1.imag},
            "lambda2": self.lambda2,
            "rms_residual": self.rms_residual,
            "n_points": self.n_points,
            "c3_identifiable": self.c3_identifiable,
        }


def _values(data) -> np.ndarray:
    vals = np.asarray(data.valley_logs if isinstance(data, EpochSeries) else data, dtype=float)
    if len(vals) < MIN_POINTS:
        raise InsufficientDataError(f"need at least {MIN_POINTS} valley points, got {len(vals)}")
    if not np.all(np.isfinite(vals)):
        raise DomainError("valley logs must be finite")
    return vals


def fit_decay(data, lambda1: complex, lambda2: float) -> FitResult:
    """Fit ``c1, c2, c3`` to valley logs (an :class:`EpochSeries` or a sequence), indexed from 0."""
    lambda1 = complex(lambda1)
    if abs(lambda1.imag) == 0:
        raise DomainError("lambda1 must be complex")
    if isinstance(lambda2, complex):
        if lambda2.imag != 0:
            raise DomainError("lambda2 must be real")
        lambda2 = lambda2.real
    vals = _values(data)
    j = np.arange(len(vals), dtype=float)
    rho, phase = abs(lambda1), cmath.phase(lambda1)
    design = np.column_stack([lambda2 ** j, rho ** j * np.cos(j * phase), -(rho ** j) * np.sin(j * phase)])
    # scale columns so the rank test is not fooled by growth
    norms = np.linalg.norm(design, axis=0)
    if np.any(norms == 0):
        raise DegenerateFitError("a model column vanishes identically")
    coef, _, rank, sv = np.linalg.lstsq(design / norms, vals, rcond=None)
    if rank < 3:
        raise DegenerateFitError(f"design matrix has rank {rank} < 3")
    c1, a, b = coef / norms
    c2 = math.hypot(a, b)
    c3 = math.atan2(b, a)
    resid = vals - design @ np.array([c1, a, b])
    scale = max(np.abs(vals).max(), 1e-300)
    identifiable = c2 * rho ** j[-1] > 1e-8 * scale
    return FitResult(float(c1), float(c2), float(c3), lambda1, float(lambda2),
                     float(np.sqrt(np.mean(resid ** 2))), len(vals), bool(identifiable))


def fit_single(data, lambda2: float) -> FitResult:
    """Baseline with the real eigenvalue alone: ``X_j = c1 * lam2**j``."""
    vals = _values(data)
    col = float(lambda2) ** np.arange(len(vals), dtype=float)
    c1 = float(col @ vals / (col @ col))
    resid = vals - c1 * col
    return FitResult(c1, 0.0, 0.0, 0j, float(lambda2), float(np.sqrt(np.mean(resid ** 2))), len(vals), False)


def decay_eigenvalues(entries) -> tuple[complex, float]:
    """Leading complex eigenvalue (positive imaginary part) and leading real eigenvalue of a matrix."""
    from ..stability import dominant_eigenpair

    vals, _ = dominant_eigenpair(entries)
    tol = 1e-9
    cplx = [z for z in vals if z.imag > tol * max(1.0, abs(z))]
    real = [z.real for z in vals if abs(z.imag) <= tol * max(1.0, abs(z))]
    if not cplx or not real:
        raise DomainError("matrix needs both a complex and a real eigenvalue for the two-mode model")
    return cplx[0], real[0]
