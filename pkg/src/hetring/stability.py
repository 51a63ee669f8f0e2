"""Transition matrices of heteroclinic cycles and their stability verdicts.

Two independent routes decide stability of a cycle:

* numerically, from the dominant eigenpair of the transition matrix
  (:func:`eigenpair_check`: dominant eigenvalue real, greater than one, with a
  same-sign eigenvector);
* in closed form for matrices of the symmetric shape (:func:`theorem_verdict`:
  stable iff ``q == j`` and ``delta > (q + 1 - j) / j``).

Logarithmic coordinates throughout: ``X = log x``, so ``X -> -inf`` means the
trajectory approaches the cycle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, UnsupportedCycleError, UnsupportedError
from .graph import suppression_profile
from .network import CycleDescriptor, HetNetwork, active_value
from .polyroots import TIE_TOL, residual_ok, roots, sort_roots

RESONANCE_TOL = 1e-9
SIGN_TOL = 1e-9


@dataclass(frozen=True)
class Delta:
    """``delta = gamma * xhat / log r - 1``: net contraction over expansion per epoch."""

    value: float
    r: float
    gamma: float

    @property
    def saddle(self) -> bool:
        return self.value > 0

    def __float__(self):
        return self.value


def delta(r: float, gamma: float, analytic: bool = True) -> Delta:
    if analytic and not (1.0 < r <= 3.0):
        raise DomainError(f"analytic mode needs 1 < r <= 3, got r={r}")
    if r <= 1.0:
        raise DomainError(f"delta needs r > 1, got r={r}")
    if gamma < 0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    return Delta(gamma * active_value(r) / math.log(r) - 1.0, float(r), float(gamma))


def _delta_value(d) -> float:
    if isinstance(d, Delta):
        return d.value
    if isinstance(d, tuple):
        return delta(*d).value
    return float(d)


@dataclass(frozen=True)
class TransitionMatrix:
    """q x q map of logarithmic coordinates from one epoch to the next.

    ``coords`` lists the node behind each coordinate at ``base`` (cycle-derived
    matrices only).  ``epochs`` is how many epochs one application covers; for a
    symmetric cycle that is a single epoch and :meth:`full_cycle` raises it to the
    cycle length.
    """

    entries: np.ndarray
    j: int
    row_roles: tuple[str, ...] | None = None
    delta: float | None = None
    coords: tuple[int, ...] | None = None
    base: object = None
    incoming: int | None = None
    epochs: int = 1
    cycle_length: int = 1

    @property
    def q(self) -> int:
        return self.entries.shape[0]

    def full_cycle(self) -> np.ndarray:
        if self.epochs == self.cycle_length:
            return self.entries
        return np.linalg.matrix_power(self.entries, self.cycle_length // self.epochs)


def transition_matrix_symmetric(j: int, q: int, delta: float) -> TransitionMatrix:
    """``q - j`` rows led by -1, then ``j`` rows led by delta, ones on the superdiagonal."""
    if j < 1 or q < j:
        raise DomainError(f"need q >= j >= 1, got j={j}, q={q}")
    d = _delta_value(delta)
    m = np.zeros((q, q))
    n_grow = q - j
    m[:n_grow, 0] = -1.0
    m[n_grow:, 0] = d
    m[np.arange(q - 1), np.arange(1, q)] = 1.0
    roles = ("growing",) * n_grow + ("decaying",) * j
    return TransitionMatrix(m, j, roles, d)


def symmetric_shape(entries: np.ndarray, tol: float = 1e-12) -> tuple[int, float] | None:
    """``(j, delta)`` if ``entries`` has the symmetric transition-matrix shape, else None."""
    m = np.asarray(entries, dtype=float)
    q = m.shape[0]
    rest = m.copy()
    rest[:, 0] = 0.0
    sup = np.zeros_like(m)
    sup[np.arange(q - 1), np.arange(1, q)] = 1.0
    if not np.allclose(rest, sup, atol=tol, rtol=0):
        return None
    col = m[:, 0]
    n_grow = 0
    while n_grow < q and abs(col[n_grow] + 1.0) <= tol:
        n_grow += 1
    leads = col[n_grow:]
    if len(leads) == 0 or np.ptp(leads) > tol:
        return None
    return q - n_grow, float(leads[0])


def _single_displaced(cycle: CycleDescriptor) -> list[int]:
    if cycle.j is None:
        raise UnsupportedCycleError(f"active count varies along {cycle.label}")
    out = []
    for c in cycle.path:
        if len(c.displaced) != 1:
            raise UnsupportedCycleError(
                f"connection {c.source.label} -> {c.target.label} displaces {len(c.displaced)} nodes"
            )
        out.append(c.displaced.members[0])
    return out


def _coordinate_order(cycle: CycleDescriptor, k: int, incoming: int) -> list[int]:
    """Non-active nodes at fixed point k except the one just displaced, by epochs until they enter."""
    K = len(cycle.path)
    fp = cycle.path[k].source
    entering = [c.entering for c in cycle.path]

    def wait(v):
        for t in range(K):
            if entering[(k + t) % K] == v:
                return t
        return K

    nodes = [v for v in range(1, fp.n + 1) if v not in fp.active and v != incoming]
    return sorted(nodes, key=lambda v: (wait(v), v))


def _epoch_map(net: HetNetwork, cycle: CycleDescriptor, k: int, displaced: list[int], d: float):
    K = len(cycle.path)
    conn = cycle.path[k]
    incoming = displaced[(k - 1) % K]
    cols = _coordinate_order(cycle, k, incoming)
    rows = _coordinate_order(cycle, (k + 1) % K, displaced[k])
    assert cols[0] == conn.entering
    prof = suppression_profile(net.graph, conn.source.active)
    col_pos = {v: i for i, v in enumerate(cols)}
    q = len(cols)
    m = np.zeros((q, q))
    roles = []
    for i, v in enumerate(rows):
        ns = prof.suppression_number(v)
        if ns == 0:
            lead, role = -1.0, "growing"
        else:
            lead, role = ns * (1.0 + d) - 1.0, "decaying"
        m[i, 0] = lead
        if v != incoming:
            m[i, col_pos[v]] += 1.0
        roles.append(role)
    return m, cols, rows, tuple(roles)


def transition_matrix_for_cycle(net: HetNetwork, cycle: CycleDescriptor, delta_params=None) -> TransitionMatrix:
    """Compose per-epoch logarithmic maps around ``cycle``.

    During an epoch of length ``T = -X_e / log r`` each growing coordinate gains
    ``-X_e``, a coordinate with suppression number ``n_s`` gains
    ``(n_s * gamma * xhat / log r - 1) * X_e``, and the node displaced on entry starts
    at ``log x = 0``.  Coordinates are ordered by how many epochs remain before the
    node becomes the entering node.

    ``delta_params`` is a float delta, a :class:`Delta`, an ``(r, gamma)`` tuple, or
    None to take ``(net.r, net.gamma)``.
    """
    displaced = _single_displaced(cycle)
    d = _delta_value(delta_params if delta_params is not None else (net.r, net.gamma))
    K = len(cycle.path)
    m0, cols0, rows0, roles0 = _epoch_map(net, cycle, 0, displaced, d)
    base = cycle.path[0].source
    if cycle.symmetric and cycle.rotation is not None:
        rotated = [((v - 1 + cycle.rotation) % base.n) + 1 for v in cols0]
        if rotated == rows0:
            return TransitionMatrix(m0, cycle.j, roles0, d, tuple(cols0), base, displaced[-1], 1, K)
    total = np.eye(len(cols0))
    for k in range(K):
        mk, *_ = _epoch_map(net, cycle, k, displaced, d)
        total = mk @ total
    return TransitionMatrix(total, cycle.j, None, d, tuple(cols0), base, displaced[-1], K, K)


def char_poly(j: int, q: int, delta: float) -> np.ndarray:
    """Coefficients (highest degree first) of ``l^q + ... + l^j - delta (l^(j-1) + ... + 1)``."""
    if j < 1 or q < j:
        raise DomainError(f"need q >= j >= 1, got j={j}, q={q}")
    d = _delta_value(delta)
    return np.array([1.0] * (q - j + 1) + [-d] * j)


@dataclass(frozen=True)
class TheoremVerdict:
    j: int
    q: int
    delta: float
    delta_star: float
    stable: bool
    resonant: bool
    gamma_star: float | None = None


def theorem_verdict(j: int, q: int, delta: float, r: float | None = None, n: int | None = None,
                    tol: float = RESONANCE_TOL) -> TheoremVerdict:
    """Closed-form verdict: stable iff ``q == j`` and ``delta > delta* = (q + 1 - j) / j``.

    With ``r`` given, ``gamma_star`` is the coupling threshold equivalent to
    ``delta*``; with ``n`` also given it is cross-checked against
    ``(log r / xhat) (n - j) / j``.
    """
    if j < 1 or q < j:
        raise DomainError(f"need q >= j >= 1, got j={j}, q={q}")
    d = _delta_value(delta)
    dstar = (q + 1 - j) / j
    resonant = abs(d - dstar) <= tol * max(1.0, dstar)
    stable = q == j and d > dstar and not resonant
    gstar = None
    if r is not None:
        gstar = (1.0 + dstar) * math.log(r) / active_value(r)
        if n is not None and q == n - j - 1:
            alt = math.log(r) / active_value(r) * (n - j) / j
            assert math.isclose(gstar, alt, rel_tol=1e-12)
    return TheoremVerdict(j, q, d, dstar, stable, resonant, gstar)


def vmax_closed_form(j: int, delta: float, r_plus: float, q: int | None = None) -> np.ndarray:
    """Dominant eigenvector for ``q == j``: ``(1, (d/rho) sum_{k<j-1} rho^-k, ..., d/rho)``."""
    if q is not None and q != j:
        raise UnsupportedError("closed-form eigenvector only exists for q == j")
    d = _delta_value(delta)
    rho = float(r_plus)
    v = np.empty(j)
    v[0] = 1.0
    for i in range(1, j):
        v[i] = d / rho * sum(rho ** -k for k in range(j - i))
    return v


@dataclass
class StabilityReport:
    j: int | None
    q: int
    delta: float | None
    delta_star: float | None
    lambda_max: complex
    v_max: np.ndarray | None
    fas: bool | None
    status: str  # fas, not_fas, resonant
    conditions: dict[str, bool]
    roots: list[complex]
    theorem_verdict: bool | None = None
    agreement: bool | None = None
    gamma_star: float | None = None
    label: str | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "j": self.j,
            "q": self.q,
            "delta": self.delta,
            "delta_star": self.delta_star,
            "lambda_max": {"re": self.lambda_max.real, "im": self.lambda_max.imag},
            "v_max": None if self.v_max is None else [float(v) for v in self.v_max],
            "fas": self.fas,
            "status": self.status,
            "conditions": self.conditions,
            "theorem_verdict": self.theorem_verdict,
            "agreement": self.agreement,
            "gamma_star": self.gamma_star,
            "roots": [{"re": z.real, "im": z.imag} for z in self.roots],
        }
        if self.label is not None:
            out["cycle"] = self.label
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def dominant_eigenpair(entries: np.ndarray):
    """Eigenvalues sorted by descending magnitude (ties by argument) and the matching eigenvectors."""
    w, vecs = np.linalg.eig(np.asarray(entries, dtype=float))
    order = sorted(range(len(w)), key=lambda i: -abs(w[i]))
    ordered = sort_roots(w[order])
    # map sorted values back to eigenvector columns
    cols = []
    used = set()
    for z in ordered:
        best = min((i for i in range(len(w)) if i not in used), key=lambda i: abs(w[i] - z))
        used.add(best)
        cols.append(best)
    return [complex(w[i]) for i in cols], vecs[:, cols]


def normalized_real(v: np.ndarray) -> np.ndarray:
    """Real eigenvector scaled so its largest-magnitude entry is +1."""
    v = np.real_if_close(np.asarray(v), tol=1e6).real.astype(float)
    big = v[np.argmax(np.abs(v))]
    return v / big


def eigenpair_check(matrix, tie_tol: float = TIE_TOL, sign_tol: float = SIGN_TOL,
                    resonance_tol: float = RESONANCE_TOL, r: float | None = None) -> StabilityReport:
    """Fragmentary asymptotic stability from the dominant eigenpair of a transition matrix.

    Conditions: the dominant eigenvalue is real and unique in magnitude, it exceeds
    one, and its eigenvector has non-zero entries of one sign.  A dominant eigenvalue
    within ``resonance_tol`` of 1 is outside the eigenpair test's hypothesis and is reported as
    ``resonant`` with ``fas=None``.
    """
    tm = matrix if isinstance(matrix, TransitionMatrix) else None
    entries = tm.entries if tm is not None else np.asarray(matrix, dtype=float)
    q = entries.shape[0]
    vals, vecs = dominant_eigenpair(entries)
    lam = vals[0]
    mag = abs(lam)
    notes = []
    tied = [z for z in vals[1:] if mag - abs(z) <= tie_tol * max(mag, 1.0) and abs(z - lam) > tie_tol * max(mag, 1.0)]
    is_real = abs(lam.imag) < tie_tol * max(mag, 1e-300)
    cond_real = is_real and not tied
    if tied:
        notes.append(f"dominant magnitude shared by {len(tied) + 1} distinct eigenvalues")
    cond_gt1 = is_real and lam.real > 1.0
    v_max = None
    cond_sign = False
    if is_real:
        v_max = normalized_real(vecs[:, 0])
        cond_sign = bool(np.all(v_max > sign_tol))
    conditions = {"real": bool(cond_real), "greater_than_one": bool(cond_gt1), "same_sign": cond_sign}
    if abs(lam - 1.0) <= resonance_tol * max(1.0, mag):
        fas, status = None, "resonant"
        notes.append("dominant eigenvalue equals 1: outside the eigenpair test's hypothesis")
    else:
        fas = all(conditions.values())
        status = "fas" if fas else "not_fas"

    j = tm.j if tm is not None else None
    d = tm.delta if tm is not None else None
    shape = symmetric_shape(entries)
    tv = agreement = dstar = gstar = None
    if shape is not None:
        j_eff, d_eff = shape
        verdict = theorem_verdict(j_eff, q, d_eff, r=r)
        dstar, gstar = verdict.delta_star, verdict.gamma_star
        if d is None:
            d = d_eff
        if j is None:
            j = j_eff
        if j_eff != j:
            notes.append(f"matrix has the symmetric shape with {j_eff} delta rows")
        tv = verdict.stable
        if fas is not None and not verdict.resonant:
            agreement = fas == tv
    return StabilityReport(j, q, d, dstar, lam, v_max, fas, status, conditions, vals, tv, agreement, gstar,
                           notes=notes)


# name used by external callers of the original interface
podvigina_check = eigenpair_check


def analyze_cycle(net: HetNetwork, cycle: CycleDescriptor) -> StabilityReport:
    tm = transition_matrix_for_cycle(net, cycle)
    rep = eigenpair_check(tm, r=net.r)
    rep.label = cycle.label
    return rep


@dataclass
class RootStructure:
    j: int
    q: int
    delta: float
    roots: list[complex]
    r_plus: float | None
    case: str  # q_eq_j, negative_dominant, interior
    checks: dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list[str]:
        return [k for k, ok in self.checks.items() if not ok]


def _is_real(z: complex, tol: float) -> bool:
    return abs(z.imag) <= tol * max(1.0, abs(z))


def classify_roots(j: int, q: int, delta: float, tol: float = TIE_TOL) -> RootStructure:
    """Numerically check the root structure of the characteristic polynomial.

    Always: exactly one positive real root ``r_plus``.  Then

    * ``q == j``: ``r_plus`` has the largest magnitude and ``r_plus > 1`` iff
      ``delta > delta*``;
    * ``q > j``, ``j`` odd, ``q`` even: the dominant root is real, negative and
      strictly largest, with ``q - 2`` non-real roots inside it;
    * otherwise: ``j - 1`` roots besides ``r_plus`` lie strictly inside
      ``|l| = max(r_plus, 1)``, exactly one of them real iff ``j`` is even, and
      ``q - j`` non-real roots lie strictly outside ``|l| = r_plus``.
    """
    d = _delta_value(delta)
    if d <= 0:
        raise DomainError(f"root structure needs delta > 0, got {d}")
    coeffs = char_poly(j, q, d)
    rts = roots(coeffs)
    checks: dict[str, bool] = {}
    checks["residuals"] = all(residual_ok(coeffs, z) for z in rts)
    positive = [z for z in rts if _is_real(z, tol) and z.real > 0]
    checks["one_positive_root"] = len(positive) == 1
    r_plus = positive[0].real if positive else None
    dstar = (q + 1 - j) / j
    if r_plus is None:
        return RootStructure(j, q, d, rts, None, "undetermined", checks)
    others = list(rts)
    others.remove(positive[0])
    top = rts[0]
    if q == j:
        case = "q_eq_j"
        checks["r_plus_dominant"] = all(abs(z) < r_plus * (1 + tol) for z in others)
        if abs(d - dstar) > tol * max(1.0, dstar):
            checks["r_plus_gt_1_iff_delta_gt_star"] = (r_plus > 1.0) == (d > dstar)
    elif j % 2 == 1 and q % 2 == 0:
        case = "negative_dominant"
        checks["dominant_real_negative"] = _is_real(top, tol) and top.real < 0
        checks["dominant_strict"] = abs(rts[1]) < abs(top) * (1 - tol)
        inner = [z for z in rts[1:] if z is not positive[0] and not (_is_real(z, tol) and z.real > 0)]
        checks["inner_nonreal"] = sum(not _is_real(z, tol) for z in inner) == q - 2
    else:
        case = "interior"
        radius = max(r_plus, 1.0)
        inside = [z for z in others if abs(z) < radius * (1 - tol)]
        outside = [z for z in others if abs(z) > r_plus * (1 + tol)]
        checks["inside_count"] = len(inside) == j - 1
        checks["inside_real_iff_j_even"] = (sum(_is_real(z, tol) for z in inside) == 1) == (j % 2 == 0)
        checks["outside_count"] = len(outside) == q - j
        checks["outside_nonreal"] = all(not _is_real(z, tol) for z in outside)
    return RootStructure(j, q, d, rts, r_plus, case, checks)


def iterate_log_map(matrix, epochs: int = 200, x0: Sequence[float] | None = None) -> np.ndarray:
    """Iterates ``X <- M X`` from ``x0`` (default all -1); returns shape (epochs + 1, q)."""
    m = matrix.entries if isinstance(matrix, TransitionMatrix) else np.asarray(matrix, dtype=float)
    x = -np.ones(m.shape[0]) if x0 is None else np.asarray(x0, dtype=float)
    out = np.empty((epochs + 1, m.shape[0]))
    out[0] = x
    for k in range(epochs):
        x = m @ x
        out[k + 1] = x
    return out


def diverges_uniformly(history: np.ndarray, transient: float = 0.5) -> bool:
    """True if, after the transient fraction, every coordinate is negative and strictly decreasing."""
    tail = history[int(len(history) * transient):]
    if not np.all(np.isfinite(tail)):
        return False
    return bool(np.all(tail < 0) and np.all(np.diff(tail, axis=0) < 0))
