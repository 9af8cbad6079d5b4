"""Fuchsian residues, transfer matrices and the deformation identities.

Φ_n(z) = Y_n(z) diag(1, 1/w(z)) solves dΦ_n/dz = A(z, n) Φ_n with

    A(z, n) = Σ_j C_j(n) / (z - δ_j),

where C_j(n) is A_j(n) at an α endpoint and B_j(n) at a β endpoint; both
are rank-one matrices assembled from P_n, P_{n-1}, Q_n, Q_{n-1} at δ_j.
Derivatives in the endpoints are realized by re-running the whole
quadrature pipeline at perturbed endpoints and taking central differences.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.akhiezer.errors import GeometryBroken, GeometryError, StepTooLarge
from src.akhiezer.geometry import IntervalSet, series_coeffs, validate_interval_set, w_complex
from src.akhiezer.opoly import (
    RecurrenceTable,
    eval_P_all,
    eval_Q_all,
    m1,
    stieltjes,
    y_matrix,
)
from src.akhiezer.quadrature import DEFAULT_ORDER, build_rules

logger = logging.getLogger(__name__)

DEFAULT_FD_EPS = 1e-5
DEFAULT_FD_TOL = 1e-6
E11 = np.array([[1.0, 0.0], [0.0, 0.0]])


@dataclass(frozen=True, eq=False)
class ResidueSet:
    """C_j(n) in δ order (A_1..A_g, then B_0..B_{g+1})."""

    n: int
    C: np.ndarray
    deltas: np.ndarray

    def coefficient(self, z: complex) -> np.ndarray:
        """A(z, n) = Σ C_j / (z - δ_j)."""
        return np.einsum("j,jab->ab", 1.0 / (z - self.deltas), self.C.astype(complex))


@dataclass(frozen=True, eq=False)
class FreudQuantities:
    """r_n and R_n at every endpoint, rows indexed by n (0..n_max)."""

    r: np.ndarray
    R: np.ndarray
    deltas: np.ndarray


@dataclass
class DeformationEntry:
    check: str
    n: int
    j: int
    k: int
    eps: float
    residual: float
    residual_half: float = float("nan")
    ratio: float = float("nan")
    detail: Dict[str, float] = field(default_factory=dict)


def residues(table: RecurrenceTable, E: IntervalSet, n: int) -> ResidueSet:
    """Residue matrices C_j(n) at every branch point."""
    if not 1 <= n <= table.n_max:
        raise ValueError(f"residues need 1 <= n <= {table.n_max}")
    deltas = E.deltas
    P = eval_P_all(table, n, deltas).real
    Q = eval_Q_all(table, n, deltas).real
    h = table.h[n - 1]
    C = np.empty((len(deltas), 2, 2))
    for j in range(len(deltas)):
        pn, pm, qn, qm = P[n, j], P[n - 1, j], Q[n, j], Q[n - 1, j]
        if E.is_alpha(j):
            # -½ Y(α) E₂₂ Y(α)^{-1}, with ψ(α) = 0
            C[j] = 0.5 * np.array([[-pm * qn / h, pn * qn], [-pm * qm / h**2, pn * qm / h]])
        else:
            C[j] = 0.5 * np.array([[qn * pm / h, -qn * pn], [qm * pm / h**2, -qm * pn / h]])
    return ResidueSet(n=n, C=C, deltas=np.asarray(deltas, dtype=float))


def calA(resset: ResidueSet, E: IntervalSet, k: int) -> np.ndarray:
    """Moment Σ_j C_j δ_j^k of the residues (k = 0 or 1)."""
    if k not in (0, 1):
        raise ValueError("only the zeroth and first residue moments are defined")
    return np.einsum("j,jab->ab", resset.deltas**k, resset.C)


def calA_expected(table: RecurrenceTable, E: IntervalSet, n: int, k: int) -> np.ndarray:
    """Closed form of Σ C_j δ_j^k: diag(n, 1-n) for k = 0, and from m₁(n) and κ for k = 1."""
    lead = np.diag([float(n), 1.0 - n])
    if k == 0:
        return lead
    kappa = series_coeffs(E).kappa
    m = m1(table, n)
    return np.diag([0.0, kappa]) + m @ np.diag([n - 1.0, -float(n)]) - lead @ m


def transfer(table: RecurrenceTable, n: int, z: complex) -> np.ndarray:
    """U_n(z) = [[z - b_{n+1}, -h_n], [1/h_n, 0]]."""
    h = table.h[n]
    return np.array([[z - table.b[n + 1], -h], [1.0 / h, 0.0]], dtype=complex)


def conjugation_residual(table: RecurrenceTable, E: IntervalSet, n: int) -> float:
    """max_j |C_j(n+1) - U_n(δ_j) C_j(n) U_n(δ_j)^{-1}|."""
    now, nxt = residues(table, E, n), residues(table, E, n + 1)
    worst = 0.0
    for j, delta in enumerate(E.deltas):
        U = transfer(table, n, delta).real
        moved = U @ now.C[j] @ np.linalg.inv(U)
        worst = max(worst, float(np.max(np.abs(nxt.C[j] - moved))))
    return worst


def lax_residual(table: RecurrenceTable, E: IntervalSet, n: int, z: complex) -> float:
    """|A(z, n+1) U_n(z) - U_n(z) A(z, n) - dU_n/dz|."""
    U = transfer(table, n, z)
    A_now = residues(table, E, n).coefficient(z)
    A_next = residues(table, E, n + 1).coefficient(z)
    return float(np.max(np.abs(A_next @ U - U @ A_now - E11)))


def phi_matrix(table: RecurrenceTable, E: IntervalSet, n: int, z: complex) -> np.ndarray:
    """Φ_n(z) = Y_n(z) diag(1, 1/w(z))."""
    Y = y_matrix(table, E, n, z).value
    return Y @ np.diag([1.0, 1.0 / complex(w_complex(E, z))])


def fuchsian_residual(
    table: RecurrenceTable,
    E: IntervalSet,
    n: int,
    z: complex,
    step: float = 1e-5,
) -> float:
    """Relative mismatch between a central z-difference of Φ_n and A(z, n)Φ_n."""
    eta = step * E.diameter
    derivative = (phi_matrix(table, E, n, z + eta) - phi_matrix(table, E, n, z - eta)) / (2 * eta)
    expected = residues(table, E, n).coefficient(z) @ phi_matrix(table, E, n, z)
    return float(np.max(np.abs(derivative - expected)) / max(1.0, np.max(np.abs(expected))))


def freud_quantities(table: RecurrenceTable, E: IntervalSet) -> FreudQuantities:
    """r_n = P_nQ_{n-1}/(2h_{n-1}) and R_n = P_nQ_n/(2h_n) at every endpoint."""
    deltas = E.deltas
    P = eval_P_all(table, table.n_max, deltas).real
    Q = eval_Q_all(table, table.n_max, deltas).real
    r = np.full_like(P, np.nan)
    r[1:] = P[1:] * Q[:-1] / (2 * table.h[:-1, None])
    R = P * Q / (2 * table.h[:, None])
    return FreudQuantities(r=r, R=R, deltas=np.asarray(deltas, dtype=float))


def freud_residuals(table: RecurrenceTable, E: IntervalSet, n_range: Sequence[int]) -> pd.DataFrame:
    """Residuals of the six difference equations at every endpoint.

    The shift equations need n + 1 <= n_max; the determinant equations are
    evaluated for every n in ``n_range``.
    """
    fq = freud_quantities(table, E)
    a, b = table.a, table.b
    rows: List[Dict[str, object]] = []
    for n in n_range:
        for j, delta in enumerate(E.deltas):
            family = "alpha" if E.is_alpha(j) else "beta"
            r, R, R_prev = fq.r[n, j], fq.R[n, j], fq.R[n - 1, j]
            det_res = a[n] * R * R_prev - r * (r + 0.5)
            rows.append({"n": n, "endpoint": j, "family": family, "equation": "determinant", "residual": det_res})
            if n + 1 > table.n_max:
                continue
            x = delta - b[n + 1]
            shift_res = fq.r[n + 1, j] + r + 0.5 - R * x
            lhs = a[n + 1] * fq.R[n + 1, j] - a[n] * R_prev
            if family == "alpha":
                rhs = -x * (-x * R + 2 * r + 0.5)
            else:
                rhs = x * (x * R - 2 * r - 0.5)
            rows.append({"n": n, "endpoint": j, "family": family, "equation": "shift", "residual": shift_res})
            rows.append({"n": n, "endpoint": j, "family": family, "equation": "second_order", "residual": lhs - rhs})
    frame = pd.DataFrame(rows, columns=["n", "endpoint", "family", "equation", "residual"])
    frame["residual"] = frame["residual"].abs()
    return frame


# ══════════════════════════════════════════════════════════════════════════════
# Endpoint deformations
# ══════════════════════════════════════════════════════════════════════════════

def _shifted(E: IntervalSet, k: int, shift: float, gap_tol: float) -> IntervalSet:
    deltas = list(E.deltas)
    deltas[k] += shift
    g = E.genus
    try:
        return validate_interval_set(deltas[:g], deltas[g:], gap_tol=gap_tol)
    except GeometryError as exc:
        raise GeometryBroken(f"moving endpoint {k} by {shift:.3e} breaks E: {exc}") from exc


def _residues_at(E: IntervalSet, n_top: int, order: int) -> Tuple[RecurrenceTable, Dict[int, ResidueSet]]:
    table = stieltjes(E, build_rules(E, order), n_top)
    return table, {n: residues(table, E, n) for n in range(1, n_top + 1)}


class DeformationProbe:
    """Caches pipelines at δ_k ± ε so several identities share the re-runs."""

    def __init__(self, E: IntervalSet, n_top: int, order: int = DEFAULT_ORDER, gap_tol: float = 1e-6):
        self.E = E
        self.n_top = n_top
        self.order = order
        self.gap_tol = gap_tol
        self._cache: Dict[Tuple[int, float], Tuple[RecurrenceTable, Dict[int, ResidueSet]]] = {}
        self.base_table, self.base = _residues_at(E, n_top, order)

    def at(self, k: int, shift: float) -> Tuple[RecurrenceTable, Dict[int, ResidueSet]]:
        key = (k, shift)
        if key not in self._cache:
            self._cache[key] = _residues_at(_shifted(self.E, k, shift, self.gap_tol), self.n_top, self.order)
        return self._cache[key]

    def step(self, eps: float) -> float:
        return eps * self.E.diameter

    def derivative(self, k: int, eps: float, extract: Callable) -> np.ndarray:
        """Central difference in δ_k of ``extract(table, residues)``."""
        step = self.step(eps)
        plus = np.asarray(extract(*self.at(k, step)))
        minus = np.asarray(extract(*self.at(k, -step)))
        return (plus - minus) / (2 * step)


def schlesinger_rhs(resset: ResidueSet, j: int, k: int) -> np.ndarray:
    """Predicted ∂C_j/∂δ_k from the Schlesinger equations."""
    C, d = resset.C, resset.deltas

    def bracket(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return x @ y - y @ x

    if j != k:
        return bracket(C[j], C[k]) / (d[j] - d[k])
    return -sum(bracket(C[l], C[k]) / (d[l] - d[k]) for l in range(len(d)) if l != k)


def _scale(resset: ResidueSet) -> float:
    return max(1.0, float(np.max(np.abs(resset.C))))


def _with_half_step(
    entry_at: Callable[[float], float],
    eps: float,
    tol: float,
) -> Tuple[float, float, float]:
    full = entry_at(eps)
    half = entry_at(eps / 2)
    ratio = full / half if half > 0 else float("nan")
    if full > tol and half >= full:
        raise StepTooLarge(f"residual {full:.3e} did not shrink at half step ({half:.3e})")
    return full, half, ratio


def schlesinger_fd(
    E: IntervalSet,
    n: int,
    k: int,
    eps: float = DEFAULT_FD_EPS,
    order: int = DEFAULT_ORDER,
    tol: float = DEFAULT_FD_TOL,
    probe: Optional[DeformationProbe] = None,
) -> List[DeformationEntry]:
    """Central-difference check of ∂C_j(n)/∂δ_k for every j.

    Residuals are scaled by max(1, max|C|) and carry the half-step re-run.
    """
    probe = probe or DeformationProbe(E, n + 1, order)
    base = probe.base[n]
    entries = []
    for j in range(len(E.deltas)):
        rhs = schlesinger_rhs(base, j, k)

        def residual(step_eps: float, j: int = j, rhs: np.ndarray = rhs) -> float:
            fd = probe.derivative(k, step_eps, lambda _t, res: res[n].C[j])
            return float(np.max(np.abs(fd - rhs))) / _scale(base)

        full, half, ratio = _with_half_step(residual, eps, tol)
        entries.append(DeformationEntry("schlesinger", n, j, k, eps, full, half, ratio))
    return entries


def _omega(resset: ResidueSet, j: int) -> float:
    C, d = resset.C, resset.deltas
    return float(sum(np.trace(C[j] @ C[l]) / (d[j] - d[l]) for l in range(len(d)) if l != j))


def tau_identities(
    E: IntervalSet,
    n: int,
    k: int,
    eps: float = DEFAULT_FD_EPS,
    order: int = DEFAULT_ORDER,
    tol: float = DEFAULT_FD_TOL,
    probe: Optional[DeformationProbe] = None,
) -> List[DeformationEntry]:
    """∂h_n = -C_k¹², the τ-increment identity, closedness and 𝒜₀ constancy."""
    probe = probe or DeformationProbe(E, n + 1, order)
    table, base = probe.base_table, probe.base
    h = table.h[n]
    d = base[n].deltas
    entries = []

    def h_residual(step_eps: float) -> float:
        fd = probe.derivative(k, step_eps, lambda t, _res: t.h[n])
        return abs(float(fd) + base[n].C[k, 0, 1]) / h

    full, half, ratio = _with_half_step(h_residual, eps, tol)
    entries.append(DeformationEntry("tau.norm_derivative", n, k, k, eps, full, half, ratio))

    increment = sum(
        np.trace(base[n + 1].C[k] @ base[n + 1].C[l] - base[n].C[k] @ base[n].C[l]) / (d[k] - d[l])
        for l in range(len(d))
        if l != k
    )

    def increment_residual(step_eps: float) -> float:
        fd = probe.derivative(k, step_eps, lambda t, _res: np.log(t.h[n]))
        return abs(float(fd) - float(increment))

    full, half, ratio = _with_half_step(increment_residual, eps, tol)
    entries.append(
        DeformationEntry(
            "tau.increment", n, k, k, eps, full, half, ratio,
            detail={"exact_dlog_h": float(-base[n].C[k, 0, 1] / h)},
        )
    )

    for j in range(len(d)):
        if j == k:
            continue

        def closed_residual(step_eps: float, j: int = j) -> float:
            d_k_omega_j = probe.derivative(k, step_eps, lambda _t, res: _omega(res[n], j))
            d_j_omega_k = probe.derivative(j, step_eps, lambda _t, res: _omega(res[n], k))
            return abs(float(d_k_omega_j - d_j_omega_k)) / max(1.0, abs(_omega(base[n], j)))

        full, half, ratio = _with_half_step(closed_residual, eps, tol)
        entries.append(DeformationEntry("tau.closedness", n, j, k, eps, full, half, ratio))

    drift = probe.derivative(k, eps, lambda _t, res: calA(res[n], E, 0))
    entries.append(
        DeformationEntry("tau.calA0_constant", n, k, k, eps, float(np.max(np.abs(drift))) / _scale(base[n]))
    )
    return entries
