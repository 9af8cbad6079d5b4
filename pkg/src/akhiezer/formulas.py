"""Closed-form theta expressions for the Akhiezer polynomials and their data.

Everything is assembled from the period data of ``surface``: the vectors
L = -2u∞ and u∞, the capacity C(E), and the Abelian integrals u(z), Ω(z)
taken from β_{g+1} along the paths fixed in ``surface.abel_and_omega``.

    h_n     = 2 C^{2n} Θ((n+½)L) / Θ((n-½)L),         h_0 = 1
    D_{n+1} = 2^n C^{n(n+1)} Θ((2n+1)u∞) / Θ(u∞)
    P_n(z)  = K_n [e^{nΩ} Θ(u + nL) + e^{-nΩ} Θ(nL - u)] / Θ(u),
              K_n = C^n Θ(u∞) / Θ(u∞ + nL)

The second sheet of the curve is reached by Ω → -Ω, u → -u.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from src.akhiezer.errors import NearThetaDivisor
from src.akhiezer.geometry import IntervalSet, psi, series_coeffs
from src.akhiezer.opoly import RecurrenceTable, eval_P_all, eval_Q_all
from src.akhiezer.quadrature import DEFAULT_ORDER
from src.akhiezer.surface import (
    HyperellipticCurve,
    PeriodData,
    abel_and_omega,
    curve_of,
    periods,
)
from src.akhiezer.theta import (
    DEFAULT_TOL,
    DIVISOR_THRESHOLD,
    ThetaContext,
    theta_and_scale,
    theta_dlog,
)

logger = logging.getLogger(__name__)

# relative step used to leave the theta divisor along a gap
DIVISOR_SHIFT = 1e-6
CAUCHY_POINTS = 128

N1_CORRECTION = np.array([[0.0, 0.0], [-1.0, 0.0]])


@dataclass(frozen=True, eq=False)
class ThetaPipeline:
    E: IntervalSet
    curve: HyperellipticCurve
    pd: PeriodData
    ctx: ThetaContext
    kappa: float

    @property
    def genus(self) -> int:
        return self.E.genus

    @property
    def L(self) -> np.ndarray:
        return self.pd.L

    @property
    def u_inf(self) -> np.ndarray:
        return self.pd.u_inf

    @property
    def capacity(self) -> float:
        return self.pd.capacity

    @property
    def first_column(self) -> np.ndarray:
        """c_j = (A⁻¹)_{j1}, the weights of the theta log-derivatives in b_n."""
        return self.pd.Ainv[:, 0] if self.genus else np.zeros(0)

    @property
    def omega1(self) -> float:
        """Coefficient of 1/z in Ω(z) - ln z + ln C at ∞⁺."""
        lead = self.pd.lambdas[-1] if self.genus else 0.0
        return float(-(lead + 0.5 * np.sum(self.E.deltas)))


def build_pipeline(E: IntervalSet, order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL) -> ThetaPipeline:
    """Period data and a certified theta context for E."""
    curve = curve_of(E)
    pd = periods(curve, order)
    box = float(np.sum(np.abs(pd.B.imag))) if E.genus else 0.0
    ctx = ThetaContext.certified(pd.B, tol, box)
    logger.info("Theta pipeline ready: genus %d, radius %d, C(E)=%.12g", E.genus, ctx.radius, pd.capacity)
    return ThetaPipeline(E=E, curve=curve, pd=pd, ctx=ctx, kappa=series_coeffs(E).kappa)


def _theta_checked(pipeline: ThetaPipeline, s) -> complex:
    value, scale = theta_and_scale(pipeline.ctx, s)
    if abs(value) < DIVISOR_THRESHOLD * scale:
        raise NearThetaDivisor(f"|Θ| = {abs(value):.3e} at argument {np.round(s, 6)}")
    return value


def _theta_real(pipeline: ThetaPipeline, s) -> float:
    return _theta_checked(pipeline, s).real


# ══════════════════════════════════════════════════════════════════════════════
# Recurrence data
# ══════════════════════════════════════════════════════════════════════════════

def h_n_theta(pipeline: ThetaPipeline, n: int) -> float:
    if n < 0:
        raise ValueError("h_n needs n >= 0")
    if n == 0:
        return 1.0
    L = pipeline.L
    ratio = _theta_real(pipeline, (n + 0.5) * L) / _theta_real(pipeline, (n - 0.5) * L)
    return 2.0 * pipeline.capacity ** (2 * n) * ratio


def a_n_theta(pipeline: ThetaPipeline, n: int) -> float:
    if n < 1:
        raise ValueError("a_n needs n >= 1")
    L = pipeline.L
    C2 = pipeline.capacity**2
    if n == 1:
        return 2.0 * C2 * _theta_real(pipeline, 1.5 * L) / _theta_real(pipeline, 0.5 * L)
    middle = _theta_real(pipeline, (n - 0.5) * L)
    return C2 * _theta_real(pipeline, (n + 0.5) * L) * _theta_real(pipeline, (n - 1.5) * L) / middle**2


def _dlog_sum(pipeline: ThetaPipeline, s: np.ndarray) -> float:
    c = pipeline.first_column
    return float(sum(c[j] * theta_dlog(pipeline.ctx, s, j).real for j in range(pipeline.genus)))


def b_n_theta(pipeline: ThetaPipeline, n: int) -> float:
    if n < 1:
        raise ValueError("b_n needs n >= 1")
    if pipeline.genus == 0:
        return pipeline.kappa
    L = pipeline.L
    return pipeline.kappa + (
        _dlog_sum(pipeline, (n - 0.5) * L)
        - _dlog_sum(pipeline, (n - 1.5) * L)
        - 2.0 * _dlog_sum(pipeline, 0.5 * L)
    )


def p1_theta(pipeline: ThetaPipeline, n: int) -> float:
    """Sub-leading coefficient of P_n from the z → ∞ expansion of the polynomial formula."""
    if n < 0:
        raise ValueError("p1 needs n >= 0")
    if pipeline.genus == 0:
        return n * pipeline.omega1
    L = pipeline.L
    return n * pipeline.omega1 - (_dlog_sum(pipeline, (n - 0.5) * L) + _dlog_sum(pipeline, 0.5 * L))


def hankel_theta(pipeline: ThetaPipeline, n: int) -> float:
    """D_{n+1} = det(μ_{j+k})_{j,k<=n}."""
    if n < 0:
        raise ValueError("hankel_theta needs n >= 0")
    u = pipeline.u_inf
    ratio = _theta_real(pipeline, (2 * n + 1) * u) / _theta_real(pipeline, u)
    return 2.0**n * pipeline.capacity ** (n * (n + 1)) * ratio


def c12_theta(pipeline: ThetaPipeline, n: int) -> float:
    """Coefficient of z^{-n} in Ψ_{n1} on the second sheet, which equals h_n / 2."""
    u, L = pipeline.u_inf, pipeline.L
    return pipeline.capacity ** (2 * n) * _theta_real(pipeline, u - n * L) / _theta_real(pipeline, u + n * L)


# ══════════════════════════════════════════════════════════════════════════════
# Functions of z
# ══════════════════════════════════════════════════════════════════════════════

def _gap_midpoint(E: IntervalSet, x: float) -> float:
    for lo, hi in E.gaps:
        if lo <= x < hi:
            return 0.5 * (lo + hi)
    raise NearThetaDivisor(f"{x} is on the theta divisor outside every gap")


def _shift_off_divisor(pipeline: ThetaPipeline, x: float) -> Tuple[complex, np.ndarray, complex, complex]:
    mid = _gap_midpoint(pipeline.E, x)
    step = DIVISOR_SHIFT * pipeline.E.diameter
    moved = x + (step if mid > x else -step)
    logger.warning("z=%.15g sits on the theta divisor; evaluating at %.15g", x, moved)
    u, omega = abel_and_omega(pipeline.curve, pipeline.pd, moved)
    return complex(moved), u, omega, theta_and_scale(pipeline.ctx, u)[0]


def _integrals(pipeline: ThetaPipeline, z: complex) -> Tuple[complex, np.ndarray, complex, complex]:
    # (z used, u(z), Ω(z), Θ(u(z))); Θ(u) vanishes like sqrt(z - α_k) at every α_k
    z = complex(z)
    if z.imag == 0 and z.real in pipeline.E.alphas:
        return _shift_off_divisor(pipeline, z.real)
    u, omega = abel_and_omega(pipeline.curve, pipeline.pd, z)
    value, scale = theta_and_scale(pipeline.ctx, u)
    if abs(value) >= DIVISOR_THRESHOLD * scale:
        return z, u, omega, value
    if z.imag != 0:
        raise NearThetaDivisor(f"Θ(u(z)) vanishes at z = {z}")
    return _shift_off_divisor(pipeline, z.real)


def P_n_theta(pipeline: ThetaPipeline, n: int, z: complex) -> complex:
    """Monic P_n(z) from the two-exponential theta display."""
    if n < 0:
        raise ValueError("P_n needs n >= 0")
    if n == 0:
        return 1.0 + 0j
    _, u, omega, theta_u = _integrals(pipeline, z)
    L, u_inf = pipeline.L, pipeline.u_inf
    K = pipeline.capacity**n * _theta_checked(pipeline, u_inf) / _theta_checked(pipeline, u_inf + n * L)
    ctx = pipeline.ctx
    upper = np.exp(n * omega) * theta_and_scale(ctx, u + n * L)[0]
    lower = np.exp(-n * omega) * theta_and_scale(ctx, n * L - u)[0]
    return complex(K * (upper + lower) / theta_u)


def _psi_from_integrals(
    pipeline: ThetaPipeline, n: int, u: np.ndarray, omega: complex, theta_u: complex
) -> Tuple[complex, complex]:
    L, u_inf, C = pipeline.L, pipeline.u_inf, pipeline.capacity
    ctx = pipeline.ctx
    theta_inf = _theta_checked(pipeline, u_inf)
    first = (
        C**n * theta_inf / _theta_checked(pipeline, u_inf + n * L)
        * np.exp(n * omega) * theta_and_scale(ctx, u + n * L)[0] / theta_u
    )
    m = n - 1
    second = (
        C ** (-m) * theta_inf / _theta_checked(pipeline, u_inf - m * L)
        * np.exp(m * omega) * theta_and_scale(ctx, u + m * L)[0] / theta_u
    )
    return complex(first), complex(second)


def psi_theta(pipeline: ThetaPipeline, n: int, z: complex, sheet: int = 1) -> Tuple[complex, complex]:
    """(Ψ_{n1}, Ψ_{n2}) at the point over z on ``sheet`` (1 reference, 2 other)."""
    if n < 1:
        raise ValueError("Ψ_n is defined for n >= 1")
    if sheet not in (1, 2):
        raise ValueError("sheet must be 1 or 2")
    _, u, omega, theta_u = _integrals(pipeline, z)
    if sheet == 2:
        u, omega = -u, -omega
    return _psi_from_integrals(pipeline, n, u, omega, theta_u)


def psi_matrix_theta(pipeline: ThetaPipeline, n: int, z: complex) -> np.ndarray:
    """Columns Ψ(P), Ψ(P*) over z."""
    _, u, omega, theta_u = _integrals(pipeline, z)
    top = _psi_from_integrals(pipeline, n, u, omega, theta_u)
    bottom = _psi_from_integrals(pipeline, n, -u, -omega, theta_u)
    return np.array([[top[0], bottom[0]], [top[1], bottom[1]]], dtype=complex)


def baker_direct(table: RecurrenceTable, E: IntervalSet, n: int, z: complex) -> np.ndarray:
    """Ψ_n from P_n, Q_n and ψ; the columns are the two sheets over z."""
    if n < 1:
        raise ValueError("Ψ_n is defined for n >= 1")
    psi_z = complex(psi(E, z))
    p = eval_P_all(table, n, z)
    q = eval_Q_all(table, n, z)
    h_prev = table.h[n - 1]
    return np.array(
        [
            [0.5 * (p[n] + q[n] / psi_z), 0.5 * (p[n] - q[n] / psi_z)],
            [(p[n - 1] + q[n - 1] / psi_z) / h_prev, (p[n - 1] - q[n - 1] / psi_z) / h_prev],
        ],
        dtype=complex,
    )


def cauchy_radius(E: IntervalSet) -> float:
    return 2.0 * float(np.max(np.abs(E.deltas))) + 1.0


def psi1_coefficients(pipeline: ThetaPipeline, n: int, points: int = CAUCHY_POINTS) -> np.ndarray:
    """ψ₁(n) in Ψ_n(z) z^{-diag(n, 1-n)} = I + ψ₁/z + ... by trapezoidal contour integrals.

    Columns are read from the two sheets: Ψ(P) carries the first column,
    Ψ(P*) the second.
    """
    radius = cauchy_radius(pipeline.E)
    angles = 2 * np.pi * (np.arange(points) + 0.5) / points
    acc = np.zeros((2, 2), dtype=complex)
    for z in radius * np.exp(1j * angles):
        values = psi_matrix_theta(pipeline, n, z)
        acc[0, 0] += (z ** (-n) * values[0, 0] - 1.0) * z
        acc[1, 0] += z ** (-n) * values[1, 0] * z
        acc[0, 1] += z ** (n - 1) * values[0, 1] * z
        acc[1, 1] += (z ** (n - 1) * values[1, 1] - 1.0) * z
    return (acc / points).real


def psi1_expected(table: RecurrenceTable, kappa: float, n: int, correction: bool = True) -> np.ndarray:
    """ψ₁(n) as predicted from m₁(n) and κ."""
    p1 = table.p1[n]
    expected = np.array(
        [[p1, 0.5 * table.h[n]], [2.0 / table.h[n - 1], -p1 - kappa]],
        dtype=float,
    )
    if n == 1 and correction:
        expected = expected + N1_CORRECTION
    return expected


def psi1_m1_check(pipeline: ThetaPipeline, table: RecurrenceTable, n: int) -> Dict[str, float]:
    """Entry-wise residuals of the ψ₁-m₁ relation; ``uncorrected`` omits the n=1 term."""
    found = psi1_coefficients(pipeline, n)
    expected = psi1_expected(table, pipeline.kappa, n)
    scale = np.maximum(1.0, np.abs(expected))
    diff = np.abs(found - expected) / scale
    residuals = {
        "psi11": float(diff[0, 0]),
        "psi12": float(diff[0, 1]),
        "psi21": float(diff[1, 0]),
        "psi22": float(diff[1, 1]),
    }
    if n == 1:
        bare = psi1_expected(table, pipeline.kappa, n, correction=False)
        residuals["uncorrected"] = float(np.max(np.abs(found - bare) / np.maximum(1.0, np.abs(bare))))
    return residuals


def theta_zero_residuals(pipeline: ThetaPipeline) -> np.ndarray:
    """|Θ(∫_{β_{g+1}}^{α_k} dω)| relative to the term scale, one entry per α_k."""
    out = []
    for u in pipeline.pd.alpha_abel:
        value, scale = theta_and_scale(pipeline.ctx, u)
        out.append(abs(value) / scale)
    return np.array(out)


def sheet_flip_residual(pipeline: ThetaPipeline, table: RecurrenceTable, n: int, z: complex) -> float:
    """Theta Ψ_n on each sheet over z against the matching column of ``baker_direct``.

    Sheet 2 is reached by u → -u, Ω → -Ω; the recurrence side carries it as
    the sign of Q/ψ, so the two constructions of the involution are compared.
    """
    direct = baker_direct(table, pipeline.E, n, z)
    scale = max(1.0, float(np.max(np.abs(direct))))
    worst = 0.0
    for sheet in (1, 2):
        found = np.array(psi_theta(pipeline, n, z, sheet=sheet))
        worst = max(worst, float(np.max(np.abs(found - direct[:, sheet - 1]))) / scale)
    return worst
