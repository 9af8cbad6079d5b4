"""The hyperelliptic curve y² = Π (z - δ_j) attached to E, and its periods.

Reference sheet: y = Π sqrt(z - δ_j) with principal roots, so y ~ z^{g+1}
as z → +∞ and the cuts are the bands. On the real axis the upper rim
boundary value is y₊(t) = i^{#(δ_j > t)} Π sqrt|t - δ_j|: real on gaps,
purely imaginary on bands.

Homology basis (see DESIGN.md): a_k is the chain of gaps k..g, so

    ∮_{a_k} f = -2 Σ_{m=k..g} ∫_{gap m} f,

and b_l is the loop around band l-1, ∮_{b_l} f = 2 ∫_{band l-1} f₊.
Every integrand t^{g-k}/y has inverse square-root endpoint singularities
and is integrated with the Jacobi rules of ``quadrature``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Tuple, Union

import numpy as np

from src.akhiezer.errors import OnCut, PathDegenerate, SingularPeriodMatrix
from src.akhiezer.geometry import ComplexLike, IntervalSet, on_cut
from src.akhiezer.quadrature import DEFAULT_ORDER, jacobi_rule, legendre_rule

logger = logging.getLogger(__name__)

# cond(A) above this is treated as singular
MAX_PERIOD_COND = 1e12
# |z| beyond RAY_FACTOR * max|δ| is reached along a ray from infinity
RAY_FACTOR = 10.0
# Abel paths cross above the bands at PATH_HEIGHT * diam(E)
PATH_HEIGHT = 0.5
PATH_GROWTH = 4.0


@dataclass(frozen=True, eq=False)
class HyperellipticCurve:
    E: IntervalSet

    @property
    def genus(self) -> int:
        return self.E.genus

    @property
    def points(self) -> np.ndarray:
        return self.E.sorted_points

    @property
    def anchor(self) -> float:
        """Base point β_{g+1} of every Abelian integral."""
        return float(self.E.betas[-1])

    @property
    def ray_radius(self) -> float:
        return RAY_FACTOR * float(np.max(np.abs(self.E.deltas)))

    def powers(self, t: np.ndarray) -> np.ndarray:
        """Rows t^g, t^{g-1}, ..., 1."""
        exponents = np.arange(self.genus, -1, -1)
        return np.asarray(t)[None, ...] ** exponents.reshape((-1,) + (1,) * np.ndim(t))


@dataclass(frozen=True, eq=False)
class PeriodData:
    """Periods of the normalized differentials; empty arrays at genus 0.

    ``omega_coef`` holds the coefficients of dΩ on t^g, ..., 1 (over y);
    ``lambdas[i]`` is the coefficient of t^i.
    """

    A: np.ndarray
    Ainv: np.ndarray
    B: np.ndarray
    B_direct: np.ndarray
    lambdas: np.ndarray
    L: np.ndarray
    u_inf: np.ndarray
    capacity: float
    D: np.ndarray
    omega_coef: np.ndarray
    alpha_abel: np.ndarray
    alpha_omega: np.ndarray
    order: int

    @property
    def genus(self) -> int:
        return len(self.L)


def curve_of(E: IntervalSet) -> HyperellipticCurve:
    """Curve attached to an interval set."""
    return HyperellipticCurve(E)


def branch_y(curve: HyperellipticCurve, z: ComplexLike) -> ComplexLike:
    """y(z) = Π sqrt(z - δ_j) off the bands."""
    arr = np.asarray(z, dtype=complex)
    if np.any(on_cut(curve.E, arr)):
        raise OnCut("y is two-valued on the bands; use branch_y_plus")
    values = np.prod(np.sqrt(arr[..., None] - curve.points), axis=-1)
    return complex(values) if values.ndim == 0 else values


def branch_y_plus(curve: HyperellipticCurve, t: Union[float, np.ndarray]) -> ComplexLike:
    """Upper-rim boundary value y(t + i0) for real t."""
    arr = np.asarray(t, dtype=float)
    count = np.sum(curve.points > arr[..., None], axis=-1)
    modulus = np.prod(np.sqrt(np.abs(arr[..., None] - curve.points)), axis=-1)
    values = (1j**count) * modulus
    return complex(values) if values.ndim == 0 else values


# ══════════════════════════════════════════════════════════════════════════════
# Monomial integrals ∫ t^{g-k} / y dt along elementary paths
# ══════════════════════════════════════════════════════════════════════════════

def _real_piece(
    curve: HyperellipticCurve,
    lo: float,
    hi: float,
    order: int,
    left_branch: bool,
    right_branch: bool,
) -> np.ndarray:
    t, weights = jacobi_rule(
        order, lo, hi, -0.5 if left_branch else 0.0, -0.5 if right_branch else 0.0
    )
    phase = 1j ** int(np.sum(curve.points > 0.5 * (lo + hi)))
    smooth = np.ones_like(t)
    for delta in curve.points:
        if (left_branch and delta == lo) or (right_branch and delta == hi):
            continue
        smooth = smooth * np.sqrt(np.abs(t - delta))
    return (curve.powers(t) / (phase * smooth)) @ weights


def _segment(
    curve: HyperellipticCurve,
    start: complex,
    end: complex,
    order: int,
    start_branch: bool,
    end_branch: bool,
) -> np.ndarray:
    # straight segment kept off the real axis except at its ends
    s, weights = jacobi_rule(
        order, 0.0, 1.0, -0.5 if start_branch else 0.0, -0.5 if end_branch else 0.0
    )
    span = end - start
    t = start + s * span
    scale = span + 0j
    rest = np.ones_like(t, dtype=complex)
    for delta in curve.points:
        if start_branch and delta == start:
            scale = scale / np.sqrt(span + 0j)
        elif end_branch and delta == end:
            scale = scale / np.sqrt(-span + 0j)
        else:
            rest = rest * np.sqrt(t - delta + 0j)
    return scale * ((curve.powers(t) / rest) @ weights)


def _leg(curve: HyperellipticCurve, start: complex, end: complex, order: int) -> np.ndarray:
    # straight leg inside the open upper half-plane, no branch point at either end
    s, weights = legendre_rule(order, 0.0, 1.0)
    span = end - start
    t = start + s * span
    y = np.prod(np.sqrt(t[..., None] - curve.points), axis=-1)
    return (curve.powers(t) / y) @ (weights * span)


def _climb(curve: HyperellipticCurve, x: float, low: float, high: float, order: int) -> np.ndarray:
    # x + i·low → x + i·high, pieces growing fourfold away from the real axis
    total = np.zeros(curve.genus + 1, dtype=complex)
    level = low
    while level < high:
        step = min(PATH_GROWTH * level, high)
        total = total + _leg(curve, complex(x, level), complex(x, step), order)
        level = step
    return total


def _path_height(curve: HyperellipticCurve, z: complex) -> float:
    return max(PATH_HEIGHT * curve.E.diameter, z.imag)


def _upper_path(curve: HyperellipticCurve, z: complex, order: int) -> np.ndarray:
    """β_{g+1} → z for Im z > 0, crossing above every band at a fixed height.

    Both vertical runs are graded towards the real axis so that a branch
    point or a band just below the path never sits close to a long leg.
    """
    top = curve.anchor
    height = _path_height(curve, z)
    others = curve.points[curve.points != top]
    first = min(height, 0.5 * float(np.min(top - others)))
    mono = _segment(curve, top, complex(top, first), order, True, False)
    mono = mono + _climb(curve, top, first, height, order)
    pieces = max(1, int(np.ceil(abs(z.real - top) / height)))
    knots = np.linspace(top, z.real, pieces + 1)
    for lo, hi in zip(knots[:-1], knots[1:]):
        mono = mono + _leg(curve, complex(lo, height), complex(hi, height), order)
    return mono - _climb(curve, z.real, z.imag, height, order)


def _upper_y(curve: HyperellipticCurve, t: np.ndarray) -> np.ndarray:
    if np.all(np.imag(t) == 0):
        return np.asarray(branch_y_plus(curve, np.real(t)))
    return np.prod(np.sqrt(t[..., None] - curve.points), axis=-1)


def _tail(
    curve: HyperellipticCurve,
    z: complex,
    order: int,
    omega_coef: np.ndarray,
) -> Tuple[np.ndarray, complex]:
    # ∫_z^∞ along the ray t = z/s; returns first-kind monomials and dΩ - dt/t
    s, weights = legendre_rule(order, 0.0, 1.0)
    t = z / s
    jac = weights * z / s**2
    y = _upper_y(curve, t)
    pw = curve.powers(t)
    first = (pw[1:] / y) @ jac
    third = ((omega_coef @ pw) / y - 1.0 / t) @ jac
    return first, complex(third)


def _rim(curve: HyperellipticCurve, x: float, order: int) -> np.ndarray:
    # ∫_{β_{g+1}}^{x} along the upper rim of the real axis
    pts = curve.points
    top = pts[-1]
    total = np.zeros(curve.genus + 1, dtype=complex)
    if x == top:
        return total
    if x > top:
        return _real_piece(curve, top, x, order, True, False)
    for i in range(len(pts) - 1, 0, -1):
        lo, hi = pts[i - 1], pts[i]
        if x <= lo:
            total -= _real_piece(curve, lo, hi, order, True, True)
            if x == lo:
                return total
        else:
            return total - _real_piece(curve, x, hi, order, False, True)
    return total - _real_piece(curve, x, pts[0], order, False, True)


# ══════════════════════════════════════════════════════════════════════════════
# Period data
# ══════════════════════════════════════════════════════════════════════════════

def _a_periods(curve: HyperellipticCurve, order: int) -> np.ndarray:
    # rows k = 1..g: ∮_{a_k} of every monomial
    gaps = np.array([_real_piece(curve, lo, hi, order, True, True) for lo, hi in curve.E.gaps])
    return -2.0 * np.cumsum(gaps[::-1], axis=0)[::-1]


def _band_integrals(curve: HyperellipticCurve, order: int) -> np.ndarray:
    return np.array([_real_piece(curve, lo, hi, order, True, True) for lo, hi in curve.E.bands])


def _split_point(curve: HyperellipticCurve) -> float:
    top = curve.anchor
    return top + curve.E.diameter + abs(top)


def periods(curve: HyperellipticCurve, quad_order: int = DEFAULT_ORDER) -> PeriodData:
    """Normalize the first-kind differentials and compute B, λ, L, u∞, C(E) and D."""
    g = curve.genus
    X = _split_point(curve)
    near = _real_piece(curve, curve.anchor, X, quad_order, True, False)
    if g == 0:
        omega_coef = np.ones(1)
        _, tail_third = _tail(curve, X, quad_order, omega_coef)
        log_cap = np.log(X) - near[0] - tail_third
        empty = np.zeros((0, 0))
        return PeriodData(
            A=empty, Ainv=empty, B=empty.astype(complex), B_direct=empty.astype(complex),
            lambdas=np.zeros(0), L=np.zeros(0), u_inf=np.zeros(0),
            capacity=float(np.exp(log_cap.real)), D=np.zeros(0, dtype=complex),
            omega_coef=omega_coef, alpha_abel=np.zeros((0, 0), dtype=complex),
            alpha_omega=np.zeros(0, dtype=complex), order=quad_order,
        )

    a_per = _a_periods(curve, quad_order)
    A = a_per[:, 1:].T.real
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > MAX_PERIOD_COND:
        raise SingularPeriodMatrix(f"a-period matrix has condition number {cond:.3e}")
    Ainv = np.linalg.inv(A)
    Lam = np.linalg.solve(A.T, -a_per[:, 0].real)
    omega_coef = np.concatenate([[1.0], Lam])

    bands = _band_integrals(curve, quad_order)
    B_direct = 2.0 * (bands[:g, 1:] @ Ainv.T).T

    alpha_mono = np.array([_rim(curve, alpha, quad_order) for alpha in curve.E.alphas])
    alpha_abel = alpha_mono[:, 1:] @ Ainv.T
    alpha_omega = alpha_mono @ omega_coef
    partial = 2.0 * alpha_abel.T - np.eye(g)
    B = np.empty((g, g), dtype=complex)
    B[:, 0] = partial[:, 0]
    B[:, 1:] = np.diff(partial, axis=1)

    L = ((bands[:g] @ omega_coef) / (1j * np.pi)).real
    tail_first, tail_third = _tail(curve, X, quad_order, omega_coef)
    u_inf = (Ainv @ (near[1:] + tail_first)).real
    log_cap = np.log(X) - near @ omega_coef - tail_third
    D = 2.0 * alpha_abel.sum(axis=0)
    logger.info("Periods computed for genus %d: capacity %.12g", g, float(np.exp(log_cap.real)))
    return PeriodData(
        A=A, Ainv=Ainv, B=B, B_direct=B_direct, lambdas=Lam[::-1].copy(), L=L, u_inf=u_inf,
        capacity=float(np.exp(log_cap.real)), D=D, omega_coef=omega_coef,
        alpha_abel=alpha_abel, alpha_omega=alpha_omega, order=quad_order,
    )


# ══════════════════════════════════════════════════════════════════════════════
# Abelian integrals from β_{g+1}
# ══════════════════════════════════════════════════════════════════════════════

def _mono_to_pair(pd: PeriodData, mono: np.ndarray) -> Tuple[np.ndarray, complex]:
    return pd.Ainv @ mono[1:], complex(mono @ pd.omega_coef)


def abel_and_omega(curve: HyperellipticCurve, pd: PeriodData, z: complex) -> Tuple[np.ndarray, complex]:
    """(∫ dω, ∫ dΩ) from β_{g+1} to z on the reference sheet.

    Paths: upper rim for real z, a detour above the bands for Im z > 0
    (within the ray radius), the ray from ∞⁺ beyond it; Im z < 0 by
    reflection.
    """
    z = complex(z)
    if z.imag < 0:
        u, omega = abel_and_omega(curve, pd, z.conjugate())
        return np.conj(u), omega.conjugate()
    if z.imag == 0:
        z = complex(z.real, 0.0)
        if z.real in curve.points and z.real != curve.anchor:
            raise PathDegenerate(f"{z.real} is a branch point")
        if z.real != curve.anchor and bool(on_cut(curve.E, z)):
            raise OnCut(f"{z.real} lies on a band")
    if abs(z) > curve.ray_radius:
        first, third = _tail(curve, z, pd.order, pd.omega_coef)
        u = pd.u_inf - pd.Ainv @ first if curve.genus else np.zeros(0, dtype=complex)
        omega = np.log(z) - np.log(pd.capacity) - third
        return np.asarray(u, dtype=complex), complex(omega)
    if z.imag == 0:
        mono = _rim(curve, z.real, pd.order)
    else:
        mono = _upper_path(curve, z, pd.order)
    u, omega = _mono_to_pair(pd, mono)
    return np.asarray(u, dtype=complex), omega


def abel(curve: HyperellipticCurve, pd: PeriodData, z: complex) -> np.ndarray:
    """u(z) = ∫_{β_{g+1}}^{z} dω."""
    return abel_and_omega(curve, pd, z)[0]


def omega3(curve: HyperellipticCurve, pd: PeriodData, z: complex) -> complex:
    """Ω(z) = ∫_{β_{g+1}}^{z} dΩ."""
    return abel_and_omega(curve, pd, z)[1]


def detour_abel(curve: HyperellipticCurve, pd: PeriodData, index: int, height: float = 0.5) -> np.ndarray:
    """∫ dω from β_{g+1} to α_index through a point above the real axis."""
    alpha = curve.E.alphas[index]
    apex = 0.5 * (alpha + curve.anchor) + 1j * height * curve.E.diameter
    mono = _segment(curve, curve.anchor, apex, pd.order, True, False)
    mono = mono + _segment(curve, apex, alpha, pd.order, False, True)
    return pd.Ainv @ mono[1:]


# ══════════════════════════════════════════════════════════════════════════════
# Consistency measurements
# ══════════════════════════════════════════════════════════════════════════════

def reduce_mod_lattice(B: np.ndarray, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split x = n + B m + r with integer n, m; returns (r, n, m)."""
    m = np.rint(np.linalg.solve(B.imag, np.imag(x)))
    shifted = x - B @ m
    n = np.rint(shifted.real)
    return shifted - n, n, m


def surface_residuals(curve: HyperellipticCurve, pd: PeriodData) -> Dict[str, float]:
    """Residuals of every period-data invariant (genus >= 1)."""
    g = curve.genus
    if g == 0:
        return {}
    fine = _a_periods(curve, 2 * pd.order)
    normalization = np.max(np.abs(pd.Ainv @ fine[:, 1:].T.real - np.eye(g)))
    third_a = np.max(np.abs(fine @ pd.omega_coef))
    alpha_ok = [
        abs(pd.alpha_omega[k] - 1j * np.pi * (1.0 + pd.L[: k + 1].sum())) for k in range(g)
    ]
    detours = [np.max(np.abs(detour_abel(curve, pd, k) - pd.alpha_abel[k])) for k in range(g)]
    D_red, _, _ = reduce_mod_lattice(pd.B, pd.D)
    return {
        "normalization": float(normalization),
        "third_kind_a_periods": float(third_a),
        "b_symmetry": float(np.max(np.abs(pd.B - pd.B.T))),
        "b_direct": float(np.max(np.abs(pd.B - pd.B_direct))),
        "im_b_min_eig": float(np.min(np.linalg.eigvalsh(0.5 * (pd.B.imag + pd.B.imag.T)))),
        "re_b_integer": float(np.max(np.abs(pd.B.real - np.rint(pd.B.real)))),
        "bilinear": float(np.max(np.abs(pd.L + 2.0 * pd.u_inf))),
        "alpha_omega": float(max(alpha_ok)),
        "half_period_path": float(max(detours)),
        "riemann_vector": float(np.max(np.abs(D_red))),
    }
