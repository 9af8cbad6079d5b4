"""Interval sets E = (β₀,α₁) ∪ (β₁,α₂) ∪ ... ∪ (β_g,β_{g+1}) and their weight.

The weight on the bands is the several-interval analogue of the Chebyshev
weight: inverse square-root behaviour at every β endpoint, square-root zeros
at every α endpoint. Off the bands it continues analytically as

    w(z) = (i/π) Π sqrt(z - α_j) / Π sqrt(z - β_j),

with every factor the principal square root, so the cuts fall exactly on the
bands. ψ(z) = -iπ w(z) is the Cauchy transform of the weight.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple, Union

import numpy as np

from src.akhiezer.errors import (
    ArityMismatch,
    DegenerateEndpoint,
    GeometryError,
    InterlacingViolation,
    OnCut,
    OutsideSupport,
)

logger = logging.getLogger(__name__)

DEFAULT_GAP_TOL = 1e-6
# |Im z| below CUT_TOL * diam(E) over a band counts as on the cut
CUT_TOL = 1e-12

ComplexLike = Union[complex, float, np.ndarray]


@dataclass(frozen=True)
class IntervalSet:
    """Ordered branch points of E; build through ``validate_interval_set``."""

    alphas: Tuple[float, ...]
    betas: Tuple[float, ...]
    deltas: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        deltas = np.array(self.alphas + self.betas, dtype=float)
        deltas.setflags(write=False)
        object.__setattr__(self, "deltas", deltas)

    @property
    def genus(self) -> int:
        return len(self.alphas)

    @property
    def bands(self) -> List[Tuple[float, float]]:
        g = self.genus
        right_ends = list(self.alphas) + [self.betas[g + 1]]
        return [(self.betas[k], right_ends[k]) for k in range(g + 1)]

    @property
    def gaps(self) -> List[Tuple[float, float]]:
        return [(self.alphas[k], self.betas[k + 1]) for k in range(self.genus)]

    @property
    def diameter(self) -> float:
        return self.betas[-1] - self.betas[0]

    @property
    def is_normalized(self) -> bool:
        return self.betas[0] == -1.0 and self.betas[-1] == 1.0

    @property
    def sorted_points(self) -> np.ndarray:
        """All branch points in increasing order."""
        return np.sort(self.deltas)

    def is_alpha(self, index: int) -> bool:
        """Whether ``deltas[index]`` is an α endpoint."""
        return index < self.genus

    def band_of(self, t: float) -> int:
        """Index of the open band containing ``t``, or -1."""
        for k, (lo, hi) in enumerate(self.bands):
            if lo < t < hi:
                return k
        return -1


@dataclass(frozen=True)
class WeightSeriesCoeffs:
    """Local and asymptotic expansion coefficients of ψ = -iπw.

    ``b_coeffs[k]`` belongs to β_k (k = 0..g+1). With principal roots the
    entries for k <= g are -i times a positive real and the last is positive.
    ``a_coeffs[j]`` belongs to α_{j+1} and is negative.
    """

    b_coeffs: np.ndarray
    a_coeffs: np.ndarray
    kappa: float
    c1: float


def validate_interval_set(
    alphas: Sequence[float],
    betas: Sequence[float],
    gap_tol: float = DEFAULT_GAP_TOL,
) -> IntervalSet:
    """Check interlacing and separation, returning an ``IntervalSet``."""
    alphas_t = tuple(float(a) for a in alphas)
    betas_t = tuple(float(b) for b in betas)
    if not all(np.isfinite(alphas_t + betas_t)):
        raise GeometryError("endpoints must be finite reals")
    if len(betas_t) != len(alphas_t) + 2:
        raise ArityMismatch(
            f"expected {len(alphas_t) + 2} betas for {len(alphas_t)} alphas, got {len(betas_t)}"
        )
    chain = [betas_t[0]]
    for alpha, beta in zip(alphas_t, betas_t[1:-1]):
        chain.extend([alpha, beta])
    chain.append(betas_t[-1])
    steps = np.diff(chain)
    if np.any(steps <= 0):
        raise InterlacingViolation(f"endpoints not strictly interlaced: {chain}")
    diameter = chain[-1] - chain[0]
    if steps.min() < gap_tol * diameter:
        raise DegenerateEndpoint(
            f"endpoint separation {steps.min():.3e} below {gap_tol:.1e} * diam(E)"
        )
    E = IntervalSet(alphas=alphas_t, betas=betas_t)
    if not E.is_normalized:
        logger.warning(
            "Interval set uses general endpoints [%s, %s]; formulas hold but the default normalization is -1, 1",
            betas_t[0],
            betas_t[-1],
        )
    return E


def _as_complex(z: ComplexLike) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _unwrap(values: np.ndarray, scalar: bool) -> ComplexLike:
    return complex(values) if scalar else values


def _root_product(z: np.ndarray, points: np.ndarray) -> np.ndarray:
    if points.size == 0:
        return np.ones_like(z)
    return np.prod(np.sqrt(z[..., None] - points), axis=-1)


def on_cut(E: IntervalSet, z: ComplexLike) -> np.ndarray:
    """Boolean mask of points lying on (or within CUT_TOL of) a closed band."""
    arr, _ = _as_complex(z)
    near_axis = np.abs(arr.imag) <= CUT_TOL * E.diameter
    inside = np.zeros(arr.shape, dtype=bool)
    for lo, hi in E.bands:
        inside |= (arr.real >= lo) & (arr.real <= hi)
    return near_axis & inside


def _check_off_cut(E: IntervalSet, arr: np.ndarray) -> None:
    if np.any(on_cut(E, arr)):
        raise OnCut("argument lies on a band of E")


def weight_plus(E: IntervalSet, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Return w₊(t) > 0 for t strictly inside the bands."""
    arr = np.asarray(t, dtype=float)
    inside = np.zeros(arr.shape, dtype=bool)
    for lo, hi in E.bands:
        inside |= (arr > lo) & (arr < hi)
    if not np.all(inside):
        raise OutsideSupport("weight_plus requires points strictly inside a band")
    alphas = np.asarray(E.alphas)
    betas = np.asarray(E.betas)
    num = np.prod(np.abs(arr[..., None] - alphas), axis=-1) if alphas.size else 1.0
    den = np.prod(np.abs(arr[..., None] - betas), axis=-1)
    values = np.sqrt(num / den) / np.pi
    return float(values) if values.ndim == 0 else values


def psi(E: IntervalSet, z: ComplexLike) -> ComplexLike:
    """Return ψ(z) = Π sqrt(z-α)/Π sqrt(z-β) off the bands."""
    arr, scalar = _as_complex(z)
    _check_off_cut(E, arr)
    values = _root_product(arr, np.asarray(E.alphas)) / _root_product(arr, np.asarray(E.betas))
    return _unwrap(values, scalar)


def w_complex(E: IntervalSet, z: ComplexLike) -> ComplexLike:
    """Return w(z) = (i/π)ψ(z) off the bands."""
    arr, scalar = _as_complex(z)
    values = 1j / np.pi * np.asarray(psi(E, arr))
    return _unwrap(values, scalar)


def boundary_w(E: IntervalSet, t: Union[float, np.ndarray], side: int = 1) -> ComplexLike:
    """Boundary value w(t ± i0) on a band; w(t + i0) = w₊(t), w(t - i0) = -w₊(t)."""
    return side * np.asarray(weight_plus(E, t), dtype=complex)


def boundary_psi(E: IntervalSet, t: Union[float, np.ndarray], side: int = 1) -> ComplexLike:
    """Boundary value ψ(t ± i0) = ∓iπ w₊(t) on a band."""
    return -1j * np.pi * np.asarray(boundary_w(E, t, side))


def limit_w(E: IntervalSet, t: float, side: int = 1) -> complex:
    """w evaluated at t ± iε with ε = 1e-8 * (length of the band holding t)."""
    k = E.band_of(t)
    if k < 0:
        raise OutsideSupport(f"{t} is not inside a band")
    lo, hi = E.bands[k]
    eps = 1e-8 * (hi - lo)
    return complex(w_complex(E, t + side * 1j * eps))


def series_coeffs(E: IntervalSet) -> WeightSeriesCoeffs:
    """Return the endpoint coefficients, κ and c₁ of E."""
    alphas = np.asarray(E.alphas, dtype=complex)
    betas = np.asarray(E.betas, dtype=complex)
    b_coeffs = np.empty(len(betas), dtype=complex)
    for k, beta in enumerate(betas):
        others = np.delete(betas, k)
        b_coeffs[k] = np.prod(np.sqrt(beta - alphas)) / np.prod(np.sqrt(beta - others))
    a_coeffs = np.empty(len(alphas), dtype=float)
    for j, alpha in enumerate(alphas):
        others = np.delete(alphas, j)
        value = np.prod(np.sqrt(alpha - others)) / np.prod(np.sqrt(alpha - betas))
        a_coeffs[j] = value.real
    kappa = 0.5 * (sum(E.betas) - sum(E.alphas))
    c1 = float(sum(b - a for a, b in zip(E.alphas, E.betas[1:-1])))
    return WeightSeriesCoeffs(b_coeffs=b_coeffs, a_coeffs=a_coeffs, kappa=kappa, c1=c1)
