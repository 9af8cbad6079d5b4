"""Riemann theta function Θ(s; B) = Σ_t exp(iπ(t, Bt) + 2πi(t, s)) by box truncation.

The sum runs over integer vectors with ‖t‖∞ <= R. With λ the smallest
eigenvalue of Im B and Y = ‖Im s‖₁, every term on the shell ‖t‖∞ = k is
bounded by exp(-πλk² + 2πkY), which gives the certified tail bound used to
choose R.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from src.akhiezer.errors import NearThetaDivisor, RadiusInsufficient

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
DIVISOR_THRESHOLD = 1e-10
MAX_RADIUS = 60


def _min_eig(B: np.ndarray) -> float:
    imag = 0.5 * (B.imag + B.imag.T)
    return float(np.min(np.linalg.eigvalsh(imag)))


def tail_bound(g: int, lam: float, radius: int, box: float) -> float:
    """Bound on the discarded terms; infinite when R <= box/λ."""
    if g == 0:
        return 0.0
    if radius <= box / lam:
        return float("inf")
    total = 0.0
    k = radius + 1
    while True:
        shell = (2 * k + 1) ** g - (2 * k - 1) ** g
        term = shell * np.exp(-np.pi * lam * k * k + 2 * np.pi * k * box)
        total += term
        if term < 1e-18 * max(total, 1e-300):
            return total
        k += 1


@dataclass(frozen=True, eq=False)
class ThetaContext:
    """Period matrix, truncation radius and the argument box it certifies."""

    B: np.ndarray
    radius: int
    tol: float = DEFAULT_TOL
    box: float = 0.0
    lattice: np.ndarray = field(init=False, repr=False)
    quad_form: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        B = np.asarray(self.B, dtype=complex)
        g = B.shape[0]
        if B.shape != (g, g):
            raise ValueError(f"period matrix must be square, got {B.shape}")
        if g:
            scale = max(1.0, float(np.max(np.abs(B))))
            if np.max(np.abs(B - B.T)) > 1e-8 * scale:
                raise ValueError("period matrix is not symmetric")
            if _min_eig(B) <= 0:
                raise ValueError("Im B is not positive definite")
        span = range(-self.radius, self.radius + 1)
        lattice = np.array(list(itertools.product(span, repeat=g)), dtype=float).reshape(len(span) ** g, g)
        quad_form = np.einsum("ni,ij,nj->n", lattice, B, lattice)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "quad_form", quad_form)

    @property
    def genus(self) -> int:
        return self.B.shape[0]

    @property
    def min_eig(self) -> float:
        return _min_eig(self.B) if self.genus else float("inf")

    @classmethod
    def certified(cls, B: np.ndarray, tol: float = DEFAULT_TOL, box: float = 0.0) -> "ThetaContext":
        """Smallest radius whose tail bound on ‖Im s‖₁ <= box is below tol."""
        B = np.asarray(B, dtype=complex)
        g = B.shape[0]
        if g == 0:
            return cls(B=B, radius=0, tol=tol, box=box)
        lam = _min_eig(B)
        if lam <= 0:
            raise ValueError("Im B is not positive definite")
        radius = max(1, int(np.floor(box / lam)) + 1)
        while tail_bound(g, lam, radius, box) > tol:
            radius += 1
            if radius > MAX_RADIUS:
                raise RadiusInsufficient(
                    f"no radius up to {MAX_RADIUS} certifies tol {tol:.1e} on box {box:.3g}"
                )
        logger.debug("Theta radius %d for genus %d (λ_min %.4g, box %.3g)", radius, g, lam, box)
        return cls(B=B, radius=radius, tol=tol, box=box)


def _check_box(ctx: ThetaContext, s: np.ndarray) -> None:
    Y = float(np.sum(np.abs(s.imag)))
    if Y <= ctx.box:
        return
    bound = tail_bound(ctx.genus, ctx.min_eig, ctx.radius, Y)
    if bound > ctx.tol:
        raise RadiusInsufficient(
            f"tail bound {bound:.3e} exceeds tol {ctx.tol:.1e} at ‖Im s‖₁ = {Y:.4g} (radius {ctx.radius})"
        )


def _terms(ctx: ThetaContext, s) -> np.ndarray:
    vec = np.asarray(s, dtype=complex).reshape(ctx.genus)
    _check_box(ctx, vec)
    return np.exp(1j * np.pi * ctx.quad_form + 2j * np.pi * (ctx.lattice @ vec))


def theta(ctx: ThetaContext, s) -> complex:
    """Θ(s; B); identically 1 at genus 0."""
    if ctx.genus == 0:
        return 1.0 + 0j
    return complex(np.sum(_terms(ctx, s)))


def theta_and_scale(ctx: ThetaContext, s) -> Tuple[complex, float]:
    """Θ(s) together with Σ|terms|, the scale for divisor-proximity tests."""
    if ctx.genus == 0:
        return 1.0 + 0j, 1.0
    terms = _terms(ctx, s)
    return complex(np.sum(terms)), float(np.sum(np.abs(terms)))


def theta_grad(ctx: ThetaContext, s) -> np.ndarray:
    """Vector of ∂Θ/∂s_j by term-wise differentiation."""
    if ctx.genus == 0:
        return np.zeros(0, dtype=complex)
    terms = _terms(ctx, s)
    return 2j * np.pi * (ctx.lattice.T @ terms)


def theta_dlog(ctx: ThetaContext, s, j: int) -> complex:
    """Θ'_j(s) / Θ(s)."""
    if ctx.genus == 0:
        raise IndexError("genus 0 has no theta derivatives")
    terms = _terms(ctx, s)
    value = np.sum(terms)
    scale = np.sum(np.abs(terms))
    if abs(value) < DIVISOR_THRESHOLD * scale:
        raise NearThetaDivisor(f"|Θ(s)| = {abs(value):.3e} against term scale {scale:.3e}")
    return complex(2j * np.pi * (ctx.lattice[:, j] @ terms) / value)


def quasi_periodicity_residual(ctx: ThetaContext, s, n, m) -> float:
    """Relative residual of Θ(s + n + Bm) = exp(-πi(Bm, m) - 2πi(s, m)) Θ(s)."""
    s = np.asarray(s, dtype=complex)
    n = np.asarray(n, dtype=float)
    m = np.asarray(m, dtype=float)
    shifted = theta(ctx, s + n + ctx.B @ m)
    expected = np.exp(-1j * np.pi * (m @ ctx.B @ m) - 2j * np.pi * (s @ m)) * theta(ctx, s)
    return float(abs(shifted - expected) / max(abs(expected), 1e-300))
