"""Monic Akhiezer polynomials, second-kind polynomials and the matrix Y_n.

Recurrence coefficients come from the discretized Stieltjes procedure on the
band rules of ``quadrature``; every polynomial is evaluated by forward
three-term recurrence

    P_{n+1}(z) = (z - b_{n+1}) P_n(z) - a_n P_{n-1}(z),

with P_0 = 1, P_{-1} = 0 for the first kind and Q_0 = 0, Q_1 = μ₀ for the
second kind.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Dict, Tuple

import numpy as np
from scipy.linalg import cholesky, hankel

from src.akhiezer.errors import IllConditioned, LossOfPositivity
from src.akhiezer.geometry import ComplexLike, IntervalSet, psi
from src.akhiezer.quadrature import InnerProductEngine, integrate, moments

logger = logging.getLogger(__name__)

# quadrature nodes per band needed to certify degree n_max
ORDER_MARGIN = 16
HANKEL_MAX_N = 12
HANKEL_REL_ERR = 1e-6


@dataclass(frozen=True, eq=False)
class RecurrenceTable:
    """Coefficients indexed by n; slot 0 of ``a`` and ``b`` is unused (NaN).

    ``a[n]`` for 1 <= n <= n_max, ``b[n]`` for 1 <= n <= n_max + 1,
    ``h[n]`` and ``p1[n]`` for 0 <= n <= n_max.
    """

    n_max: int
    a: np.ndarray
    b: np.ndarray
    h: np.ndarray
    p1: np.ndarray
    order: int = 0

    @property
    def certified(self) -> bool:
        return self.order >= 2 * self.n_max + ORDER_MARGIN

    def certified_up_to(self) -> int:
        """Largest n the quadrature order certifies."""
        return max(0, (self.order - ORDER_MARGIN) // 2)


@dataclass(frozen=True, eq=False)
class YMatrix:
    value: np.ndarray
    n: int
    z: complex

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.value))


def stieltjes(E: IntervalSet, engine: InnerProductEngine, n_max: int) -> RecurrenceTable:
    """Discretized Stieltjes procedure on the band rules of ``engine``."""
    if engine.order < 2 * n_max + ORDER_MARGIN:
        logger.warning(
            "Quadrature order %d is below 2*n_max+%d for n_max=%d; high-n rows are uncertified",
            engine.order,
            ORDER_MARGIN,
            n_max,
        )
    t = engine.nodes
    w = engine.weights
    a = np.full(n_max + 1, np.nan)
    b = np.full(n_max + 2, np.nan)
    h = np.empty(n_max + 1)
    p_prev = np.zeros_like(t)
    p = np.ones_like(t)
    for n in range(n_max + 1):
        norm = float(np.sum(w * p * p))
        if not np.isfinite(norm) or norm <= 0:
            raise LossOfPositivity(
                f"h_{n} = {norm!r} is not positive; raise the quadrature order above {engine.order}"
            )
        h[n] = norm
        b[n + 1] = float(np.sum(w * t * p * p)) / norm
        if n >= 1:
            a[n] = h[n] / h[n - 1]
        if n == n_max:
            break
        shift = a[n] * p_prev if n >= 1 else 0.0
        p_prev, p = p, (t - b[n + 1]) * p - shift
    p1 = np.zeros(n_max + 1)
    for n in range(n_max):
        p1[n + 1] = p1[n] - b[n + 1]
    logger.info("Stieltjes table built for genus %d up to n=%d (order %d)", E.genus, n_max, engine.order)
    return RecurrenceTable(n_max=n_max, a=a, b=b, h=h, p1=p1, order=engine.order)


def perturb_norms(table: RecurrenceTable, offsets: Dict[int, float]) -> RecurrenceTable:
    """Return a copy with ``h[n] += offset``; ``a`` and ``b`` are left untouched."""
    if not offsets:
        return table
    h = table.h.copy()
    for n, offset in offsets.items():
        h[int(n)] += offset
        logger.warning("Injected offset %.3e into h_%d", offset, int(n))
    return replace(table, h=h)


def _forward(table: RecurrenceTable, z: np.ndarray, n: int, v0, v1) -> np.ndarray:
    # rows 0..n of the recurrence started from (v0, v1)
    out = np.empty((n + 1,) + z.shape, dtype=complex)
    out[0] = v0
    if n >= 1:
        out[1] = v1
    for k in range(1, n):
        out[k + 1] = (z - table.b[k + 1]) * out[k] - table.a[k] * out[k - 1]
    return out


def _check_degree(table: RecurrenceTable, n: int) -> None:
    if not 0 <= n <= table.n_max:
        raise ValueError(f"degree {n} outside table range 0..{table.n_max}")


def eval_P_all(table: RecurrenceTable, n: int, z: ComplexLike) -> np.ndarray:
    """Stack of P_0(z)..P_n(z)."""
    _check_degree(table, n)
    zz = np.asarray(z, dtype=complex)
    return _forward(table, zz, n, np.ones_like(zz), zz - table.b[1])


def eval_Q_all(table: RecurrenceTable, n: int, z: ComplexLike) -> np.ndarray:
    """Stack of Q_0(z)..Q_n(z)."""
    _check_degree(table, n)
    zz = np.asarray(z, dtype=complex)
    return _forward(table, zz, n, np.zeros_like(zz), np.full_like(zz, table.h[0]))


def _unwrap(values: np.ndarray) -> ComplexLike:
    return complex(values) if values.ndim == 0 else values


def eval_P(table: RecurrenceTable, n: int, z: ComplexLike) -> ComplexLike:
    """Monic P_n(z) by forward recurrence."""
    return _unwrap(eval_P_all(table, n, z)[n])


def eval_Q(table: RecurrenceTable, n: int, z: ComplexLike) -> ComplexLike:
    """Second-kind Q_n(z), degree n-1."""
    return _unwrap(eval_Q_all(table, n, z)[n])


def eval_Q_quadrature(
    engine: InnerProductEngine,
    table: RecurrenceTable,
    n: int,
    z: complex,
) -> complex:
    """Q_n(z) = ∫ (P_n(z) - P_n(t)) / (z - t) w₊(t) dt by direct quadrature."""
    pz = complex(eval_P(table, n, z))

    def quotient(t: np.ndarray) -> np.ndarray:
        return (pz - eval_P_all(table, n, t)[n]) / (z - t)

    return complex(integrate(engine, quotient))


def gram_matrix(engine: InnerProductEngine, table: RecurrenceTable, n: int) -> np.ndarray:
    """Matrix of discrete inner products ⟨P_j, P_k⟩ for j, k <= n."""
    values = eval_P_all(table, n, engine.nodes).real
    return (values * engine.weights) @ values.T


def hankel_det(E: IntervalSet, engine: InnerProductEngine, n: int) -> float:
    """D_n = det(μ_{j+k})_{j,k<n} by the determinant route (n <= 12)."""
    if n < 1:
        raise ValueError("Hankel determinant needs n >= 1")
    if n > HANKEL_MAX_N:
        raise IllConditioned(f"determinant route capped at n={HANKEL_MAX_N}; use hankel_product")
    mu = moments(engine, 2 * n - 2)
    matrix = hankel(mu[:n], mu[n - 1:])
    rel_err = np.linalg.cond(matrix) * np.finfo(float).eps
    if rel_err > HANKEL_REL_ERR:
        raise IllConditioned(
            f"Hankel matrix of size {n} for genus {E.genus} has estimated relative error {rel_err:.2e}"
        )
    return float(np.linalg.det(matrix))


def hankel_product(table: RecurrenceTable, n: int) -> float:
    """D_n as the product h_0 h_1 ... h_{n-1}."""
    if not 1 <= n <= table.n_max + 1:
        raise ValueError(f"product form needs 1 <= n <= {table.n_max + 1}")
    return float(np.prod(table.h[:n]))


def moment_recurrence(mu: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Recurrence data from moments through the Cholesky factor of the Hankel matrix.

    Returns ``(a, b, h)`` indexed like ``RecurrenceTable``: a[1..n], b[1..n],
    h[0..n]. Needs ``len(mu) >= 2n + 1``.
    """
    matrix = hankel(mu[: n + 1], mu[n: 2 * n + 1])
    r = cholesky(matrix, lower=False)
    diag = np.diag(r)
    h = diag**2
    a = np.full(n + 1, np.nan)
    b = np.full(n + 1, np.nan)
    for j in range(n):
        b[j + 1] = r[j, j + 1] / r[j, j] - (r[j - 1, j] / r[j - 1, j - 1] if j >= 1 else 0.0)
    a[1:] = h[1:] / h[:-1]
    return a, b, h


def y_matrix(table: RecurrenceTable, E: IntervalSet, n: int, z: complex) -> YMatrix:
    """Y_n(z) = [[P_n, ψP_n - Q_n], [P_{n-1}/h_{n-1}, (ψP_{n-1} - Q_{n-1})/h_{n-1}]]."""
    if n < 1:
        raise ValueError("Y_n is defined for n >= 1")
    psi_z = complex(psi(E, z))
    p = eval_P_all(table, n, z)
    q = eval_Q_all(table, n, z)
    h_prev = table.h[n - 1]
    value = np.array(
        [
            [p[n], psi_z * p[n] - q[n]],
            [p[n - 1] / h_prev, (psi_z * p[n - 1] - q[n - 1]) / h_prev],
        ],
        dtype=complex,
    )
    return YMatrix(value=value, n=n, z=complex(z))


def m1(table: RecurrenceTable, n: int) -> np.ndarray:
    """First coefficient of Y_n(z) z^{-nσ₃} = I + m₁/z + ...."""
    if not 1 <= n <= table.n_max:
        raise ValueError(f"m1 needs 1 <= n <= {table.n_max}")
    return np.array(
        [[table.p1[n], table.h[n]], [1.0 / table.h[n - 1], -table.p1[n]]],
        dtype=float,
    )

