"""Gauss-Jacobi rules matched to the endpoint behaviour of w₊.

Each band gets a rule whose Jacobi exponents are -1/2 at β endpoints and
+1/2 at α endpoints; the remaining smooth, positive part of w₊ is folded
into the weights. The same rules (``jacobi_rule``) integrate the
endpoint-singular differentials of the surface module.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Tuple

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from src.akhiezer.errors import NonFiniteSample
from src.akhiezer.geometry import IntervalSet

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 200


@lru_cache(maxsize=64)
def _reference_jacobi(order: int, e_left: float, e_right: float) -> Tuple[np.ndarray, np.ndarray]:
    # scipy weight is (1-x)^alpha (1+x)^beta on [-1, 1]
    x, w = roots_jacobi(order, e_right, e_left)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=16)
def _reference_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def jacobi_rule(
    order: int,
    lo: float,
    hi: float,
    e_left: float = 0.0,
    e_right: float = 0.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for ∫_lo^hi (t-lo)^e_left (hi-t)^e_right F(t) dt on a real segment."""
    x, w = _reference_jacobi(order, float(e_left), float(e_right))
    half = (hi - lo) / 2
    nodes = lo + half * (x + 1)
    weights = w * half ** (1 + e_left + e_right)
    return nodes, weights


def legendre_rule(order: int, lo: float = 0.0, hi: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [lo, hi]."""
    x, w = _reference_legendre(order)
    half = (hi - lo) / 2
    return lo + half * (x + 1), w * half


@dataclass(frozen=True, eq=False)
class BandRule:
    band: Tuple[float, float]
    nodes: np.ndarray
    weights: np.ndarray
    exponent_pair: Tuple[float, float]


@dataclass(frozen=True, eq=False)
class InnerProductEngine:
    """Discretization of ∫_E f w₊ dt; immutable once built."""

    rules: Tuple[BandRule, ...]
    order: int

    @property
    def nodes(self) -> np.ndarray:
        return np.concatenate([rule.nodes for rule in self.rules])

    @property
    def weights(self) -> np.ndarray:
        return np.concatenate([rule.weights for rule in self.rules])


def _smooth_factor(E: IntervalSet, t: np.ndarray, skip: Tuple[int, int]) -> np.ndarray:
    factor = np.full(t.shape, 1.0 / np.pi)
    for idx, delta in enumerate(E.deltas):
        if idx in skip:
            continue
        exponent = 0.5 if E.is_alpha(idx) else -0.5
        factor *= np.abs(t - delta) ** exponent
    return factor


def build_rules(E: IntervalSet, order: int = DEFAULT_ORDER) -> InnerProductEngine:
    """Build one endpoint-matched Jacobi rule per band of E."""
    if order < 4:
        raise ValueError("quadrature order must be at least 4")
    g = E.genus
    rules: List[BandRule] = []
    for k, (lo, hi) in enumerate(E.bands):
        # band k runs from β_k to α_{k+1}, the last one to β_{g+1}
        left_idx = g + k
        right_idx = k if k < g else 2 * g + 1
        e_left = -0.5
        e_right = 0.5 if k < g else -0.5
        nodes, weights = jacobi_rule(order, lo, hi, e_left, e_right)
        weights = weights * _smooth_factor(E, nodes, (left_idx, right_idx))
        nodes.setflags(write=False)
        weights.setflags(write=False)
        rules.append(BandRule((lo, hi), nodes, weights, (e_left, e_right)))
    logger.debug("Built %d band rules of order %d", len(rules), order)
    return InnerProductEngine(rules=tuple(rules), order=order)


def integrate(engine: InnerProductEngine, f: Callable[[np.ndarray], np.ndarray]):
    """Return Σ weights·f(nodes) ≈ ∫_E f(t) w₊(t) dt; ``f`` must be vectorized."""
    nodes = engine.nodes
    values = np.broadcast_to(np.asarray(f(nodes)), nodes.shape)
    if not np.all(np.isfinite(values)):
        raise NonFiniteSample("integrand is not finite at every quadrature node")
    total = np.sum(engine.weights * values)
    return complex(total) if np.iscomplexobj(total) else float(total)


def moments(engine: InnerProductEngine, k_max: int) -> np.ndarray:
    """Return μ_0..μ_{k_max} with μ_k = ∫ t^k w₊ dt."""
    nodes = engine.nodes
    weights = engine.weights
    powers = nodes[None, :] ** np.arange(k_max + 1)[:, None]
    return powers @ weights
