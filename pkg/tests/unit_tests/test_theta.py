import numpy as np
import pytest

from src.akhiezer.errors import NearThetaDivisor, RadiusInsufficient
from src.akhiezer.theta import (
    MAX_RADIUS,
    ThetaContext,
    quasi_periodicity_residual,
    tail_bound,
    theta,
    theta_and_scale,
    theta_dlog,
    theta_grad,
)

SQUARE = np.array([[1j]])
PAIR = np.array([[1.1j, 0.2 + 0.3j], [0.2 + 0.3j, 0.8j]])


def test_theta_constant_of_the_square_lattice() -> None:
    ctx = ThetaContext.certified(SQUARE)
    assert theta(ctx, [0.0]).real == pytest.approx(1.0864348112133080, abs=1e-14)
    assert abs(theta(ctx, [0.0]).imag) < 1e-15


def test_odd_half_period_is_a_zero() -> None:
    ctx = ThetaContext.certified(SQUARE, box=1.0)
    value, scale = theta_and_scale(ctx, [0.5 + 0.5j])
    assert abs(value) < 1e-14 * scale
    with pytest.raises(NearThetaDivisor):
        theta_dlog(ctx, [0.5 + 0.5j], 0)


def test_genus_zero_is_trivial() -> None:
    ctx = ThetaContext.certified(np.zeros((0, 0)))
    assert ctx.radius == 0
    assert theta(ctx, []) == 1.0
    assert theta_grad(ctx, []).shape == (0,)
    with pytest.raises(IndexError):
        theta_dlog(ctx, [], 0)


@pytest.mark.parametrize(
    "n,m",
    [([1, 0], [0, 0]), ([0, 0], [1, 0]), ([0, 0], [0, -1]), ([2, -1], [1, 1])],
)
def test_quasi_periodicity(n, m) -> None:
    ctx = ThetaContext.certified(PAIR, box=6.0)
    s = np.array([0.13 + 0.05j, -0.31 + 0.02j])
    assert quasi_periodicity_residual(ctx, s, n, m) < 1e-10


def test_gradient_matches_central_difference() -> None:
    ctx = ThetaContext.certified(PAIR, box=1.0)
    s = np.array([0.21 + 0.1j, 0.07 - 0.05j])
    grad = theta_grad(ctx, s)
    step = 1e-6
    for j in range(2):
        e = np.zeros(2)
        e[j] = step
        fd = (theta(ctx, s + e) - theta(ctx, s - e)) / (2 * step)
        assert abs(fd - grad[j]) < 1e-7 * max(1.0, abs(grad[j]))
        assert theta_dlog(ctx, s, j) == pytest.approx(grad[j] / theta(ctx, s))


def test_even_and_real_on_real_arguments() -> None:
    B = np.array([[0.9j, 0.1j], [0.1j, 1.3j]])
    ctx = ThetaContext.certified(B)
    s = np.array([0.3, -0.7])
    assert theta(ctx, s) == pytest.approx(theta(ctx, -s))
    assert abs(theta(ctx, s).imag) < 1e-14


def test_tail_bound_shape() -> None:
    assert tail_bound(2, 1.0, 2, 3.0) == float("inf")
    assert tail_bound(0, 1.0, 0, 0.0) == 0.0
    bounds = [tail_bound(2, 0.8, r, 1.0) for r in (3, 4, 5)]
    assert bounds[0] > bounds[1] > bounds[2] > 0


def test_radius_guards() -> None:
    ctx = ThetaContext.certified(SQUARE)
    with pytest.raises(RadiusInsufficient):
        theta(ctx, [5j])
    with pytest.raises(RadiusInsufficient):
        ThetaContext.certified(np.array([[1e-4j]]))
    assert ThetaContext.certified(SQUARE, box=4.0).radius <= MAX_RADIUS


def test_rejects_bad_period_matrices() -> None:
    with pytest.raises(ValueError):
        ThetaContext(np.array([[1j, 0.5j], [0.0, 1j]]), radius=3)
    with pytest.raises(ValueError):
        ThetaContext(np.array([[-1j]]), radius=3)
    with pytest.raises(ValueError):
        ThetaContext.certified(np.array([[1.0 + 0j]]))
