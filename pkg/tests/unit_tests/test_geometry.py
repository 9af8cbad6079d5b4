import logging

import numpy as np
import pytest

from src.akhiezer.errors import (
    ArityMismatch,
    DegenerateEndpoint,
    GeometryError,
    InterlacingViolation,
    OnCut,
    OutsideSupport,
)
from src.akhiezer.geometry import (
    boundary_psi,
    boundary_w,
    limit_w,
    on_cut,
    psi,
    series_coeffs,
    validate_interval_set,
    w_complex,
    weight_plus,
)


def test_validation_errors() -> None:
    with pytest.raises(ArityMismatch):
        validate_interval_set([-0.3], [-1.0, 1.0])
    with pytest.raises(InterlacingViolation):
        validate_interval_set([0.5], [-1.0, 0.1, 1.0])
    with pytest.raises(DegenerateEndpoint):
        validate_interval_set([-0.3], [-1.0, -0.3 + 1e-9, 1.0])
    with pytest.raises(GeometryError):
        validate_interval_set([], [-1.0, float("nan")])
    # geometry errors are also ValueErrors
    with pytest.raises(ValueError):
        validate_interval_set([], [1.0, -1.0])


def test_general_endpoints_warn(caplog) -> None:
    with caplog.at_level(logging.WARNING):
        E = validate_interval_set([], [-2.0, 2.0])
    assert not E.is_normalized
    assert "general endpoints" in caplog.text


def test_structure(two_band, three_band) -> None:
    assert two_band.genus == 1
    assert two_band.bands == [(-1.0, -0.3), (0.1, 1.0)]
    assert two_band.gaps == [(-0.3, 0.1)]
    assert two_band.diameter == pytest.approx(2.0)
    assert three_band.bands == [(-1.0, -0.5), (-0.3, 0.2), (0.5, 1.0)]
    assert list(three_band.sorted_points) == [-1.0, -0.5, -0.3, 0.2, 0.5, 1.0]
    assert two_band.band_of(0.5) == 1
    assert two_band.band_of(0.0) == -1


def test_weight_positive_inside_bands(two_band) -> None:
    t = np.array([-0.9, -0.5, -0.31, 0.11, 0.6, 0.99])
    assert np.all(weight_plus(two_band, t) > 0)
    with pytest.raises(OutsideSupport):
        weight_plus(two_band, 0.0)


def test_chebyshev_weight(chebyshev) -> None:
    assert weight_plus(chebyshev, 0.0) == pytest.approx(1.0 / np.pi)
    assert weight_plus(chebyshev, 0.6) == pytest.approx(1.0 / (np.pi * 0.8))


def test_psi_is_minus_i_pi_w(three_band) -> None:
    rng = np.random.default_rng(1)
    z = rng.uniform(-1.5, 1.5, 20) + 1j * rng.uniform(0.05, 1.0, 20)
    assert np.max(np.abs(psi(three_band, z) + 1j * np.pi * w_complex(three_band, z))) < 1e-14


def test_continuity_across_gaps_and_jump_across_bands(two_band) -> None:
    eta = 1e-10
    mid_gap = -0.1
    assert abs(w_complex(two_band, mid_gap + 1j * eta) - w_complex(two_band, mid_gap - 1j * eta)) < 1e-8
    t = 0.5
    above = w_complex(two_band, t + 1j * eta)
    below = w_complex(two_band, t - 1j * eta)
    assert abs(above + below) < 1e-8


def test_upper_boundary_value_is_the_weight(two_band) -> None:
    for t in (-0.7, 0.4):
        assert limit_w(two_band, t, +1) == pytest.approx(weight_plus(two_band, t), rel=1e-6)
        assert limit_w(two_band, t, -1) == pytest.approx(-weight_plus(two_band, t), rel=1e-6)
        assert boundary_w(two_band, t, +1) == pytest.approx(weight_plus(two_band, t))
        assert boundary_psi(two_band, t, +1) == pytest.approx(-1j * np.pi * weight_plus(two_band, t))


def test_on_cut(two_band) -> None:
    assert bool(on_cut(two_band, 0.5))
    assert not bool(on_cut(two_band, 0.0))
    assert not bool(on_cut(two_band, 0.5 + 1e-3j))
    with pytest.raises(OnCut):
        psi(two_band, 0.5)
    with pytest.raises(OutsideSupport):
        limit_w(two_band, 0.0)


def test_series_coeffs(two_band) -> None:
    coeffs = series_coeffs(two_band)
    assert coeffs.kappa == pytest.approx(0.2)
    assert coeffs.kappa == pytest.approx(0.5 * (sum(two_band.betas) - sum(two_band.alphas)), abs=1e-12)
    inner = coeffs.b_coeffs[:-1]
    assert np.all(np.abs(inner.real) < 1e-14)
    assert np.all(inner.imag < 0)
    assert coeffs.b_coeffs[-1].real > 0
    assert np.all(coeffs.a_coeffs < 0)


def test_closed_forms_and_decay(chebyshev, three_band) -> None:
    assert w_complex(chebyshev, 2.0) == pytest.approx(1j / (np.pi * np.sqrt(3.0)))
    for E in (chebyshev, three_band):
        for z in (1e6, -1e6, 1e6j):
            assert abs(z * w_complex(E, z) - 1j / np.pi) <= 1e-5 / np.pi
