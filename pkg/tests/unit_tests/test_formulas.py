import logging

import numpy as np
import pytest

from src.akhiezer.formulas import (
    P_n_theta,
    a_n_theta,
    b_n_theta,
    baker_direct,
    c12_theta,
    h_n_theta,
    hankel_theta,
    p1_theta,
    psi1_m1_check,
    psi_matrix_theta,
    psi_theta,
    sheet_flip_residual,
    theta_zero_residuals,
)
from src.akhiezer.opoly import eval_P, hankel_product, perturb_norms


def test_chebyshev_displays(chebyshev_pipeline) -> None:
    p = chebyshev_pipeline
    assert p.capacity == pytest.approx(0.5, rel=1e-12)
    assert h_n_theta(p, 0) == 1.0
    for n in range(1, 6):
        assert h_n_theta(p, n) == pytest.approx(2.0 * 4.0 ** (-n), rel=1e-10)
        assert b_n_theta(p, n) == pytest.approx(0.0, abs=1e-12)
        assert p1_theta(p, n) == pytest.approx(0.0, abs=1e-12)
    assert a_n_theta(p, 1) == pytest.approx(0.5, rel=1e-10)
    assert a_n_theta(p, 4) == pytest.approx(0.25, rel=1e-10)
    assert P_n_theta(p, 0, 2.0) == 1.0
    assert P_n_theta(p, 2, 2.0) == pytest.approx(3.5, rel=1e-9)
    assert hankel_theta(p, 2) == pytest.approx(1.0 / 16.0, rel=1e-9)


def test_recurrence_data_from_theta(two_band_pipeline, two_band_table) -> None:
    p, t = two_band_pipeline, two_band_table
    for n in range(1, 11):
        assert h_n_theta(p, n) == pytest.approx(t.h[n], rel=1e-6)
        assert a_n_theta(p, n) == pytest.approx(t.a[n], rel=1e-6)
        assert b_n_theta(p, n) == pytest.approx(t.b[n], abs=1e-6)
        assert p1_theta(p, n) == pytest.approx(t.p1[n], abs=1e-6)
        assert c12_theta(p, n) == pytest.approx(0.5 * t.h[n], rel=1e-6)
        assert hankel_theta(p, n) == pytest.approx(hankel_product(t, n + 1), rel=1e-6)


def test_index_guards(two_band_pipeline) -> None:
    with pytest.raises(ValueError):
        h_n_theta(two_band_pipeline, -1)
    with pytest.raises(ValueError):
        a_n_theta(two_band_pipeline, 0)
    with pytest.raises(ValueError):
        psi_theta(two_band_pipeline, 1, 0.2 + 0.3j, sheet=3)
    with pytest.raises(ValueError):
        psi_theta(two_band_pipeline, 0, 0.2 + 0.3j)


@pytest.mark.parametrize("z", [0.4 + 0.6j, -0.7 - 0.2j, 1.6 + 0.0j, -0.1 + 0.0j, 3.0 + 2.5j])
def test_polynomial_display(two_band_pipeline, two_band_table, z) -> None:
    for n in (1, 3, 7):
        expected = eval_P(two_band_table, n, z)
        assert abs(P_n_theta(two_band_pipeline, n, z) - expected) < 1e-6 * max(1.0, abs(expected))


def test_alpha_endpoint_moves_off_the_divisor(two_band_pipeline, two_band_table, caplog) -> None:
    with caplog.at_level(logging.WARNING):
        value = P_n_theta(two_band_pipeline, 3, -0.3)
    assert "theta divisor" in caplog.text
    assert value.real == pytest.approx(eval_P(two_band_table, 3, -0.3).real, abs=1e-4)


def test_baker_matrix_agrees(two_band, two_band_pipeline, two_band_table) -> None:
    z = 0.4 + 0.6j
    for n in (1, 2, 5):
        theta_side = psi_matrix_theta(two_band_pipeline, n, z)
        direct = baker_direct(two_band_table, two_band, n, z)
        assert np.max(np.abs(theta_side - direct)) < 1e-5 * max(1.0, np.max(np.abs(direct)))
        first, second = psi_theta(two_band_pipeline, n, z)
        assert first == pytest.approx(theta_side[0, 0])
        assert second == pytest.approx(theta_side[1, 0])


def test_psi1_relation_needs_the_first_step_correction(two_band_pipeline, two_band_table) -> None:
    first = psi1_m1_check(two_band_pipeline, two_band_table, 1)
    assert max(v for k, v in first.items() if k != "uncorrected") < 1e-6
    assert first["uncorrected"] > 0.4
    later = psi1_m1_check(two_band_pipeline, two_band_table, 3)
    assert "uncorrected" not in later
    assert max(later.values()) < 1e-6


def test_zeros_and_both_sheets(three_band_pipeline, three_band_table) -> None:
    assert np.all(theta_zero_residuals(three_band_pipeline) < 1e-8)
    for n in (1, 4):
        for z in (0.3 + 0.4j, -0.8 - 0.3j):
            assert sheet_flip_residual(three_band_pipeline, three_band_table, n, z) < 1e-5
    shifted = perturb_norms(three_band_table, {3: 1e-3})
    assert sheet_flip_residual(three_band_pipeline, shifted, 4, 0.3 + 0.4j) > 1e-3
