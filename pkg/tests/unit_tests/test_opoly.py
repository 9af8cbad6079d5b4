import logging

import numpy as np
import pytest

from src.akhiezer.errors import IllConditioned
from src.akhiezer.opoly import (
    eval_P,
    eval_Q,
    eval_Q_quadrature,
    gram_matrix,
    hankel_det,
    hankel_product,
    m1,
    moment_recurrence,
    perturb_norms,
    stieltjes,
    y_matrix,
)
from src.akhiezer.quadrature import build_rules, moments


def test_chebyshev_table(chebyshev_table) -> None:
    t = chebyshev_table
    assert t.h[0] == pytest.approx(1.0)
    n = np.arange(1, t.n_max + 1)
    np.testing.assert_allclose(t.h[1:], 2.0 * 4.0 ** (-n), rtol=1e-12)
    assert t.a[1] == pytest.approx(0.5)
    np.testing.assert_allclose(t.a[2:], 0.25, rtol=1e-12)
    np.testing.assert_allclose(t.b[1:], 0.0, atol=1e-14)
    assert np.isnan(t.a[0]) and np.isnan(t.b[0])
    assert t.certified


def test_chebyshev_values(chebyshev_table) -> None:
    assert eval_P(chebyshev_table, 0, 2.0) == pytest.approx(1.0)
    assert eval_P(chebyshev_table, 2, 2.0) == pytest.approx(3.5)
    assert eval_Q(chebyshev_table, 1, 2.0) == pytest.approx(1.0)
    assert hankel_product(chebyshev_table, 3) == pytest.approx(1.0 / 16.0)


def test_first_coefficient_telescopes(two_band_table) -> None:
    t = two_band_table
    for n in range(1, t.n_max + 1):
        assert t.p1[n] == pytest.approx(-np.sum(t.b[1:n + 1]))


def test_wronskian_and_det(two_band, two_band_table) -> None:
    z = 0.3 + 0.7j
    for n in range(1, two_band_table.n_max + 1):
        wronskian = eval_P(two_band_table, n - 1, z) * eval_Q(two_band_table, n, z) - eval_P(
            two_band_table, n, z
        ) * eval_Q(two_band_table, n - 1, z)
        assert abs(wronskian - two_band_table.h[n - 1]) < 1e-9 * max(1.0, two_band_table.h[n - 1])
        assert abs(y_matrix(two_band_table, two_band, n, z).det - 1.0) < 1e-8


def test_gram_matrix_is_diagonal(two_band_engine, two_band_table) -> None:
    gram = gram_matrix(two_band_engine, two_band_table, 8)
    np.testing.assert_allclose(np.diag(gram), two_band_table.h[:9], rtol=1e-12)
    off = gram - np.diag(np.diag(gram))
    assert np.max(np.abs(off)) < 1e-12


def test_moment_oracle(two_band_engine, two_band_table) -> None:
    n = 5
    a, b, h = moment_recurrence(moments(two_band_engine, 2 * n), n)
    np.testing.assert_allclose(h, two_band_table.h[:n + 1], rtol=1e-8)
    np.testing.assert_allclose(a[1:], two_band_table.a[1:n + 1], rtol=1e-8)
    np.testing.assert_allclose(b[1:], two_band_table.b[1:n + 1], atol=1e-8)


def test_hankel_routes_agree(two_band, two_band_engine, two_band_table) -> None:
    for n in (1, 3, 5):
        assert hankel_det(two_band, two_band_engine, n) == pytest.approx(hankel_product(two_band_table, n), rel=1e-8)
    with pytest.raises(IllConditioned):
        hankel_det(two_band, two_band_engine, 13)
    with pytest.raises(ValueError):
        hankel_det(two_band, two_band_engine, 0)


def test_q_by_quadrature(two_band_engine, two_band_table) -> None:
    z = -0.1 + 0.4j
    for n in (1, 4, 9):
        direct = eval_Q_quadrature(two_band_engine, two_band_table, n, z)
        assert abs(direct - eval_Q(two_band_table, n, z)) < 1e-10 * max(1.0, abs(direct))


def test_m1_matches_large_z(two_band, two_band_table) -> None:
    z = 400.0j
    n = 2
    Y = y_matrix(two_band_table, two_band, n, z).value
    scaled = Y @ np.diag([z ** (-n), z**n])
    approx = (scaled - np.eye(2)) * z
    expected = m1(two_band_table, n)
    assert np.max(np.abs(approx - expected)) < 5e-2 * max(1.0, np.max(np.abs(expected)))


def test_degree_bounds(two_band_table) -> None:
    with pytest.raises(ValueError):
        eval_P(two_band_table, two_band_table.n_max + 1, 0.0)
    with pytest.raises(ValueError):
        y_matrix(two_band_table, None, 0, 2.0)
    with pytest.raises(ValueError):
        m1(two_band_table, 0)


def test_perturb_norms_copies(two_band_table) -> None:
    bumped = perturb_norms(two_band_table, {2: 1e-3})
    assert bumped.h[2] == pytest.approx(two_band_table.h[2] + 1e-3)
    assert bumped.a is two_band_table.a
    assert perturb_norms(two_band_table, {}) is two_band_table


def test_low_order_warns(two_band, caplog) -> None:
    with caplog.at_level(logging.WARNING):
        table = stieltjes(two_band, build_rules(two_band, 20), 10)
    assert not table.certified
    assert table.certified_up_to() == 2
    assert "uncertified" in caplog.text
