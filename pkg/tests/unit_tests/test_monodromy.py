import numpy as np
import pytest

from src.akhiezer.errors import GeometryBroken
from src.akhiezer.monodromy import (
    DeformationProbe,
    calA,
    calA_expected,
    conjugation_residual,
    freud_residuals,
    fuchsian_residual,
    lax_residual,
    residues,
    schlesinger_fd,
    schlesinger_rhs,
    tau_identities,
    transfer,
)
from src.akhiezer.opoly import eval_P_all


@pytest.mark.parametrize("n", [1, 2, 5])
def test_residue_structure(two_band, two_band_table, n) -> None:
    resset = residues(two_band_table, two_band, n)
    for j in range(len(two_band.deltas)):
        expected_trace = -0.5 if two_band.is_alpha(j) else 0.5
        assert np.trace(resset.C[j]) == pytest.approx(expected_trace, abs=1e-8)
        assert abs(np.linalg.det(resset.C[j])) < 1e-8 * max(1.0, np.max(np.abs(resset.C[j])) ** 2)
    np.testing.assert_allclose(calA(resset, two_band, 0), calA_expected(two_band_table, two_band, n, 0), atol=1e-8)
    np.testing.assert_allclose(calA(resset, two_band, 1), calA_expected(two_band_table, two_band, n, 1), atol=1e-8)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_residues_sum_to_the_exponent_matrix(two_band, two_band_table, three_band, three_band_table, n) -> None:
    for E, table in ((two_band, two_band_table), (three_band, three_band_table)):
        total = residues(table, E, n).C.sum(axis=0)
        np.testing.assert_allclose(total, np.diag([float(n), 1.0 - n]), atol=1e-8)


def test_alpha_residues_annihilate_the_polynomial_column(two_band, two_band_table) -> None:
    n = 3
    alpha = two_band.deltas[0]
    assert two_band.is_alpha(0)
    A = residues(two_band_table, two_band, n).C[0]
    P = eval_P_all(two_band_table, n, alpha).real
    column = np.array([P[n], P[n - 1] / two_band_table.h[n - 1]])
    np.testing.assert_allclose(A @ column, np.zeros(2), atol=1e-10)
    np.testing.assert_allclose(A @ A, -0.5 * A, atol=1e-10)


def test_calA_rejects_higher_moments(two_band, two_band_table) -> None:
    with pytest.raises(ValueError):
        calA(residues(two_band_table, two_band, 1), two_band, 2)
    with pytest.raises(ValueError):
        residues(two_band_table, two_band, 0)


def test_transfer_has_unit_determinant(two_band_table) -> None:
    assert np.linalg.det(transfer(two_band_table, 3, 0.7 + 0.2j)) == pytest.approx(1.0)


@pytest.mark.parametrize("n", [1, 3, 6])
def test_conjugation_and_lax(three_band, three_band_table, n) -> None:
    assert conjugation_residual(three_band_table, three_band, n) < 1e-8
    assert lax_residual(three_band_table, three_band, n, 0.37 + 0.5j) < 1e-8


def test_fuchsian_system(two_band, two_band_table) -> None:
    for n in (1, 4):
        for z in (0.2 + 0.3j, -0.1 - 0.05j, 1.8 + 0.0j):
            assert fuchsian_residual(two_band_table, two_band, n, z) < 1e-6


def test_freud_equations(three_band, three_band_table) -> None:
    frame = freud_residuals(three_band_table, three_band, range(1, three_band_table.n_max + 1))
    assert set(frame["equation"]) == {"determinant", "shift", "second_order"}
    assert set(frame["family"]) == {"alpha", "beta"}
    assert frame["residual"].max() < 1e-8
    last = frame[frame["n"] == three_band_table.n_max]
    assert set(last["equation"]) == {"determinant"}


def test_schlesinger_rhs_sums_to_zero(three_band, three_band_table) -> None:
    resset = residues(three_band_table, three_band, 3)
    for k in range(len(three_band.deltas)):
        total = sum(schlesinger_rhs(resset, j, k) for j in range(len(three_band.deltas)))
        assert np.max(np.abs(total)) < 1e-10


@pytest.fixture(scope="module")
def two_band_deformation(two_band):
    return DeformationProbe(two_band, 4)


def test_schlesinger_by_finite_differences(two_band, two_band_deformation) -> None:
    for k in range(len(two_band.deltas)):
        entries = schlesinger_fd(two_band, 3, k, probe=two_band_deformation)
        assert len(entries) == len(two_band.deltas)
        for entry in entries:
            assert entry.check == "schlesinger"
            assert entry.residual < 1e-6


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_central_differences_shrink_fourfold(two_band, two_band_deformation, k) -> None:
    entries = schlesinger_fd(two_band, 3, k, 1e-3, tol=1.0, probe=two_band_deformation)
    ratios = [entry.ratio for entry in entries if entry.residual > 1e-8]
    assert ratios
    assert all(3.0 <= ratio <= 5.0 for ratio in ratios), ratios


def test_schlesinger_on_one_interval(chebyshev) -> None:
    probe = DeformationProbe(chebyshev, 4)
    for n in (1, 3):
        for k in (0, 1):
            entries = schlesinger_fd(chebyshev, n, k, probe=probe)
            assert len(entries) == 2
            assert max(entry.residual for entry in entries) < 1e-6
    for entry in tau_identities(chebyshev, 3, 1, probe=probe):
        assert entry.residual < 1e-6, entry


def test_tau_identities(two_band) -> None:
    entries = tau_identities(two_band, 2, 1)
    checks = {entry.check for entry in entries}
    assert checks == {"tau.norm_derivative", "tau.increment", "tau.closedness", "tau.calA0_constant"}
    for entry in entries:
        assert entry.residual < 1e-6, entry


def test_deformation_that_breaks_interlacing(two_band) -> None:
    probe = DeformationProbe(two_band, 2, order=60)
    with pytest.raises(GeometryBroken):
        probe.at(0, 0.5)
